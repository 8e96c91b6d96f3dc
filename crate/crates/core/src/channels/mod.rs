//! The phase-noise channel with loss, plus brute-force Fock-space oracles.

mod oracle;

pub use oracle::{
    dephase_oracle_holevo, fock_amplitudes, loss_kraus_oracle, DensityMatrix, FockAmplitudeVector,
};

use statrs::function::gamma::ln_gamma;

use crate::distributions::PhotonDist;
use crate::error::{domain, Result};
use crate::numerics::{log_block_dimensions, NeumaierSum};

/// `m` modes sharing one random phase, behind an attenuator `(eta, n_th)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    m: usize,
    eta: f64,
    n_th: f64,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        Self {
            m: 1,
            eta: 1.0,
            n_th: 0.0,
        }
    }
}

impl ChannelSpec {
    pub fn new(m: usize, eta: f64, n_th: f64) -> Result<Self> {
        if m == 0 {
            return Err(domain("mode count m must be at least 1"));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(domain(format!("transmissivity {eta} outside [0, 1]")));
        }
        if !(n_th >= 0.0) || !n_th.is_finite() {
            return Err(domain(format!("thermal occupation must be >= 0, got {n_th}")));
        }
        Ok(Self { m, eta, n_th })
    }

    pub fn lossless(m: usize) -> Result<Self> {
        Self::new(m, 1.0, 0.0)
    }

    /// Same loss and noise on a different number of modes.
    pub fn with_modes(&self, m: usize) -> Result<Self> {
        Self::new(m, self.eta, self.n_th)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn n_th(&self) -> f64 {
        self.n_th
    }

    pub fn is_lossless(&self) -> bool {
        self.eta == 1.0 && self.n_th == 0.0
    }
}

/// `ln C(x + k, k)` for real `x ≥ 0`.
fn log_binomial_real(x: f64, k: usize) -> f64 {
    let k = k as f64;
    ln_gamma(x + k + 1.0) - ln_gamma(x + 1.0) - ln_gamma(k + 1.0)
}

/// `Σ_n d(n) ln C(n+m-1, m-1)` over the retained entries.
pub fn degeneracy_weighted_sum(d: &PhotonDist, m: usize) -> f64 {
    degeneracy_weighted_sum_with_bound(d, m).0
}

/// As [`degeneracy_weighted_sum`], together with an upper bound on the
/// contribution of the discarded tail. The log-degeneracy is concave in `n`,
/// so the tail is bounded by its mass times the degeneracy at its mean.
pub fn degeneracy_weighted_sum_with_bound(d: &PhotonDist, m: usize) -> (f64, f64) {
    assert!(m >= 1, "mode count must be positive");
    if m == 1 {
        return (0.0, 0.0);
    }
    let lbd = log_block_dimensions(d.probs().len(), m);
    let value = d
        .probs()
        .iter()
        .zip(&lbd)
        .map(|(p, l)| p * l)
        .collect::<NeumaierSum>()
        .value();
    let tail = d.tail_mass();
    if tail == 0.0 {
        return (value, 0.0);
    }
    let kept_moment: f64 = crate::distributions::first_moment(d.probs());
    let floor = d.probs().len() as f64;
    let tail_mean = ((d.mean() - kept_moment) / tail).max(floor);
    (value, tail * log_binomial_real(tail_mean, m - 1))
}
