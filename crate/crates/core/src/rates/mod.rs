//! Rates and bounds for the phase-noise channel: capacity, covariant Holevo
//! quantities, coherent-state bounds, on/off and ternary encodings,
//! thermal-Gamma ensembles, truncated-Fock rates and phase-reference schemes.

mod encodings;
mod scheme;
mod thermal;

pub use encodings::{
    fock_truncated_rate, room_coherent_opt, room_rate, room_squeezed_opt, ternary_rate_opt,
    BinaryEncoding, PulseShape, TernaryEncoding,
};
pub(crate) use encodings::{binary_opt, click_probability, Ctx, Eval};
pub use scheme::{rate_with_loss, Scheme};
pub use thermal::{gamma_poisson_mixture, gamma_thermal_coherent_rate, phase_ref_rate, RefKind};

use serde::Serialize;

use crate::channels::degeneracy_weighted_sum;
use crate::distributions::{poisson, PhotonDist, Signal};
use crate::error::{domain, Error, Result};
use crate::numerics::{entropy_unchecked, thermal_entropy_g, TruncationPolicy, EULER_GAMMA};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub truncation_n: usize,
    pub tail_mass: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateResult {
    /// Nats per channel use (one use = one block of `m` modes).
    pub rate: f64,
    pub optimal_params: Vec<(String, f64)>,
    pub diagnostics: Diagnostics,
}

impl RateResult {
    pub(crate) fn exact(rate: f64) -> Self {
        Self {
            rate,
            optimal_params: Vec::new(),
            diagnostics: Diagnostics {
                truncation_n: 0,
                tail_mass: 0.0,
                iterations: 0,
                converged: true,
            },
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.optimal_params.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleEntry {
    pub weight: f64,
    pub signal: Signal,
    pub dist: PhotonDist,
}

/// Weighted signals with their photon-number laws.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    entries: Vec<EnsembleEntry>,
    mean_energy: f64,
}

impl Ensemble {
    pub fn new(items: Vec<(f64, Signal)>, policy: &TruncationPolicy) -> Result<Self> {
        let entries = items
            .into_iter()
            .map(|(weight, signal)| {
                let dist = signal.photon_dist(policy)?;
                Ok(EnsembleEntry { weight, signal, dist })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(entries)
    }

    pub fn from_entries(entries: Vec<EnsembleEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(domain("empty ensemble"));
        }
        let total: f64 = entries.iter().map(|e| e.weight).sum();
        if (total - 1.0).abs() > 1e-12 || entries.iter().any(|e| !(e.weight >= 0.0)) {
            return Err(domain(format!("ensemble weights sum to {total}")));
        }
        for e in &entries {
            if !e.signal.has_rank_one_blocks() {
                return Err(Error::BlockEntropy(format!("{:?}", e.signal)));
            }
        }
        let mean_energy = entries
            .iter()
            .map(|e| e.weight * crate::distributions::signal_energy(&e.signal))
            .sum();
        Ok(Self { entries, mean_energy })
    }

    pub fn entries(&self) -> &[EnsembleEntry] {
        &self.entries
    }

    pub fn mean_energy(&self) -> f64 {
        self.mean_energy
    }

    pub fn truncation_n(&self) -> usize {
        self.entries.iter().map(|e| e.dist.cutoff()).max().unwrap_or(0)
    }

    pub fn tail_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.dist.tail_mass()).fold(0.0, f64::max)
    }
}

/// `C = m g(E/m)`.
pub fn capacity(m: usize, e: f64) -> Result<f64> {
    if m == 0 {
        return Err(domain("mode count must be positive"));
    }
    Ok(m as f64 * thermal_entropy_g(e / m as f64)?)
}

/// Holevo quantity of the Haar-covariantized ensemble; every block of every
/// signal must be rank one.
pub fn covariant_holevo(ens: &Ensemble, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(domain("mode count must be positive"));
    }
    for e in &ens.entries {
        if !e.signal.has_rank_one_blocks() {
            return Err(Error::BlockEntropy(format!("{:?}", e.signal)));
        }
    }
    let parts: Vec<(f64, &PhotonDist)> = ens.entries.iter().map(|e| (e.weight, &e.dist)).collect();
    Ok(holevo_of_dists(&parts, m))
}

pub(crate) fn holevo_of_dists(parts: &[(f64, &PhotonDist)], m: usize) -> f64 {
    let len = parts.iter().map(|(_, d)| d.probs().len()).max().unwrap_or(1);
    let mut mix = vec![0.0; len];
    let mut cond = 0.0;
    let mut degeneracy = 0.0;
    for &(w, d) in parts {
        if w == 0.0 {
            continue;
        }
        for (slot, p) in mix.iter_mut().zip(d.probs()) {
            *slot += w * p;
        }
        cond += w * d.entropy();
        degeneracy += w * degeneracy_weighted_sum(d, m);
    }
    (entropy_unchecked(&mix) - cond).max(0.0) + degeneracy
}

/// Upper bound on the Poisson-channel capacity at mean photon number `e`.
pub fn cheraghchi_f(e: f64) -> Result<f64> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(domain(format!("Poisson bound needs E > 0, got {e}")));
    }
    let eg = (1.0 + EULER_GAMMA).exp();
    let num = 1.0 + (1.0 + eg) * e + 2.0 * e * e;
    let first = e * (num / (eg * e + 2.0 * e * e)).ln();
    let root = (num / (1.0 + e)).sqrt();
    let second = ((root - 1.0) / (2.0 * std::f64::consts::E).sqrt()).ln_1p();
    Ok(first + second)
}

/// Coherent-state rates never exceed this.
pub fn coherent_upper_bound(m: usize, e: f64, policy: &TruncationPolicy) -> Result<f64> {
    if m == 0 {
        return Err(domain("mode count must be positive"));
    }
    let f = cheraghchi_f(e)?;
    if m == 1 {
        return Ok(f);
    }
    Ok(f + degeneracy_weighted_sum(&poisson(e, policy)?, m))
}

/// Low-energy reference curves `(lower, upper)` for coherent-state rates.
pub fn low_energy_asymptotes(m: usize, e: f64) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(domain("mode count must be positive"));
    }
    if !(e > 0.0) || e >= (-1.0f64).exp() {
        return Err(domain(format!("asymptotic curves need 0 < E < 1/e, got {e}")));
    }
    let l = (1.0 / e).ln();
    let lm = (m as f64).ln();
    let lower = e * l - e * l.ln() + e * lm;
    let upper = e * l - e * l.ln() + e * (2.0 + 13f64.ln() - EULER_GAMMA + lm);
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::thermal_total;
    use approx::assert_abs_diff_eq;

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn capacity_examples() {
        assert_abs_diff_eq!(capacity(1, 1.0).unwrap(), 1.386_294_361_1, epsilon = 1e-10);
        assert_abs_diff_eq!(capacity(2, 2.0).unwrap(), 2.772_588_722_2, epsilon = 1e-10);
        assert_eq!(capacity(3, 0.0).unwrap(), 0.0);
    }

    fn thermal_fock_ensemble(m: usize, e: f64) -> Ensemble {
        let th = thermal_total(m, e, &pol()).unwrap();
        let z: f64 = th.probs().iter().sum();
        let items = th
            .probs()
            .iter()
            .enumerate()
            .map(|(n, p)| (p / z, Signal::fock(n)))
            .collect();
        Ensemble::new(items, &pol()).unwrap()
    }

    #[test]
    fn thermal_fock_ensemble_reaches_capacity() {
        for m in [1, 2, 4] {
            for e in [0.5, 1.0, 2.0] {
                let ens = thermal_fock_ensemble(m, e);
                assert_abs_diff_eq!(covariant_holevo(&ens, m).unwrap(), capacity(m, e).unwrap(), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn holevo_examples() {
        let single = Ensemble::new(vec![(1.0, Signal::coherent_with_energy(1.0))], &pol()).unwrap();
        let d = single.entries()[0].dist.clone();
        assert_abs_diff_eq!(covariant_holevo(&single, 3).unwrap(), degeneracy_weighted_sum(&d, 3), epsilon = 1e-12);
        let bit = Ensemble::new(vec![(0.5, Signal::vacuum()), (0.5, Signal::fock(1))], &pol()).unwrap();
        assert_abs_diff_eq!(covariant_holevo(&bit, 1).unwrap(), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn mixed_multimode_signals_are_rejected() {
        let lossy = crate::distributions::apply_loss(&Signal::fock(1), 0.5, 0.0).unwrap();
        let bad = Signal::Product(vec![lossy.clone(), lossy]);
        let err = Ensemble::new(vec![(1.0, bad)], &pol());
        assert!(matches!(err, Err(Error::BlockEntropy(_))));
    }

    #[test]
    fn cheraghchi_pinned_value() {
        // literal transcription evaluated independently
        assert_abs_diff_eq!(cheraghchi_f(1.0).unwrap(), 0.643_660_451_008_828_1, epsilon = 1e-14);
        assert!(cheraghchi_f(0.0).is_err());
    }

    #[test]
    fn cheraghchi_low_energy_expansion() {
        let c = (0.5 + EULER_GAMMA).exp() / (2.0 * 2f64.sqrt()) - 1.0;
        assert_abs_diff_eq!(c, 0.038, epsilon = 1e-3);
        let mut prev = f64::INFINITY;
        for k in 3..9 {
            let e = 10f64.powi(-k);
            let gap = (cheraghchi_f(e).unwrap() - (e * (1.0 / e).ln() + e * (c - EULER_GAMMA))).abs() / e;
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn asymptote_examples() {
        let (lo, hi) = low_energy_asymptotes(1, 1e-4).unwrap();
        assert_abs_diff_eq!(lo, 6.990e-4, epsilon = 1e-6);
        assert_abs_diff_eq!(hi - lo, 1e-4 * (2.0 + 13f64.ln() - EULER_GAMMA), epsilon = 1e-15);
        assert!(low_energy_asymptotes(1, 0.5).is_err());
    }
}
