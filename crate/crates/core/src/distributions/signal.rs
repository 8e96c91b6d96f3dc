use statrs::function::gamma::ln_gamma;

use super::dist::{convolve, first_moment, poisson, PhotonDist};
use super::gaussian::{gaussian_single_mode, squeezed_coherent, GaussianModeParams, SqueezedCoherentParams};
use crate::error::{domain, Error, Result};
use crate::numerics::TruncationPolicy;

/// Photon numbers of a multi-mode Fock state `|n_1, ..., n_m⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockOccupation(pub Vec<usize>);

impl FockOccupation {
    pub fn single(n: usize) -> Self {
        Self(vec![n])
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// A transmitted state, described by what its photon-number law needs.
#[derive(Debug, Clone, PartialEq)]
pub enum Signal {
    Fock(FockOccupation),
    /// Coherent state with real amplitude.
    Coherent { alpha: f64 },
    SqueezedCoherent(SqueezedCoherentParams),
    Gaussian(GaussianModeParams),
    /// Single-mode state diagonal in the Fock basis with these weights.
    FockMixture(Vec<f64>),
    /// Independent single-mode states on distinct modes.
    Product(Vec<Signal>),
}

impl Signal {
    pub fn vacuum() -> Self {
        Signal::Fock(FockOccupation::single(0))
    }

    pub fn fock(n: usize) -> Self {
        Signal::Fock(FockOccupation::single(n))
    }

    pub fn coherent_with_energy(energy: f64) -> Self {
        Signal::Coherent { alpha: energy.max(0.0).sqrt() }
    }

    pub fn is_pure(&self) -> bool {
        match self {
            Signal::Fock(_) | Signal::Coherent { .. } | Signal::SqueezedCoherent(_) => true,
            Signal::Gaussian(g) => g.is_pure(),
            Signal::FockMixture(w) => w.iter().filter(|&&x| x > 0.0).count() <= 1,
            Signal::Product(parts) => parts.iter().all(Signal::is_pure),
        }
    }

    fn is_vacuum(&self) -> bool {
        match self {
            Signal::Fock(occ) => occ.total() == 0,
            Signal::Coherent { alpha } => *alpha == 0.0,
            Signal::SqueezedCoherent(p) => p.alpha == 0.0 && p.r == 0.0,
            Signal::Gaussian(g) => g.energy() == 0.0,
            Signal::FockMixture(w) => w.iter().skip(1).all(|&x| x == 0.0),
            Signal::Product(parts) => parts.iter().all(Signal::is_vacuum),
        }
    }

    /// Whether every fixed-photon-number block of the state is rank one.
    /// Holds for pure states and for anything occupying a single mode.
    pub fn has_rank_one_blocks(&self) -> bool {
        if self.is_pure() {
            return true;
        }
        match self {
            Signal::Fock(occ) => occ.0.iter().filter(|&&n| n > 0).count() <= 1,
            Signal::Product(parts) => {
                parts.iter().filter(|p| !p.is_vacuum()).count() <= 1
                    && parts.iter().all(Signal::has_rank_one_blocks)
            }
            _ => true,
        }
    }

    pub fn photon_dist(&self, policy: &TruncationPolicy) -> Result<PhotonDist> {
        match self {
            Signal::Fock(occ) => Ok(PhotonDist::point_mass(occ.total())),
            Signal::Coherent { alpha } => poisson(alpha * alpha, policy),
            Signal::SqueezedCoherent(p) => squeezed_coherent(*p, policy),
            Signal::Gaussian(g) => gaussian_single_mode(*g, policy),
            Signal::FockMixture(w) => PhotonDist::from_probs(w.clone()),
            Signal::Product(parts) => {
                let dists = parts
                    .iter()
                    .map(|s| s.photon_dist(policy))
                    .collect::<Result<Vec<_>>>()?;
                convolve(&dists, policy)
            }
        }
    }
}

/// Mean photon number of a signal.
pub fn signal_energy(signal: &Signal) -> f64 {
    match signal {
        Signal::Fock(occ) => occ.total() as f64,
        Signal::Coherent { alpha } => alpha * alpha,
        Signal::SqueezedCoherent(p) => p.energy(),
        Signal::Gaussian(g) => g.energy(),
        Signal::FockMixture(w) => first_moment(w),
        Signal::Product(parts) => parts.iter().map(signal_energy).sum(),
    }
}

/// Binomial thinning of a Fock-diagonal law: each photon survives with
/// probability `eta`.
pub fn thin_fock_weights(weights: &[f64], eta: f64) -> Vec<f64> {
    let n_max = weights.len().saturating_sub(1);
    let mut out = vec![0.0; weights.len().max(1)];
    if eta == 1.0 {
        out.copy_from_slice(weights);
        return out;
    }
    if eta == 0.0 {
        out[0] = weights.iter().sum();
        return out;
    }
    let (le, lq) = (eta.ln(), (-eta).ln_1p());
    let lf: Vec<f64> = (0..=n_max).map(|k| ln_gamma(k as f64 + 1.0)).collect();
    for (n, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (i, slot) in out.iter_mut().enumerate().take(n + 1) {
            let lb = lf[n] - lf[i] - lf[n - i] + i as f64 * le + (n - i) as f64 * lq;
            *slot += w * lb.exp();
        }
    }
    out
}

/// Sends a signal through an attenuator of transmissivity `eta` with a
/// thermal environment of occupation `n_th`.
pub fn apply_loss(signal: &Signal, eta: f64, n_th: f64) -> Result<Signal> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("transmissivity {eta} outside [0, 1]")));
    }
    if !(n_th >= 0.0) || !n_th.is_finite() {
        return Err(domain(format!("thermal occupation must be >= 0, got {n_th}")));
    }
    if eta == 1.0 && n_th == 0.0 {
        return Ok(signal.clone());
    }
    let fock_guard = || {
        if n_th > 0.0 {
            Err(Error::Unsupported("Fock signals with a thermal environment".into()))
        } else {
            Ok(())
        }
    };
    Ok(match signal {
        Signal::Fock(occ) => {
            fock_guard()?;
            let parts: Vec<Signal> = occ
                .0
                .iter()
                .map(|&n| {
                    let mut w = vec![0.0; n + 1];
                    w[n] = 1.0;
                    Signal::FockMixture(thin_fock_weights(&w, eta))
                })
                .collect();
            if parts.len() == 1 {
                parts.into_iter().next().unwrap()
            } else {
                Signal::Product(parts)
            }
        }
        Signal::FockMixture(w) => {
            fock_guard()?;
            Signal::FockMixture(thin_fock_weights(w, eta))
        }
        Signal::Coherent { alpha } if n_th == 0.0 => Signal::Coherent { alpha: eta.sqrt() * alpha },
        Signal::Coherent { alpha } => Signal::Gaussian(GaussianModeParams::coherent(*alpha).attenuate(eta, n_th)),
        Signal::SqueezedCoherent(p) => Signal::Gaussian(p.to_gaussian().attenuate(eta, n_th)),
        Signal::Gaussian(g) => Signal::Gaussian(g.attenuate(eta, n_th)),
        Signal::Product(parts) => Signal::Product(
            parts
                .iter()
                .map(|s| apply_loss(s, eta, n_th))
                .collect::<Result<Vec<_>>>()?,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn loss_examples() {
        let eta = 0.3;
        let Signal::FockMixture(w) = apply_loss(&Signal::fock(1), eta, 0.0).unwrap() else {
            panic!("expected a Fock mixture");
        };
        assert_abs_diff_eq!(w[0], 1.0 - eta, epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], eta, epsilon = 1e-15);

        let out = apply_loss(&Signal::coherent_with_energy(2.0), 0.5, 0.0).unwrap();
        assert_abs_diff_eq!(signal_energy(&out), 1.0, epsilon = 1e-15);
        assert!(matches!(out, Signal::Coherent { .. }));

        let sigs = [
            Signal::fock(3),
            Signal::coherent_with_energy(1.5),
            Signal::SqueezedCoherent(SqueezedCoherentParams::new(0.4, 1.0).unwrap()),
        ];
        for s in &sigs {
            assert_eq!(&apply_loss(s, 1.0, 0.0).unwrap(), s);
        }
        assert!(matches!(apply_loss(&Signal::fock(2), 0.5, 0.1), Err(Error::Unsupported(_))));
        assert!(apply_loss(&Signal::fock(2), 1.5, 0.0).is_err());
    }

    #[test]
    fn energy_examples() {
        assert_eq!(signal_energy(&Signal::vacuum()), 0.0);
        let sq = Signal::SqueezedCoherent(SqueezedCoherentParams::new(0.5, 0.0).unwrap());
        assert_abs_diff_eq!(signal_energy(&sq), 0.5f64.sinh().powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(signal_energy(&sq), 0.271_540_317_4, epsilon = 1e-10);
        let g = Signal::Gaussian(GaussianModeParams::new([2f64.sqrt(), 0.0], [[1.0, 0.0], [0.0, 1.0]]).unwrap());
        assert_abs_diff_eq!(signal_energy(&g), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn loss_scales_energy() {
        let sq = Signal::SqueezedCoherent(SqueezedCoherentParams::new(0.6, 1.2).unwrap());
        for eta in [0.2, 0.5, 0.9] {
            let out = apply_loss(&sq, eta, 0.0).unwrap();
            assert_abs_diff_eq!(signal_energy(&out), eta * signal_energy(&sq), epsilon = 1e-12);
            let out = apply_loss(&sq, eta, 0.3).unwrap();
            assert_abs_diff_eq!(
                signal_energy(&out),
                eta * signal_energy(&sq) + (1.0 - eta) * 0.3,
                epsilon = 1e-12
            );
            assert!(!out.is_pure());
            assert!(out.has_rank_one_blocks());
        }
    }

    #[test]
    fn rank_one_detection() {
        let mixed = apply_loss(&Signal::fock(2), 0.5, 0.0).unwrap();
        assert!(mixed.has_rank_one_blocks());
        let two = Signal::Product(vec![mixed.clone(), mixed.clone()]);
        assert!(!two.has_rank_one_blocks());
        let padded = Signal::Product(vec![mixed, Signal::vacuum()]);
        assert!(padded.has_rank_one_blocks());
        let pure = Signal::Product(vec![Signal::coherent_with_energy(1.0), Signal::fock(1)]);
        assert!(pure.has_rank_one_blocks());
    }

    #[test]
    fn product_dist_is_convolution() {
        let s = Signal::Product(vec![Signal::coherent_with_energy(0.5), Signal::coherent_with_energy(1.0)]);
        let d = s.photon_dist(&pol()).unwrap();
        let p = poisson(1.5, &pol()).unwrap();
        for n in 0..30 {
            assert_abs_diff_eq!(d.get(n), p.get(n), epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn fock_loss_preserves_probability(n in 0usize..80, eta in 0.0f64..=1.0) {
            let Signal::FockMixture(w) = apply_loss(&Signal::fock(n), eta, 0.0).unwrap() else {
                return Err(TestCaseError::fail("not a mixture"));
            };
            let total: f64 = w.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!((first_moment(&w) - eta * n as f64).abs() < 1e-10 * (n as f64).max(1.0));
        }
    }
}
