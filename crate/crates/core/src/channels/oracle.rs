use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::distributions::{first_moment, signal_energy, PhotonDist, Signal, SqueezedCoherentParams};
use crate::error::{domain, Error, Result};
use crate::numerics::{entropy_unchecked, NeumaierSum, TruncationPolicy, PROB_SLACK};

/// Fock-basis amplitudes `⟨n|ψ⟩` of a pure single-mode state up to a cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct FockAmplitudeVector {
    amps: Vec<Complex64>,
    tail: f64,
}

impl FockAmplitudeVector {
    pub fn new(amps: Vec<Complex64>, tail: f64) -> Result<Self> {
        let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if amps.is_empty() || !(0.0..=1.0).contains(&tail) || norm > 1.0 + 1e-10 || norm + tail < 1.0 - 1e-10 {
            return Err(domain(format!("amplitudes carry norm {norm} with tail {tail}")));
        }
        Ok(Self { amps, tail })
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }
}

fn with_tail(amps: Vec<f64>) -> (Vec<Complex64>, f64) {
    let norm: f64 = amps.iter().map(|c| c * c).collect::<NeumaierSum>().value();
    let amps = amps.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    (amps, (1.0 - norm).max(0.0))
}

/// Amplitudes of a pure single-mode signal.
///
/// Squeezed-coherent amplitudes come from the ladder relation
/// `(a cosh r + a† sinh r)|ψ⟩ = α|ψ⟩`, which is independent of the
/// Hermite closed form used for the photon-number law.
pub fn fock_amplitudes(signal: &Signal, policy: &TruncationPolicy) -> Result<FockAmplitudeVector> {
    match signal {
        Signal::Fock(occ) => {
            if occ.0.iter().filter(|&&n| n > 0).count() > 1 {
                return Err(Error::Unsupported("multi-mode Fock state has no single-mode amplitudes".into()));
            }
            let n = occ.total();
            let mut amps = vec![Complex64::new(0.0, 0.0); n + 1];
            amps[n] = Complex64::new(1.0, 0.0);
            FockAmplitudeVector::new(amps, 0.0)
        }
        Signal::Coherent { alpha } => squeezed_amplitudes(SqueezedCoherentParams { r: 0.0, alpha: *alpha }, policy),
        Signal::SqueezedCoherent(p) => squeezed_amplitudes(*p, policy),
        _ => Err(Error::Unsupported("amplitudes exist only for pure single-mode signals".into())),
    }
}

fn squeezed_amplitudes(p: SqueezedCoherentParams, policy: &TruncationPolicy) -> Result<FockAmplitudeVector> {
    let SqueezedCoherentParams { r, alpha } = p;
    let (ch, th) = (r.cosh(), r.tanh());
    let drive = alpha / ch;
    let k0 = ch.powf(-0.5) * (-0.5 * alpha * alpha * (-2.0 * r).exp() * (1.0 + th)).exp();
    let mut n = policy.initial_cutoff(p.energy(), p.photon_variance());
    loop {
        let mut k = Vec::with_capacity(n + 1);
        k.push(k0);
        if n >= 1 {
            k.push(drive * k0);
        }
        for j in 1..n {
            let next = (drive * k[j] - (j as f64).sqrt() * th * k[j - 1]) / ((j + 1) as f64).sqrt();
            k.push(next);
        }
        let (amps, tail) = with_tail(k);
        if tail <= policy.tail_eps() {
            return FockAmplitudeVector::new(amps, tail);
        }
        n = policy.grow(n)?;
    }
}

/// Dense single-mode density matrix in a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_amplitudes(amps: &FockAmplitudeVector) -> Self {
        let dim = amps.amps.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, a) in amps.amps.iter().enumerate() {
            for (j, b) in amps.amps.iter().enumerate() {
                data[i * dim + j] = a * b.conj();
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// `Σ_k A_k ρ A_k†` with `⟨n-k|A_k|n⟩ = √(C(n,k) η^{n-k} (1-η)^k)`.
    pub fn apply_loss(&self, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        let dim = self.dim;
        let kraus = kraus_elements(dim, eta);
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for k in 0..dim {
            for i in 0..dim - k {
                let ai = kraus[(i + k) * dim + k];
                if ai == 0.0 {
                    continue;
                }
                for j in 0..dim - k {
                    let aj = kraus[(j + k) * dim + k];
                    out[i * dim + j] += ai * aj * self.get(i + k, j + k);
                }
            }
        }
        Ok(Self { dim, data: out })
    }

    /// Completely dephases: keeps only the Fock-diagonal.
    pub fn dephase(&self) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for i in 0..self.dim {
            data[i * self.dim + i] = self.get(i, i);
        }
        Self { dim: self.dim, data }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("transmissivity {eta} outside [0, 1]")));
    }
    Ok(())
}

/// `kraus[n*dim + k] = √(C(n,k) η^{n-k} (1-η)^k)`.
fn kraus_elements(dim: usize, eta: f64) -> Vec<f64> {
    let mut out = vec![0.0; dim * dim];
    for n in 0..dim {
        for k in 0..=n {
            let survive = (n - k) as f64;
            let lost = k as f64;
            let v = if eta == 1.0 {
                if k == 0 { 1.0 } else { 0.0 }
            } else if eta == 0.0 {
                if k == n { 1.0 } else { 0.0 }
            } else {
                let lb = ln_gamma(n as f64 + 1.0) - ln_gamma(survive + 1.0) - ln_gamma(lost + 1.0);
                (0.5 * (lb + survive * eta.ln() + lost * (-eta).ln_1p())).exp()
            };
            out[n * dim + k] = v;
        }
    }
    out
}

/// Output photon-number law of a pure state sent through pure loss, built
/// from the damping Kraus operators applied to the amplitude vector.
pub fn loss_kraus_oracle(amps: &FockAmplitudeVector, eta: f64) -> Result<PhotonDist> {
    check_eta(eta)?;
    let dim = amps.amps.len();
    let kraus = kraus_elements(dim, eta);
    let mut probs = vec![0.0; dim];
    for k in 0..dim {
        // (A_k ψ)_{n} = kraus[n+k, k] c_{n+k}
        for (n, slot) in probs.iter_mut().enumerate().take(dim - k) {
            *slot += (kraus[(n + k) * dim + k] * amps.amps[n + k]).norm_sqr();
        }
    }
    let mean = first_moment(&probs);
    PhotonDist::new(probs, amps.tail, mean)
}

/// Holevo quantity of a single-mode ensemble after complete dephasing,
/// computed from explicit amplitudes.
pub fn dephase_oracle_holevo(ensemble: &[(f64, Signal)], policy: &TruncationPolicy) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(domain("empty ensemble"));
    }
    let total: f64 = ensemble.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-12 || ensemble.iter().any(|(w, _)| *w < -PROB_SLACK) {
        return Err(domain(format!("ensemble weights sum to {total}")));
    }
    let mut outputs = Vec::with_capacity(ensemble.len());
    for (w, s) in ensemble {
        let amps = fock_amplitudes(s, policy)?;
        let rho = DensityMatrix::from_amplitudes(&amps).dephase();
        debug_assert!((first_moment(&rho.diagonal()) - signal_energy(s)).abs() < 1e-6 * (1.0 + signal_energy(s)));
        outputs.push((*w, rho.diagonal()));
    }
    let len = outputs.iter().map(|(_, d)| d.len()).max().unwrap_or(1);
    let mut mix = vec![0.0; len];
    let mut cond = 0.0;
    for (w, d) in &outputs {
        for (slot, p) in mix.iter_mut().zip(d) {
            *slot += w * p;
        }
        cond += w * entropy_unchecked(d);
    }
    Ok((entropy_unchecked(&mix) - cond).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{poisson, squeezed_coherent, SqueezedCoherentParams};
    use approx::assert_abs_diff_eq;

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn amplitude_examples() {
        let v = fock_amplitudes(&Signal::vacuum(), &pol()).unwrap();
        assert_eq!(v.amps()[0], Complex64::new(1.0, 0.0));
        let alpha: f64 = 1.3;
        let c = fock_amplitudes(&Signal::Coherent { alpha }, &pol()).unwrap();
        let mut expect = (-alpha * alpha / 2.0).exp();
        for n in 0..30 {
            if n > 0 {
                expect *= alpha / (n as f64).sqrt();
            }
            assert_abs_diff_eq!(c.amps()[n].re, expect, epsilon = 1e-14);
        }
        let sv = fock_amplitudes(&Signal::SqueezedCoherent(SqueezedCoherentParams::new(0.5, 0.0).unwrap()), &pol()).unwrap();
        assert_eq!(sv.amps()[1].norm(), 0.0);
    }

    #[test]
    fn amplitudes_match_photon_law() {
        for (r, alpha) in [(0.3, 0.0), (0.6, 1.0), (-0.5, 0.8), (1.2, 2.0)] {
            let prm = SqueezedCoherentParams::new(r, alpha).unwrap();
            let a = fock_amplitudes(&Signal::SqueezedCoherent(prm), &pol()).unwrap();
            let d = squeezed_coherent(prm, &pol()).unwrap();
            for (n, c) in a.amps().iter().enumerate() {
                assert_abs_diff_eq!(c.norm_sqr(), d.get(n), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn kraus_examples() {
        let one = fock_amplitudes(&Signal::fock(1), &pol()).unwrap();
        let out = loss_kraus_oracle(&one, 0.8).unwrap();
        assert_abs_diff_eq!(out.get(0), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(out.get(1), 0.8, epsilon = 1e-15);

        let c = fock_amplitudes(&Signal::Coherent { alpha: 1.0 }, &pol()).unwrap();
        let same = loss_kraus_oracle(&c, 1.0).unwrap();
        for (n, p) in c.probabilities().iter().enumerate() {
            assert_eq!(same.get(n), *p);
        }
        let half = loss_kraus_oracle(&c, 0.5).unwrap();
        let p = poisson(0.5, &pol()).unwrap();
        for n in 0..30 {
            assert_abs_diff_eq!(half.get(n), p.get(n), epsilon = 1e-10);
        }
    }

    #[test]
    fn kraus_preserves_trace_and_composes() {
        let prm = SqueezedCoherentParams::new(0.6, 1.0).unwrap();
        let amps = fock_amplitudes(&Signal::SqueezedCoherent(prm), &pol()).unwrap();
        let rho = DensityMatrix::from_amplitudes(&amps);
        let (e1, e2) = (0.7, 0.6);
        let two_step = rho.apply_loss(e1).unwrap().apply_loss(e2).unwrap();
        let one_step = rho.apply_loss(e1 * e2).unwrap();
        for i in 0..rho.dim() {
            for j in 0..rho.dim() {
                assert!((two_step.get(i, j) - one_step.get(i, j)).norm() < 1e-9);
            }
        }
        let diag = loss_kraus_oracle(&amps, e1 * e2).unwrap();
        for (n, p) in one_step.diagonal().iter().enumerate() {
            assert_abs_diff_eq!(diag.get(n), *p, epsilon = 1e-14);
        }
        let total: f64 = diag.probs().iter().sum::<f64>() + diag.tail_mass();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn loss_commutes_with_dephasing() {
        let prm = SqueezedCoherentParams::new(0.4, 1.1).unwrap();
        let amps = fock_amplitudes(&Signal::SqueezedCoherent(prm), &pol()).unwrap();
        let rho = DensityMatrix::from_amplitudes(&amps);
        let a = rho.dephase().apply_loss(0.8).unwrap();
        let b = rho.apply_loss(0.8).unwrap().dephase();
        for i in 0..rho.dim() {
            for j in 0..rho.dim() {
                assert!((a.get(i, j) - b.get(i, j)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn holevo_examples() {
        let single = [(1.0, Signal::Coherent { alpha: 1.0 })];
        assert_abs_diff_eq!(dephase_oracle_holevo(&single, &pol()).unwrap(), 0.0, epsilon = 1e-12);
        let bit = [(0.5, Signal::vacuum()), (0.5, Signal::fock(1))];
        assert_abs_diff_eq!(dephase_oracle_holevo(&bit, &pol()).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert!(dephase_oracle_holevo(&[(0.7, Signal::vacuum())], &pol()).is_err());
    }

    #[test]
    fn holevo_bounded_by_mixture_entropy() {
        let ens = [
            (0.5, Signal::vacuum()),
            (0.3, Signal::Coherent { alpha: 1.5 }),
            (0.2, Signal::SqueezedCoherent(SqueezedCoherentParams::new(0.5, 1.0).unwrap())),
        ];
        let chi = dephase_oracle_holevo(&ens, &pol()).unwrap();
        let mut mix = vec![0.0; 200];
        for (w, s) in &ens {
            for (n, p) in fock_amplitudes(s, &pol()).unwrap().probabilities().iter().enumerate() {
                mix[n] += w * p;
            }
        }
        assert!(chi > 0.0);
        assert!(chi <= entropy_unchecked(&mix) + 1e-12);
    }
}
