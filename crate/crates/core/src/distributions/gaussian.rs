use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use super::dist::{first_moment, grow_until, poisson, PhotonDist};
use crate::error::{domain, Error, Result};
use crate::numerics::{
    hermite_signed_log, log_sum_exp, modified_hermite_signed_log, scaled_hermite_log_abs,
    NeumaierSum, TruncationPolicy,
};

/// Below this squeezing the Hermite argument blows up and the Poisson limit is used.
pub const SQUEEZE_FALLBACK: f64 = 1e-8;

const DRIFT: f64 = 1e-9;

/// `S(r) D(α)|0⟩` with real `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedCoherentParams {
    pub r: f64,
    pub alpha: f64,
}

impl SqueezedCoherentParams {
    pub fn new(r: f64, alpha: f64) -> Result<Self> {
        if !r.is_finite() || !alpha.is_finite() {
            return Err(domain("squeezed-coherent parameters must be finite"));
        }
        Ok(Self { r, alpha })
    }

    /// Picks `α ≥ 0` so the state carries `energy` photons.
    pub fn from_energy(r: f64, energy: f64) -> Result<Self> {
        let vac = r.sinh().powi(2);
        if !(energy >= 0.0) || !r.is_finite() {
            return Err(domain("squeezed-coherent energy must be finite and >= 0"));
        }
        if vac > energy * (1.0 + 1e-12) {
            return Err(Error::Infeasible(format!(
                "squeezing r = {r} needs {vac} photons but only {energy} are available"
            )));
        }
        let alpha2 = ((energy - vac) * (2.0 * r).exp()).max(0.0);
        Self::new(r, alpha2.sqrt())
    }

    pub fn energy(&self) -> f64 {
        self.r.sinh().powi(2) + (-2.0 * self.r).exp() * self.alpha * self.alpha
    }

    pub fn photon_variance(&self) -> f64 {
        ((4.0 * self.r).cosh() - 1.0) / 4.0 + self.alpha * self.alpha * (-4.0 * self.r).exp()
    }

    pub fn to_gaussian(&self) -> GaussianModeParams {
        let e2 = (2.0 * self.r).exp();
        GaussianModeParams {
            mean: [std::f64::consts::SQRT_2 * self.alpha * (-self.r).exp(), 0.0],
            cov: [[1.0 / e2, 0.0], [0.0, e2]],
        }
    }
}

/// First and second moments of a single-mode Gaussian state, vacuum
/// covariance equal to the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModeParams {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl GaussianModeParams {
    pub fn new(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        let g = Self { mean, cov };
        g.check()?;
        Ok(g)
    }

    pub fn coherent(alpha: f64) -> Self {
        Self {
            mean: [std::f64::consts::SQRT_2 * alpha, 0.0],
            cov: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn check(&self) -> Result<()> {
        let [[a, c], [c2, b]] = self.cov;
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || !self.mean.iter().all(|x| x.is_finite()) {
            return Err(Error::Physicality("non-finite moments".into()));
        }
        if (c - c2).abs() > 1e-12 * (1.0 + c.abs()) {
            return Err(Error::Physicality("covariance is not symmetric".into()));
        }
        let det = a * b - c * c;
        if det < 1.0 - 1e-9 || a + b < 2.0 - 1e-9 || a <= 0.0 || b <= 0.0 {
            return Err(Error::Physicality(format!(
                "covariance violates the uncertainty principle (det {det}, trace {})",
                a + b
            )));
        }
        Ok(())
    }

    pub fn energy(&self) -> f64 {
        let [x, p] = self.mean;
        (self.cov[0][0] + self.cov[1][1] - 2.0) / 4.0 + (x * x + p * p) / 2.0
    }

    pub fn photon_variance(&self) -> f64 {
        let [[a, c], [_, b]] = self.cov;
        let [x, p] = self.mean;
        let tr_sq = a * a + b * b + 2.0 * c * c;
        let quad = a * x * x + 2.0 * c * x * p + b * p * p;
        (tr_sq - 2.0) / 8.0 + quad / 2.0
    }

    pub fn is_pure(&self) -> bool {
        let [[a, c], [_, b]] = self.cov;
        (a * b - c * c - 1.0).abs() <= 1e-12
    }

    /// Pure-loss and thermal-noise attenuator acting on the moments.
    pub fn attenuate(&self, eta: f64, n_th: f64) -> Self {
        let se = eta.sqrt();
        let noise = (1.0 - eta) * (2.0 * n_th + 1.0);
        let mut cov = self.cov;
        for (i, row) in cov.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = eta * *v + if i == j { noise } else { 0.0 };
            }
        }
        Self {
            mean: [se * self.mean[0], se * self.mean[1]],
            cov,
        }
    }
}

/// Photon-number law of `S(r) D(α)|0⟩`.
pub fn squeezed_coherent(params: SqueezedCoherentParams, policy: &TruncationPolicy) -> Result<PhotonDist> {
    let SqueezedCoherentParams { r, alpha } = params;
    if !r.is_finite() || !alpha.is_finite() {
        return Err(domain("squeezed-coherent parameters must be finite"));
    }
    if r.abs() < SQUEEZE_FALLBACK {
        return poisson(alpha * alpha, policy);
    }
    let t = r.tanh();
    let lt = (t.abs() / 2.0).ln();
    let y = alpha / (2.0 * r).sinh().abs().sqrt();
    let base = -r.cosh().ln() - alpha * alpha * (-2.0 * r).exp() * (1.0 + t);
    let (probs, tail) = grow_until(policy, params.energy(), params.photon_variance(), |cut| {
        let hs = if r > 0.0 {
            hermite_signed_log(cut, y)
        } else {
            modified_hermite_signed_log(cut, y)
        };
        let probs: Vec<f64> = hs
            .iter()
            .enumerate()
            .map(|(n, hn)| (base - ln_gamma(n as f64 + 1.0) + n as f64 * lt + 2.0 * hn.log_magnitude).exp())
            .collect();
        residual_tail(&probs).map(|tail| (probs, tail))
    })?;
    let mean = first_moment(&probs);
    PhotonDist::new(probs, tail, mean)
}

fn residual_tail(probs: &[f64]) -> Result<f64> {
    let total = probs.iter().copied().collect::<NeumaierSum>().value();
    if total > 1.0 + DRIFT {
        return Err(domain(format!("photon-number law overshoots normalization: {total}")));
    }
    Ok((1.0 - total).max(0.0))
}

/// Photon-number law of a general single-mode Gaussian state.
pub fn gaussian_single_mode(params: GaussianModeParams, policy: &TruncationPolicy) -> Result<PhotonDist> {
    params.check()?;
    let [[a, c], [_, b]] = params.cov;
    let theta = 0.5 * (2.0 * c).atan2(a - b);
    let (sn, cs) = theta.sin_cos();
    let v1 = a * cs * cs + 2.0 * c * sn * cs + b * sn * sn;
    let v2 = a * sn * sn - 2.0 * c * sn * cs + b * cs * cs;
    let [x0, p0] = params.mean;
    let x = cs * x0 + sn * p0;
    let p = -sn * x0 + cs * p0;

    let t1 = (v1 + 1.0) / 2.0;
    let t2 = (v2 + 1.0) / 2.0;
    let aa = 1.0 / (2.0 * t1) + 1.0 / (2.0 * t2);
    let bb = Complex64::new(x / (std::f64::consts::SQRT_2 * t1), p / (std::f64::consts::SQRT_2 * t2));
    let cc = -1.0 / (4.0 * t1) + 1.0 / (4.0 * t2);
    let dd = -x * x / (2.0 * t1) - p * p / (2.0 * t2);
    let mut one_minus_a = 1.0 - aa;
    if one_minus_a < -1e-9 {
        return Err(Error::Physicality(format!("1 - A = {one_minus_a} is negative")));
    }
    one_minus_a = one_minus_a.max(0.0);
    let ln_oma = if one_minus_a > 1e-15 { one_minus_a.ln() } else { f64::NEG_INFINITY };
    let prefactor = dd - 0.5 * (t1 * t2).ln();

    let (probs, tail) = grow_until(policy, params.energy(), params.photon_variance(), |cut| {
        let lg = scaled_hermite_log_abs(cut, bb, cc);
        let lf: Vec<f64> = (0..=cut).map(|k| ln_gamma(k as f64 + 1.0)).collect();
        let mut terms = Vec::with_capacity(cut + 1);
        let probs: Vec<f64> = (0..=cut)
            .map(|n| {
                if ln_oma == f64::NEG_INFINITY {
                    return (prefactor + 2.0 * lg[n] - lf[n]).exp();
                }
                terms.clear();
                for i in 0..=n {
                    let k = n - i;
                    terms.push(lf[n] - lf[i] - 2.0 * lf[k] + i as f64 * ln_oma + 2.0 * lg[k]);
                }
                (prefactor + log_sum_exp(&terms)).exp()
            })
            .collect();
        residual_tail(&probs).map(|tail| (probs, tail))
    })?;
    let mean = first_moment(&probs);
    PhotonDist::new(probs, tail, mean)
}
