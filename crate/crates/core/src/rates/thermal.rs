use statrs::function::gamma::ln_gamma;

use crate::channels::degeneracy_weighted_sum;
use crate::distributions::{poisson, poisson_entropy, thermal_total};
use crate::error::{domain, Result};
use crate::numerics::{h, quadrature_semiinfinite, try_quadrature_semiinfinite, NeumaierSum, TruncationPolicy};

use super::capacity;

const QUAD_TOL: f64 = 1e-11;
/// Below this log-weight the integrand is dropped.
const LOG_WEIGHT_FLOOR: f64 = -230.0;

/// Log-density of the Gamma law with the given shape and mean.
fn log_gamma_weight(shape: f64, mean: f64, s: f64) -> f64 {
    if s == 0.0 {
        return if shape == 1.0 { -mean.ln() } else if shape > 1.0 { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    shape * (shape / mean).ln() + (shape - 1.0) * s.ln() - shape * s / mean - ln_gamma(shape)
}

fn check(m: usize, e: f64) -> Result<()> {
    if m == 0 {
        return Err(domain("mode count must be positive"));
    }
    if !(e > 0.0) || !e.is_finite() {
        return Err(domain(format!("energy must be finite and > 0, got {e}")));
    }
    Ok(())
}

/// Coherent states with Gamma-distributed intensity (shape `m`, mean `e`).
/// Their Poisson mixture is the thermal law, so the output entropy is
/// `m g(e/m)`.
pub fn gamma_thermal_coherent_rate(m: usize, e: f64, policy: &TruncationPolicy) -> Result<f64> {
    check(m, e)?;
    let k = m as f64;
    let eps = policy.tail_eps();
    let conditional = try_quadrature_semiinfinite(
        |s| {
            let lq = log_gamma_weight(k, e, s);
            if lq < LOG_WEIGHT_FLOOR {
                return Ok(0.0);
            }
            Ok(lq.exp() * poisson_entropy(s, eps)?)
        },
        e / k,
        QUAD_TOL,
    )?;
    Ok((capacity(m, e)? - conditional).max(0.0))
}

/// `∫ q(s) P^(s)(n) ds` for `n = 0..=n_max`, with `q` the Gamma weight of
/// shape `m` and mean `e`.
pub fn gamma_poisson_mixture(m: usize, e: f64, n_max: usize) -> Result<Vec<f64>> {
    check(m, e)?;
    let k = m as f64;
    (0..=n_max)
        .map(|n| {
            let nf = n as f64;
            let lnf = ln_gamma(nf + 1.0);
            quadrature_semiinfinite(
                |s| {
                    let lq = log_gamma_weight(k, e, s);
                    if lq < LOG_WEIGHT_FLOOR || s == 0.0 {
                        return if s == 0.0 && n == 0 && lq.is_finite() { lq.exp() } else { 0.0 };
                    }
                    (lq + nf * s.ln() - s - lnf).exp()
                },
                e / k,
                QUAD_TOL,
            )
        })
        .collect()
}

/// Phase reference sent alongside the code word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefKind {
    /// Uniform superposition of `0..=⌊2xE⌋` photons.
    TruncatedPhase,
    Coherent,
}

/// Entropy of the uniform law on `0..l` convolved with Poisson(`s`).
fn uniform_poisson_entropy(l: usize, s: f64, policy: &TruncationPolicy) -> Result<f64> {
    let p = poisson(s, policy)?;
    let probs = p.probs();
    let mut prefix = Vec::with_capacity(probs.len() + 1);
    prefix.push(0.0);
    let mut acc = NeumaierSum::new();
    for &x in probs {
        acc.add(x);
        prefix.push(acc.value());
    }
    let top = probs.len();
    let inv = 1.0 / l as f64;
    let mut out = NeumaierSum::new();
    for n in 0..top + l - 1 {
        let hi = prefix[(n + 1).min(top)];
        let lo = prefix[(n + 1).saturating_sub(l).min(top)];
        out.add(h((hi - lo).max(0.0) * inv));
    }
    Ok(out.value())
}

/// Rate when a fraction `x` of the energy goes into a phase reference on one
/// mode and the rest into Gamma-weighted coherent code words on the other
/// `m - 1` modes.
pub fn phase_ref_rate(m: usize, e: f64, x: f64, kind: RefKind, policy: &TruncationPolicy) -> Result<f64> {
    check(m, e)?;
    if m < 2 {
        return Err(domain("a phase reference needs at least two modes"));
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(domain(format!("reference fraction must lie in (0, 1), got {x}")));
    }
    let k = (m - 1) as f64;
    let mu = (1.0 - x) * e;
    let xe = x * e;
    let eps = policy.tail_eps();
    let width = (2.0 * xe).floor() as usize + 1;
    let ref_entropy = match kind {
        RefKind::TruncatedPhase => (width as f64).ln(),
        RefKind::Coherent => poisson_entropy(xe, eps)?,
    };
    let mixture = thermal_total(m - 1, mu, policy)?;
    let code_entropy = mixture.entropy() + degeneracy_weighted_sum(&mixture, m - 1);
    let joint = try_quadrature_semiinfinite(
        |s| {
            let lq = log_gamma_weight(k, mu, s);
            if lq < LOG_WEIGHT_FLOOR {
                return Ok(0.0);
            }
            let hs = match kind {
                RefKind::TruncatedPhase => uniform_poisson_entropy(width, s, policy)?,
                RefKind::Coherent => poisson_entropy(xe + s, eps)?,
            };
            Ok(lq.exp() * hs)
        },
        mu / k,
        QUAD_TOL,
    )?;
    Ok((ref_entropy + code_entropy - joint).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::convolve;
    use crate::distributions::PhotonDist;
    use approx::assert_abs_diff_eq;

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn gamma_weight_normalization_and_mean() {
        let one = quadrature_semiinfinite(|s| log_gamma_weight(2.0, 4.0, s).exp(), 2.0, 1e-12).unwrap();
        let mean = quadrature_semiinfinite(|s| s * log_gamma_weight(2.0, 4.0, s).exp(), 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(one, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(mean, 4.0, epsilon = 1e-9);
    }

    #[test]
    fn mixture_is_thermal() {
        let mix = gamma_poisson_mixture(2, 4.0, 40).unwrap();
        let th = thermal_total(2, 4.0, &pol()).unwrap();
        assert_abs_diff_eq!(mix[0], 1.0 / 9.0, epsilon = 1e-10);
        for (n, v) in mix.iter().enumerate() {
            assert_abs_diff_eq!(*v, th.get(n), epsilon = 1e-9);
        }
        let mix1 = gamma_poisson_mixture(1, 0.5, 10).unwrap();
        let th1 = thermal_total(1, 0.5, &pol()).unwrap();
        for (n, v) in mix1.iter().enumerate() {
            assert_abs_diff_eq!(*v, th1.get(n), epsilon = 1e-9);
        }
    }

    #[test]
    fn gamma_rate_below_capacity() {
        for m in [1, 2, 3] {
            for e in [0.1, 1.0, 10.0] {
                let r = gamma_thermal_coherent_rate(m, e, &pol()).unwrap();
                assert!(r > 0.0 && r < capacity(m, e).unwrap());
            }
        }
    }

    #[test]
    fn uniform_convolution_matches_direct() {
        let p = pol();
        for (l, s) in [(1, 2.0), (5, 0.0), (7, 3.3), (40, 12.0)] {
            let direct = convolve(&[PhotonDist::from_probs(vec![1.0 / l as f64; l]).unwrap(), poisson(s, &p).unwrap()], &p)
                .unwrap()
                .entropy();
            assert_abs_diff_eq!(uniform_poisson_entropy(l, s, &p).unwrap(), direct, epsilon = 1e-11);
        }
    }

    #[test]
    fn reference_eats_the_rate() {
        for kind in [RefKind::TruncatedPhase, RefKind::Coherent] {
            let rates: Vec<f64> = [0.99, 0.999, 0.99999]
                .iter()
                .map(|&x| phase_ref_rate(2, 5.0, x, kind, &pol()).unwrap())
                .collect();
            assert!(rates[0] > rates[1] && rates[1] > rates[2], "{rates:?}");
            assert!(rates[2] < 1e-3, "{rates:?}");
        }
        for x in [0.1, 0.5, 0.9] {
            let r = phase_ref_rate(3, 5.0, x, RefKind::Coherent, &pol()).unwrap();
            assert!(r > 0.0 && r < capacity(3, 5.0).unwrap());
        }
    }

    #[test]
    fn phase_ref_needs_two_modes() {
        assert!(phase_ref_rate(1, 1.0, 0.5, RefKind::Coherent, &pol()).is_err());
        assert!(phase_ref_rate(2, 1.0, 1.0, RefKind::Coherent, &pol()).is_err());
    }
}
