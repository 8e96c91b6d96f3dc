use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::numerics::{
    brent_root, entropy_unchecked, h, log_block_dimensions, NeumaierSum, TruncationPolicy,
    PROB_SLACK,
};

/// Probability law of the total photon number, truncated at `probs.len() - 1`
/// with the discarded mass recorded in `tail_mass`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDist {
    probs: Vec<f64>,
    tail_mass: f64,
    mean: f64,
}

const NORM_SLACK: f64 = 1e-10;

impl PhotonDist {
    /// Validates normalization against the tail and clamps round-off negatives.
    pub fn new(mut probs: Vec<f64>, tail_mass: f64, mean: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(domain("photon distribution needs at least one entry"));
        }
        if !(0.0..=1.0).contains(&tail_mass) {
            return Err(domain(format!("tail mass {tail_mass} outside [0, 1]")));
        }
        for (n, p) in probs.iter_mut().enumerate() {
            if p.is_nan() || *p < -PROB_SLACK {
                return Err(domain(format!("probability {p} at n = {n}")));
            }
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().copied().collect::<NeumaierSum>().value() + tail_mass;
        if (total - 1.0).abs() > NORM_SLACK {
            return Err(domain(format!("distribution sums to {total}")));
        }
        Ok(Self {
            probs,
            tail_mass,
            mean,
        })
    }

    /// A finite law with no tail; the mean is computed from the entries.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let mean = first_moment(&probs);
        Self::new(probs, 0.0, mean)
    }

    pub fn point_mass(n: usize) -> Self {
        let mut probs = vec![0.0; n + 1];
        probs[n] = 1.0;
        Self {
            probs,
            tail_mass: 0.0,
            mean: n as f64,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Largest photon number kept.
    pub fn cutoff(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn get(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    /// Shannon entropy of the retained entries.
    pub fn entropy(&self) -> f64 {
        entropy_unchecked(&self.probs)
    }
}

/// `Σ n p(n)`.
pub fn first_moment(probs: &[f64]) -> f64 {
    probs
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .collect::<NeumaierSum>()
        .value()
}

/// Retries `build(N)` with geometrically growing cutoffs until the reported
/// tail mass is below the policy threshold.
pub(crate) fn grow_until<F>(policy: &TruncationPolicy, mean: f64, variance: f64, mut build: F) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(usize) -> Result<(Vec<f64>, f64)>,
{
    if !mean.is_finite() || mean > policy.n_cap() as f64 {
        return Err(Error::Truncation {
            needed: if mean.is_finite() { mean.ceil() as usize } else { usize::MAX },
            cap: policy.n_cap(),
        });
    }
    let mut n = policy.initial_cutoff(mean, variance);
    loop {
        let (probs, tail) = build(n)?;
        if tail <= policy.tail_eps() {
            return Ok((probs, tail));
        }
        n = policy.grow(n)?;
    }
}

/// Tail bound for laws whose successive ratio `p(k+1)/p(k)` is nonincreasing
/// beyond the cutoff: `p(N+1) / (1 - ratio)`.
fn ratio_tail(next: f64, ratio: f64) -> f64 {
    if ratio < 1.0 {
        next / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// Poisson law with mean `s`.
pub fn poisson(s: f64, policy: &TruncationPolicy) -> Result<PhotonDist> {
    if !(s >= 0.0) {
        return Err(domain(format!("Poisson mean must be >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(PhotonDist::point_mass(0));
    }
    let ln_s = s.ln();
    let log_p = |n: usize| n as f64 * ln_s - s - ln_gamma(n as f64 + 1.0);
    let (probs, tail) = grow_until(policy, s, s, |cut| {
        let probs: Vec<f64> = (0..=cut).map(|n| log_p(n).exp()).collect();
        let tail = ratio_tail(log_p(cut + 1).exp(), s / (cut + 2) as f64);
        Ok((probs, tail))
    })?;
    Ok(PhotonDist {
        probs,
        tail_mass: tail,
        mean: s,
    })
}

/// Entropy of a Poisson law, summed over the window where the mass lives.
pub fn poisson_entropy(s: f64, tail_eps: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(domain(format!("Poisson mean must be finite and >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let ln_s = s.ln();
    let log_p = |n: usize| n as f64 * ln_s - s - ln_gamma(n as f64 + 1.0);
    let mode = s.floor() as usize;
    let cut = (tail_eps * 1e-3).ln();
    let mut acc = NeumaierSum::new();
    let mut n = mode;
    loop {
        let lp = log_p(n);
        acc.add(h(lp.exp()));
        if lp < cut && n as f64 > s {
            break;
        }
        n += 1;
    }
    let mut n = mode;
    while n > 0 {
        n -= 1;
        let lp = log_p(n);
        acc.add(h(lp.exp()));
        if lp < cut {
            break;
        }
    }
    Ok(acc.value())
}

/// Total photon number of `m` thermal modes carrying `e` photons in total.
pub fn thermal_total(m: usize, e: f64, policy: &TruncationPolicy) -> Result<PhotonDist> {
    if m == 0 {
        return Err(domain("mode count must be positive"));
    }
    if !(e >= 0.0) {
        return Err(domain(format!("energy must be >= 0, got {e}")));
    }
    if e == 0.0 {
        return Ok(PhotonDist::point_mass(0));
    }
    let mf = m as f64;
    let ln_theta = (e / (e + mf)).ln();
    let ln_base = mf * (mf / (e + mf)).ln();
    let theta = e / (e + mf);
    let (probs, tail) = grow_until(policy, e, e + e * e / mf, |cut| {
        let lbd = log_block_dimensions(cut + 2, m);
        let probs: Vec<f64> = (0..=cut)
            .map(|n| (lbd[n] + n as f64 * ln_theta + ln_base).exp())
            .collect();
        let next = (lbd[cut + 1] + (cut + 1) as f64 * ln_theta + ln_base).exp();
        let k = (cut + 1) as f64;
        let ratio = (k + mf) / (k + 1.0) * theta;
        Ok((probs, ratio_tail(next, ratio)))
    })?;
    Ok(PhotonDist {
        probs,
        tail_mass: tail,
        mean: e,
    })
}

fn truncated_mean(beta: f64, t: usize) -> f64 {
    // weights relative to the largest one
    let top = if beta >= 0.0 { 0.0 } else { t as f64 };
    let mut z = 0.0;
    let mut first = 0.0;
    for n in 0..=t {
        let w = (-beta * (n as f64 - top)).exp();
        z += w;
        first += n as f64 * w;
    }
    first / z
}

/// Inverse temperature of the law `∝ e^{-βn}` on `0..=t` with mean `s`.
pub fn truncated_thermal_beta(s: f64, t: usize) -> Result<f64> {
    let tf = t as f64;
    if !(s >= 0.0) || s > tf {
        return Err(domain(format!("truncated thermal mean {s} outside [0, {t}]")));
    }
    if t == 0 || s == 0.0 {
        return Ok(f64::INFINITY);
    }
    if s == tf {
        return Ok(f64::NEG_INFINITY);
    }
    let target = |b: f64| truncated_mean(b, t) - s;
    let mut bound = 1.0;
    while target(bound) > 0.0 || target(-bound) < 0.0 {
        bound *= 2.0;
        if bound > 1e6 {
            return Err(domain("truncated thermal mean too close to the support edge"));
        }
    }
    brent_root(target, -bound, bound, 1e-15)
}

/// Maximum-entropy law on `0..=t` with mean `s`.
pub fn truncated_thermal(s: f64, t: usize) -> Result<PhotonDist> {
    let beta = truncated_thermal_beta(s, t)?;
    if beta == f64::INFINITY {
        return Ok(PhotonDist::point_mass(0));
    }
    if beta == f64::NEG_INFINITY {
        let mut probs = vec![0.0; t + 1];
        probs[t] = 1.0;
        return PhotonDist::from_probs(probs);
    }
    let top = if beta >= 0.0 { 0.0 } else { t as f64 };
    let w: Vec<f64> = (0..=t).map(|n| (-beta * (n as f64 - top)).exp()).collect();
    let z: f64 = w.iter().sum();
    PhotonDist::from_probs(w.into_iter().map(|x| x / z).collect())
}

/// Exact convolution of independent photon-number laws.
pub fn convolve(dists: &[PhotonDist], policy: &TruncationPolicy) -> Result<PhotonDist> {
    let Some((first, rest)) = dists.split_first() else {
        return Err(domain("convolve needs at least one distribution"));
    };
    let mut probs = first.probs.clone();
    let mut tail = first.tail_mass;
    let mut mean = first.mean;
    for d in rest {
        let len = probs.len() + d.probs.len() - 1;
        if len > policy.n_cap() + 1 {
            return Err(Error::Truncation {
                needed: len - 1,
                cap: policy.n_cap(),
            });
        }
        let mut out = vec![0.0; len];
        for (i, &a) in probs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in d.probs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        probs = out;
        tail = (tail + d.tail_mass).min(1.0);
        mean += d.mean;
    }
    // trailing entries below the smallest representable contribution only cost time
    while probs.len() > 1 && *probs.last().unwrap() == 0.0 {
        probs.pop();
    }
    PhotonDist::new(probs, tail, mean)
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
    fn poisson_examples() {
        let vac = poisson(0.0, &pol()).unwrap();
        assert_eq!(vac.probs(), &[1.0]);
        let p = poisson(1.0, &pol()).unwrap();
        assert_abs_diff_eq!(p.get(0), 0.367_879_441_2, epsilon = 1e-10);
        assert_abs_diff_eq!(p.get(2), 0.183_939_720_6, epsilon = 1e-10);
        assert!(p.tail_mass() <= 1e-12);
        assert_abs_diff_eq!(first_moment(p.probs()), 1.0, epsilon = 1e-10);
        assert!(poisson(-1.0, &pol()).is_err());
    }

    #[test]
    fn poisson_entropy_of_unit_mean() {
        let p = poisson(1.0, &pol()).unwrap();
        assert_abs_diff_eq!(p.entropy(), 1.3048, epsilon = 1e-3);
        // independent summation in plain floats
        let mut direct = 0.0;
        let mut term = (-1.0f64).exp();
        for n in 0..60 {
            if n > 0 {
                term /= n as f64;
            }
            direct -= term * term.ln();
        }
        assert_abs_diff_eq!(p.entropy(), direct, epsilon = 1e-11);
        assert_abs_diff_eq!(poisson_entropy(1.0, 1e-12).unwrap(), direct, epsilon = 1e-11);
    }

    #[test]
    fn windowed_poisson_entropy_matches_full_sum() {
        for s in [0.01, 0.7, 5.0, 80.0, 3000.0] {
            let full = poisson(s, &pol()).unwrap().entropy();
            assert_abs_diff_eq!(poisson_entropy(s, 1e-12).unwrap(), full, epsilon = 1e-10 * full.max(1.0));
        }
        // Gaussian limit ½ ln(2πe s)
        let s: f64 = 1e6;
        let e = poisson_entropy(s, 1e-12).unwrap();
        assert_abs_diff_eq!(e, 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * s).ln(), epsilon = 1e-6);
    }

    #[test]
    fn thermal_examples() {
        let d = thermal_total(1, 1.0, &pol()).unwrap();
        for n in 0..20 {
            assert_abs_diff_eq!(d.get(n), 0.5f64.powi(n as i32 + 1), epsilon = 1e-15);
        }
        let d = thermal_total(2, 2.0, &pol()).unwrap();
        assert_abs_diff_eq!(d.get(0), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(first_moment(d.probs()), 2.0, epsilon = 1e-9);
        let d = thermal_total(5, 300.0, &pol()).unwrap();
        assert_abs_diff_eq!(first_moment(d.probs()), 300.0, epsilon = 1e-8);
    }

    #[test]
    fn truncated_thermal_examples() {
        let d = truncated_thermal(1.0, 2).unwrap();
        for n in 0..3 {
            assert_abs_diff_eq!(d.get(n), 1.0 / 3.0, epsilon = 1e-12);
        }
        let d = truncated_thermal(0.25, 1).unwrap();
        assert_abs_diff_eq!(d.get(0), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(d.get(1), 0.25, epsilon = 1e-12);
        assert!(truncated_thermal(3.0, 2).is_err());
    }

    #[test]
    fn truncated_thermal_matches_bisection_oracle() {
        let mean = |b: f64| {
            let (a, c) = ((-b).exp(), (-2.0 * b).exp());
            (a + 2.0 * c) / (1.0 + a + c)
        };
        let (mut lo, mut hi) = (0.0, 20.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mean(mid) > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let beta = 0.5 * (lo + hi);
        assert_abs_diff_eq!(truncated_thermal_beta(0.5, 2).unwrap(), beta, epsilon = 1e-12);
        let d = truncated_thermal(0.5, 2).unwrap();
        assert_abs_diff_eq!(d.mean(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn truncated_thermal_above_half_has_negative_beta() {
        let b = truncated_thermal_beta(4.5, 5).unwrap();
        assert!(b < 0.0);
        assert_abs_diff_eq!(truncated_thermal(4.5, 5).unwrap().mean(), 4.5, epsilon = 1e-12);
        assert_abs_diff_eq!(truncated_thermal(1e-9, 5).unwrap().mean(), 1e-9, epsilon = 1e-12);
    }

    #[test]
    fn convolution_examples() {
        let p = poisson(1.3, &pol()).unwrap();
        let c = convolve(&[PhotonDist::point_mass(0), p.clone()], &pol()).unwrap();
        for n in 0..p.probs().len() {
            assert_abs_diff_eq!(c.get(n), p.get(n), epsilon = 1e-16);
        }
        let a = poisson(0.7, &pol()).unwrap();
        let ab = convolve(&[a, p], &pol()).unwrap();
        let direct = poisson(2.0, &pol()).unwrap();
        for n in 0..40 {
            assert_abs_diff_eq!(ab.get(n), direct.get(n), epsilon = 1e-10);
        }
        let half = PhotonDist::from_probs(vec![0.5, 0.5]).unwrap();
        let b = convolve(&[half.clone(), half], &pol()).unwrap();
        assert_eq!(b.probs(), &[0.25, 0.5, 0.25]);
        assert!(convolve(&[], &pol()).is_err());
    }

    #[test]
    fn truncation_cap_is_reported() {
        let tight = TruncationPolicy::new(1e-12, 8, 64).unwrap();
        assert!(matches!(poisson(200.0, &tight), Err(Error::Truncation { .. })));
        assert!(matches!(poisson(50.0, &tight), Err(Error::Truncation { .. })));
    }

    proptest! {
        #[test]
        fn constructors_normalized(s in 0.0f64..60.0, m in 1usize..6) {
            for d in [poisson(s, &pol()).unwrap(), thermal_total(m, s, &pol()).unwrap()] {
                let total: f64 = d.probs().iter().sum::<f64>() + d.tail_mass();
                prop_assert!((total - 1.0).abs() < 1e-10);
                prop_assert!(d.tail_mass() <= 1e-12);
                prop_assert!((first_moment(d.probs()) - s).abs() < 1e-8 * s.max(1.0));
            }
        }
    }
}
