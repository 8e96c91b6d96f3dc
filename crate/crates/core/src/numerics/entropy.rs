use statrs::function::gamma::ln_gamma;

use super::sum::NeumaierSum;
use super::PROB_SLACK;
use crate::error::{domain, Error, Result};

/// `-x ln x` with `h(0) = 0`. Values within the round-off window above one
/// are clamped.
pub fn xlogx(x: f64) -> Result<f64> {
    if x.is_nan() || !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&x) {
        return Err(domain(format!("xlogx argument {x} outside [0, 1]")));
    }
    Ok(h(x.clamp(0.0, 1.0)))
}

/// Unchecked `-x ln x` for hot loops; nonpositive inputs give zero.
#[inline]
pub(crate) fn h(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// `h(1 - eps)` without the cancellation of forming `1 - eps` first.
#[inline]
pub fn xlogx_one_minus(eps: f64) -> f64 {
    if eps <= 0.0 {
        return 0.0;
    }
    if eps >= 1.0 {
        return 0.0;
    }
    -(1.0 - eps) * (-eps).ln_1p()
}

/// Entropy of a single-mode thermal state with mean photon number `e`.
pub fn thermal_entropy_g(e: f64) -> Result<f64> {
    if e.is_nan() || e < 0.0 {
        return Err(domain(format!("thermal entropy needs E >= 0, got {e}")));
    }
    if e == 0.0 {
        return Ok(0.0);
    }
    if e.is_infinite() {
        return Ok(f64::INFINITY);
    }
    // (E+1)ln(E+1) - E ln E rearranged to stay accurate at both ends.
    Ok(e.ln_1p() + e * (1.0 / e).ln_1p())
}

/// Shannon entropy in nats. The input is not renormalized.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let mut total = NeumaierSum::new();
    for (i, &x) in p.iter().enumerate() {
        if x.is_nan() || x < -PROB_SLACK {
            return Err(domain(format!("negative probability {x} at index {i}")));
        }
        total.add(x);
    }
    // Loosest tail a TruncationPolicy can carry.
    if (total.value() - 1.0).abs() > 1e-3 {
        return Err(domain(format!(
            "probability vector sums to {}, not 1",
            total.value()
        )));
    }
    Ok(entropy_unchecked(p))
}

pub(crate) fn entropy_unchecked(p: &[f64]) -> f64 {
    p.iter().map(|&x| h(x)).collect::<NeumaierSum>().value()
}

/// `Σ p_i ln(p_i / q_i)`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    let mut acc = NeumaierSum::new();
    for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi < -PROB_SLACK || qi < -PROB_SLACK {
            return Err(domain(format!("negative probability at index {i}")));
        }
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Err(Error::SupportMismatch { index: i, p: pi });
        }
        acc.add(pi * (pi / qi).ln());
    }
    Ok(acc.value().max(0.0))
}

/// `ln C(n + m - 1, m - 1)`: log-dimension of the total-photon-number-`n`
/// block of `m` modes.
pub fn log_block_dimension(n: usize, m: usize) -> f64 {
    assert!(m >= 1, "mode count must be positive");
    let k = m - 1;
    let (small, large) = if n < k { (n, k) } else { (k, n) };
    if small == 0 {
        return 0.0;
    }
    if small <= 64 {
        let large = large as f64;
        return (1..=small)
            .map(|i| (large / i as f64).ln_1p())
            .collect::<NeumaierSum>()
            .value();
    }
    ln_gamma((n + m) as f64) - ln_gamma((n + 1) as f64) - ln_gamma(m as f64)
}

/// `log_block_dimension(n, m)` for `n = 0..len`.
pub fn log_block_dimensions(len: usize, m: usize) -> Vec<f64> {
    assert!(m >= 1, "mode count must be positive");
    let mut out = Vec::with_capacity(len);
    if m == 1 {
        out.resize(len, 0.0);
        return out;
    }
    let k = (m - 1) as f64;
    let mut acc = 0.0;
    for n in 0..len {
        if n > 0 {
            if n % 512 == 0 {
                acc = log_block_dimension(n, m);
            } else {
                acc += (k / n as f64).ln_1p();
            }
        }
        out.push(acc);
    }
    out
}
