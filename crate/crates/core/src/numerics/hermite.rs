use num_complex::Complex64;

/// A real number stored as `sign · exp(log_magnitude)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogValue {
    pub log_magnitude: f64,
    pub sign: i8,
}

impl SignedLogValue {
    pub const ZERO: Self = Self {
        log_magnitude: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self {
                log_magnitude: x.abs().ln(),
                sign: if x > 0.0 { 1 } else { -1 },
            }
        }
    }

    /// Back to a plain float; overflows to infinity for huge magnitudes.
    pub fn value(&self) -> f64 {
        f64::from(self.sign) * self.log_magnitude.exp()
    }
}

const RESCALE_HI: f64 = 7.225_973_768_125_749e86; // e^200
const RESCALE_LO: f64 = 1.383_896_526_736_737_4e-87; // e^-200

/// `H_n(x)` for `n = 0..=n_max` (physicists' convention) in sign/log form.
pub fn hermite_signed_log(n_max: usize, x: f64) -> Vec<SignedLogValue> {
    three_term(n_max, x, -1.0)
}

/// Companion sequence `Ĥ_{n+1} = 2y Ĥ_n + 2n Ĥ_{n-1}`, i.e. `i^{-n} H_n(i y)`.
pub(crate) fn modified_hermite_signed_log(n_max: usize, y: f64) -> Vec<SignedLogValue> {
    three_term(n_max, y, 1.0)
}

fn three_term(n_max: usize, x: f64, second: f64) -> Vec<SignedLogValue> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(SignedLogValue::from_f64(1.0));
    if n_max == 0 {
        return out;
    }
    // true value = stored * exp(scale)
    let mut scale = 0.0;
    let mut prev = 1.0;
    let mut cur = 2.0 * x;
    out.push(SignedLogValue::from_f64(cur));
    for n in 1..n_max {
        let next = 2.0 * x * cur + second * 2.0 * n as f64 * prev;
        prev = cur;
        cur = next;
        let big = prev.abs().max(cur.abs());
        if big > RESCALE_HI || (big < RESCALE_LO && big > 0.0) {
            prev /= big;
            cur /= big;
            scale += big.ln();
        }
        let mut v = SignedLogValue::from_f64(cur);
        v.log_magnitude += scale;
        out.push(v);
    }
    out
}

/// `ln|G_k|` for `k = 0..=n_max` where `G_0 = 1`, `G_1 = b` and
/// `G_{k+1} = b·G_k + 2k·c·G_{k-1}`. These are Hermite polynomials with the
/// argument and normalization folded into `b` and `c`.
pub fn scaled_hermite_log_abs(n_max: usize, b: Complex64, c: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(0.0);
    if n_max == 0 {
        return out;
    }
    let log_abs = |z: Complex64| {
        let a = z.norm();
        if a == 0.0 {
            f64::NEG_INFINITY
        } else {
            a.ln()
        }
    };
    let mut scale = 0.0;
    let mut prev = Complex64::new(1.0, 0.0);
    let mut cur = b;
    out.push(log_abs(cur));
    for k in 1..n_max {
        let next = b * cur + 2.0 * k as f64 * c * prev;
        prev = cur;
        cur = next;
        let big = prev.norm().max(cur.norm());
        if big > RESCALE_HI || (big < RESCALE_LO && big > 0.0) {
            prev /= big;
            cur /= big;
            scale += big.ln();
        }
        out.push(log_abs(cur) + scale);
    }
    out
}
