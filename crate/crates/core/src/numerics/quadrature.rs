use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

/// Maximum integrand evaluations per call.
pub const QUADRATURE_EVAL_BUDGET: usize = 1_000_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
// Gauss weights on the odd Kronrod nodes 1, 3, 5 and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<G>(g: &mut G, a: f64, b: f64) -> Result<(f64, f64, f64)>
where
    G: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g(center - dx)?;
        let f2 = g(center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs(), abs_sum * half.abs()))
}

/// `∫_0^∞ f(s) ds` for integrands that decay on the scale `weight_scale`.
pub fn quadrature_semiinfinite<F>(f: F, weight_scale: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_quadrature_semiinfinite(|s| Ok(f(s)), weight_scale, rel_tol)
}

/// Fallible variant; the first integrand error aborts the integration.
pub fn try_quadrature_semiinfinite<F>(mut f: F, weight_scale: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(weight_scale > 0.0) || !weight_scale.is_finite() || !(rel_tol > 0.0) {
        return Err(domain("quadrature needs a positive finite scale and tolerance"));
    }
    let evals = Cell::new(0usize);
    let mut g = |v: f64| -> Result<f64> {
        evals.set(evals.get() + 1);
        let w = 1.0 - v;
        let s = weight_scale * v / w;
        let val = f(s)?;
        if !val.is_finite() {
            return Err(domain(format!("integrand is not finite at s = {s}")));
        }
        Ok(val * weight_scale / (w * w))
    };

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    let initial = 8;
    for i in 0..initial {
        let a = i as f64 / initial as f64;
        let b = (i + 1) as f64 / initial as f64;
        let (value, error, abs) = gk15(&mut g, a, b)?;
        total += value;
        total_err += error;
        total_abs += abs;
        heap.push(Panel { a, b, value, error });
    }
    loop {
        let target = (rel_tol * total.abs()).max(1e-15 * total_abs).max(f64::MIN_POSITIVE);
        if total_err <= target {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // the worst panel can no longer be split in double precision
            return Err(Error::NonConvergence {
                what: "quadrature_semiinfinite",
                iterations: evals.get(),
            });
        }
        let (v1, e1, a1) = gk15(&mut g, worst.a, mid)?;
        let (v2, e2, a2) = gk15(&mut g, mid, worst.b)?;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_abs += a1 + a2;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        if evals.get() >= QUADRATURE_EVAL_BUDGET {
            return Err(Error::NonConvergence {
                what: "quadrature_semiinfinite",
                iterations: evals.get(),
            });
        }
        // resum occasionally so the running totals do not drift
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}
