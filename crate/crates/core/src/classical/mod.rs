//! Classical channels induced by a fixed measurement: Blahut–Arimoto and the
//! on/off photodetection channel.

use crate::distributions::{PhotonDist, Signal};
use crate::error::{domain, Error, Result};
use crate::numerics::{log_sum_exp, NeumaierSum, TruncationPolicy};
use crate::rates::{binary_opt, click_probability, BinaryEncoding, Ctx, Eval, RateResult};

const ROW_SLACK: f64 = 1e-12;
pub const BA_MAX_ITER: usize = 100_000;

/// Conditional law `W(y|x)`; rows are inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || width == 0 {
            return Err(domain("transition matrix must be non-empty"));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    got: row.len(),
                });
            }
            if row.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
                return Err(domain(format!("row {x} has a negative or non-finite entry")));
            }
            let sum: f64 = row.iter().copied().collect::<NeumaierSum>().value();
            if (sum - 1.0).abs() > ROW_SLACK {
                return Err(domain(format!("row {x} sums to {sum}")));
            }
        }
        Ok(Self { rows })
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    fn output_law(&self, q: &[f64]) -> Vec<f64> {
        (0..self.outputs())
            .map(|y| self.rows.iter().zip(q).map(|(row, &qx)| qx * row[y]).collect::<NeumaierSum>().value())
            .collect()
    }

    /// `D(W(.|x) || r)` for every input.
    fn divergences(&self, r: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(r)
                    .filter(|(&w, _)| w > 0.0)
                    .map(|(&w, &ry)| w * (w / ry).ln())
                    .collect::<NeumaierSum>()
                    .value()
            })
            .collect()
    }
}

/// `I(X;Y)` in nats for input law `q`.
pub fn mutual_information(q: &[f64], w: &TransitionMatrix) -> Result<f64> {
    if q.len() != w.inputs() {
        return Err(Error::DimensionMismatch {
            expected: w.inputs(),
            got: q.len(),
        });
    }
    let total: f64 = q.iter().sum();
    if q.iter().any(|&x| !(x >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(domain("input law must be a probability vector"));
    }
    let r = w.output_law(q);
    let d = w.divergences(&r);
    Ok(q.iter().zip(&d).map(|(&qx, &dx)| if qx > 0.0 { qx * dx } else { 0.0 }).collect::<NeumaierSum>().value().max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DmcCapacity {
    pub capacity: f64,
    pub input: Vec<f64>,
    pub iterations: usize,
}

/// Blahut–Arimoto from the uniform input, stopped when the
/// `max_x D(W_x || r)` upper bound is within `tol` of the lower bound.
///
/// Each step also tries an over-relaxed update `q exp(mu D)` and keeps it
/// when it raises the mutual information; this matters for nearly useless
/// channels where the plain iteration crawls.
pub fn dmc_capacity(w: &TransitionMatrix, tol: f64) -> Result<DmcCapacity> {
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    let k = w.inputs();
    let mut q = vec![1.0 / k as f64; k];
    let mut mu = 1.0;
    let step = |q: &[f64], d: &[f64], mu: f64| -> Vec<f64> {
        let logs: Vec<f64> = q.iter().zip(d).map(|(&qx, &dx)| qx.ln() + mu * dx).collect();
        let norm = log_sum_exp(&logs);
        logs.iter().map(|&l| (l - norm).exp()).collect()
    };
    for it in 1..=BA_MAX_ITER {
        let r = w.output_law(&q);
        let d = w.divergences(&r);
        let logs: Vec<f64> = q.iter().zip(&d).map(|(&qx, &dx)| qx.ln() + dx).collect();
        let lower = log_sum_exp(&logs);
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if upper - lower <= tol {
            let capacity = mutual_information(&q, w)?;
            return Ok(DmcCapacity {
                capacity,
                input: q,
                iterations: it,
            });
        }
        let plain = step(&q, &d, 1.0);
        q = if mu > 1.0 {
            let fast = step(&q, &d, mu);
            if mutual_information(&fast, w)? > mutual_information(&plain, w)? {
                mu *= 2.0;
                fast
            } else {
                mu = (mu / 4.0).max(1.0);
                plain
            }
        } else {
            mu = 2.0;
            plain
        };
    }
    Err(Error::NonConvergence {
        what: "Blahut-Arimoto",
        iterations: BA_MAX_ITER,
    })
}

/// Closed-form capacity of the Z-channel that flips `1 -> 0` with probability `eps`.
pub fn z_channel_capacity(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(domain(format!("crossover must lie in [0, 1], got {eps}")));
    }
    if eps == 1.0 {
        return Ok(0.0);
    }
    if eps == 0.0 {
        return Ok(std::f64::consts::LN_2);
    }
    Ok(((1.0 - eps) * (eps.ln() * eps / (1.0 - eps)).exp()).ln_1p())
}

/// Inputs {off, on}, outputs {no click, click}, for a vacuum "off" symbol.
pub fn oop_channel(pulse: &PhotonDist) -> TransitionMatrix {
    let q0 = pulse.get(0);
    TransitionMatrix {
        rows: vec![vec![1.0, 0.0], vec![q0, 1.0 - q0]],
    }
}

fn no_click_row(received: &Signal, d: &PhotonDist) -> Vec<f64> {
    let c = click_probability(received, d);
    vec![1.0 - c, c]
}

/// Shannon rate of one mode used as an on/off channel with a click detector.
fn oop_eval(ctx: &Ctx, p: f64, pulse: &Signal) -> Result<Eval> {
    let (off, d_off) = ctx.output(&Signal::vacuum())?;
    let (on, d_on) = ctx.output(pulse)?;
    let w = TransitionMatrix::new(vec![no_click_row(&off, &d_off), no_click_row(&on, &d_on)])?;
    Ok(Eval {
        rate: mutual_information(&[1.0 - p, p], &w)?,
        cutoff: d_on.cutoff().max(d_off.cutoff()),
        tail: d_on.tail_mass().max(d_off.tail_mass()),
    })
}

pub(crate) fn oop_opt(ctx: &Ctx, e: f64, enc: BinaryEncoding) -> Result<RateResult> {
    let m = ctx.m();
    let single = Ctx {
        channel: ctx.channel.with_modes(1)?,
        policy: ctx.policy,
    };
    let mut res = binary_opt(&single, e / m as f64, enc, oop_eval)?;
    res.rate *= m as f64;
    Ok(res)
}

/// Independent on/off keying of each of the `m` modes with per-mode energy
/// `e / m`, read out by click detectors.
pub fn oop_rate(m: usize, e: f64, encoding: BinaryEncoding, policy: &TruncationPolicy) -> Result<RateResult> {
    oop_opt(&Ctx::lossless(m, policy)?, e, encoding)
}
