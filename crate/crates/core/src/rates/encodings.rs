use crate::channels::{degeneracy_weighted_sum, ChannelSpec};
use crate::distributions::{
    apply_loss, truncated_thermal, PhotonDist, Signal, SqueezedCoherentParams,
};
use crate::error::{domain, Error, Result};
use crate::numerics::{h, xlogx_one_minus, NeumaierSum, TruncationPolicy};
use crate::optimize::{maximize_1d, maximize_nd, Optimum, SearchSpec};

use super::{holevo_of_dists, Diagnostics, RateResult};

/// Largest squeezing the optimizers explore.
const R_CAP: f64 = 2.5;

/// Channel plus truncation settings shared by every objective evaluation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ctx<'a> {
    pub channel: ChannelSpec,
    pub policy: &'a TruncationPolicy,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Eval {
    pub rate: f64,
    pub cutoff: usize,
    pub tail: f64,
}

impl Eval {
    fn merge(rate: f64, dists: &[&PhotonDist]) -> Self {
        Self {
            rate,
            cutoff: dists.iter().map(|d| d.cutoff()).max().unwrap_or(0),
            tail: dists.iter().map(|d| d.tail_mass()).fold(0.0, f64::max),
        }
    }
}

impl<'a> Ctx<'a> {
    pub fn lossless(m: usize, policy: &'a TruncationPolicy) -> Result<Self> {
        Ok(Self {
            channel: ChannelSpec::lossless(m)?,
            policy,
        })
    }

    pub fn m(&self) -> usize {
        self.channel.m()
    }

    /// Received signal and its photon-number law.
    pub fn output(&self, s: &Signal) -> Result<(Signal, PhotonDist)> {
        let out = apply_loss(s, self.channel.eta(), self.channel.n_th())?;
        let d = out.photon_dist(self.policy)?;
        Ok((out, d))
    }

    /// Covariant Holevo rate of an ensemble of transmitted signals.
    pub fn covariant(&self, items: &[(f64, Signal)]) -> Result<Eval> {
        let m = self.m();
        let vacuum_stays = self.channel.n_th() == 0.0;
        if vacuum_stays && items.len() == 2 && items[0].1 == Signal::vacuum() {
            let p = items[1].0;
            let (out, q) = self.output(&items[1].1)?;
            let c = click_probability(&out, &q);
            let rate = room_closed_form(m, p, &q, c);
            return Ok(Eval::merge(rate, &[&q]));
        }
        let mut dists = Vec::with_capacity(items.len());
        for (w, s) in items {
            if *w == 0.0 {
                continue;
            }
            let (out, d) = self.output(s)?;
            if !out.has_rank_one_blocks() {
                return Err(Error::BlockEntropy(format!("{out:?}")));
            }
            dists.push((*w, d));
        }
        let parts: Vec<(f64, &PhotonDist)> = dists.iter().map(|(w, d)| (*w, d)).collect();
        let rate = holevo_of_dists(&parts, m);
        let refs: Vec<&PhotonDist> = dists.iter().map(|(_, d)| d).collect();
        Ok(Eval::merge(rate, &refs))
    }
}

/// `1 - Q(0)`, without cancellation for weak coherent pulses.
pub(crate) fn click_probability(received: &Signal, q: &PhotonDist) -> f64 {
    match received {
        Signal::Coherent { alpha } => -(-alpha * alpha).exp_m1(),
        _ => q.probs()[1..].iter().copied().collect::<NeumaierSum>().value(),
    }
}

/// Two-symbol covariant rate with the vacuum as the off symbol.
fn room_closed_form(m: usize, p: f64, q: &PhotonDist, click: f64) -> f64 {
    let q0 = q.get(0);
    let degeneracy = if m > 1 { p * degeneracy_weighted_sum(q, m) } else { 0.0 };
    degeneracy + xlogx_one_minus(p * click) + click * h(p) - p * h(q0)
}

/// How a ROOM pulse is distributed over the `m` modes before the random
/// interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseShape {
    /// All energy in one mode.
    SingleMode,
    /// Identical pulses on every mode.
    Spread,
}

fn single_pulse(r: f64, s: f64) -> Result<Signal> {
    if r == 0.0 {
        return Ok(Signal::coherent_with_energy(s));
    }
    Ok(Signal::SqueezedCoherent(SqueezedCoherentParams::from_energy(r, s)?))
}

fn shaped_pulse(shape: PulseShape, m: usize, r: f64, s: f64) -> Result<Signal> {
    match shape {
        PulseShape::SingleMode => single_pulse(r, s),
        PulseShape::Spread => {
            let one = single_pulse(r, s / m as f64)?;
            Ok(if m == 1 { one } else { Signal::Product(vec![one; m]) })
        }
    }
}

/// Rate of sending the vacuum with probability `1 - p` and a pulse of
/// energy `e / p` and squeezing `r` otherwise.
pub fn room_rate(m: usize, e: f64, p: f64, r: f64, shape: PulseShape, policy: &TruncationPolicy) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(domain(format!("on-probability must lie in (0, 1], got {p}")));
    }
    if !(e >= 0.0) || !e.is_finite() {
        return Err(domain(format!("energy must be finite and >= 0, got {e}")));
    }
    let ctx = Ctx::lossless(m, policy)?;
    let pulse = shaped_pulse(shape, m, r, e / p)?;
    Ok(ctx.covariant(&[(1.0 - p, Signal::vacuum()), (p, pulse)])?.rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
/// Pulse family of a two-symbol on/off encoding.
pub enum BinaryEncoding {
    Coherent,
    Squeezed,
}

fn pulse_cap(e: f64) -> f64 {
    50.0 * e.max(1.0)
}

fn max_squeezing(s: f64) -> f64 {
    s.sqrt().asinh().min(R_CAP)
}

fn require_energy(e: f64) -> Result<()> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(domain(format!("energy must be finite and > 0, got {e}")));
    }
    Ok(())
}

fn diagnostics(opt: &Optimum, eval: Option<Eval>) -> Diagnostics {
    Diagnostics {
        truncation_n: eval.map_or(0, |e| e.cutoff),
        tail_mass: eval.map_or(0.0, |e| e.tail),
        iterations: opt.iterations,
        converged: opt.converged,
    }
}

fn squeeze_db(r: f64) -> f64 {
    20.0 * r / std::f64::consts::LN_10
}

/// On/off encodings with a single pulse shape; `eval` turns
/// `(p, transmitted pulse)` into a rate.
pub(crate) fn binary_opt<F>(ctx: &Ctx, e: f64, enc: BinaryEncoding, eval: F) -> Result<RateResult>
where
    F: Fn(&Ctx, f64, &Signal) -> Result<Eval> + Sync + Send,
{
    require_energy(e)?;
    let lo = (e / pulse_cap(e)).ln().min(0.0);
    let coherent_at = |u: f64| -> Result<Eval> {
        let p = u.exp().min(1.0);
        eval(ctx, p, &Signal::coherent_with_energy(e / p))
    };
    let coh = maximize_1d(
        |u| coherent_at(u).map_or(f64::NEG_INFINITY, |v| v.rate),
        &SearchSpec::new(vec![(lo, 0.0)]),
    )?;
    let u_coh = coh.argmax[0];
    if enc == BinaryEncoding::Coherent {
        let p = u_coh.exp().min(1.0);
        let ev = coherent_at(u_coh).ok();
        return Ok(RateResult {
            rate: coh.value,
            optimal_params: vec![("p".into(), p), ("s".into(), e / p), ("alpha".into(), (e / p).sqrt())],
            diagnostics: diagnostics(&coh, ev),
        });
    }
    let squeezed_at = |x: &[f64]| -> Result<(Eval, f64, f64, SqueezedCoherentParams)> {
        let p = x[0].exp().min(1.0);
        let s = e / p;
        let r = x[1] * max_squeezing(s);
        let prm = SqueezedCoherentParams::from_energy(r, s)?;
        let pulse = if r == 0.0 {
            Signal::coherent_with_energy(s)
        } else {
            Signal::SqueezedCoherent(prm)
        };
        Ok((eval(ctx, p, &pulse)?, p, s, prm))
    };
    let spec = SearchSpec::new(vec![(lo, 0.0), (0.0, 1.0)]).with_seed(vec![u_coh, 0.0]);
    let opt = maximize_nd(
        |x| squeezed_at(x).map_or(f64::NEG_INFINITY, |v| v.0.rate),
        &spec,
    )?;
    let (ev, p, s, prm) = squeezed_at(&opt.argmax)?;
    Ok(RateResult {
        rate: opt.value,
        optimal_params: vec![
            ("p".into(), p),
            ("s".into(), s),
            ("r".into(), prm.r),
            ("alpha".into(), prm.alpha),
            ("r_db".into(), squeeze_db(prm.r)),
        ],
        diagnostics: diagnostics(&opt, Some(ev)),
    })
}

fn room_eval(ctx: &Ctx, p: f64, pulse: &Signal) -> Result<Eval> {
    ctx.covariant(&[(1.0 - p, Signal::vacuum()), (p, pulse.clone())])
}

pub(crate) fn room_opt(ctx: &Ctx, e: f64, enc: BinaryEncoding) -> Result<RateResult> {
    binary_opt(ctx, e, enc, room_eval)
}

/// Best coherent ROOM rate over the on-probability.
pub fn room_coherent_opt(m: usize, e: f64, policy: &TruncationPolicy) -> Result<RateResult> {
    room_opt(&Ctx::lossless(m, policy)?, e, BinaryEncoding::Coherent)
}

/// Best squeezed ROOM rate over the on-probability and squeezing, with all
/// pulse energy in one mode.
pub fn room_squeezed_opt(m: usize, e: f64, policy: &TruncationPolicy) -> Result<RateResult> {
    room_opt(&Ctx::lossless(m, policy)?, e, BinaryEncoding::Squeezed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TernaryEncoding {
    Coherent,
    Squeezed,
    Fock,
}

/// Weights and energies of the two pulses from `(ln w, λ, φ)`: `w` is the
/// total pulse probability, `λ` splits it, `φ` splits the energy budget.
fn split_pulses(e: f64, x: &[f64]) -> Option<[(f64, f64); 2]> {
    let w = x[0].exp().min(1.0);
    let (lam, phi) = (x[1], x[2]);
    let cap = 4.0 * pulse_cap(e);
    let mut out = [(0.0, 0.0); 2];
    for (slot, (q, share)) in out.iter_mut().zip([(w * lam, phi), (w * (1.0 - lam), 1.0 - phi)]) {
        let energy = share * e;
        if q <= 0.0 {
            if energy > 0.0 {
                return None;
            }
            continue;
        }
        let s = energy / q;
        if s > cap {
            return None;
        }
        *slot = (q, s);
    }
    Some(out)
}

/// Weighted transmitted signals.
type Items = Vec<(f64, Signal)>;

fn ternary_items(e: f64, x: &[f64], squeezed: bool) -> Result<(Items, [f64; 2])> {
    let pulses = split_pulses(e, x).ok_or_else(|| domain("pulse energy out of range"))?;
    let w: f64 = pulses.iter().map(|p| p.0).sum();
    let mut items = vec![(1.0 - w, Signal::vacuum())];
    let mut rs = [0.0; 2];
    for (k, &(q, s)) in pulses.iter().enumerate() {
        let r = if squeezed { x[3 + k] * max_squeezing(s) } else { 0.0 };
        rs[k] = r;
        items.push((q, single_pulse(r, s)?));
    }
    Ok((items, rs))
}

pub(crate) fn ternary_opt(ctx: &Ctx, e: f64, enc: TernaryEncoding) -> Result<RateResult> {
    require_energy(e)?;
    if enc == TernaryEncoding::Fock {
        return ternary_fock_opt(ctx, e);
    }
    let squeezed = enc == TernaryEncoding::Squeezed;
    let lo = (e / pulse_cap(e)).ln().min(0.0);
    let coh = room_opt(ctx, e, BinaryEncoding::Coherent)?;
    let u_coh = coh.param("p").unwrap().ln();
    let mut bounds = vec![(lo, 0.0), (0.0, 1.0), (0.0, 1.0)];
    let mut spec;
    if squeezed {
        bounds.extend([(0.0, 1.0), (0.0, 1.0)]);
        let sq = room_opt(ctx, e, BinaryEncoding::Squeezed)?;
        let p = sq.param("p").unwrap();
        let f = sq.param("r").unwrap() / max_squeezing(e / p);
        spec = SearchSpec::new(bounds)
            .with_seed(vec![p.ln(), 0.5, 0.5, f, f])
            .with_seed(vec![u_coh, 0.5, 0.5, 0.0, 0.0]);
    } else {
        spec = SearchSpec::new(bounds).with_seed(vec![u_coh, 0.5, 0.5]);
    }
    spec.refine_tol = 1e-7;
    let objective = |x: &[f64]| -> Result<Eval> {
        let (items, _) = ternary_items(e, x, squeezed)?;
        ctx.covariant(&items)
    };
    let opt = maximize_nd(|x| objective(x).map_or(f64::NEG_INFINITY, |v| v.rate), &spec)?;
    let ev = objective(&opt.argmax).ok();
    let (items, rs) = ternary_items(e, &opt.argmax, squeezed)?;
    let pulses = split_pulses(e, &opt.argmax).unwrap();
    let mut params = vec![];
    for k in 0..2 {
        let idx = k + 1;
        params.push((format!("q{idx}"), items[idx].0));
        params.push((format!("s{idx}"), pulses[k].1));
        if squeezed {
            params.push((format!("r{idx}"), rs[k]));
        }
    }
    Ok(RateResult {
        rate: opt.value,
        optimal_params: params,
        diagnostics: diagnostics(&opt, ev),
    })
}

fn ternary_fock_opt(ctx: &Ctx, e: f64) -> Result<RateResult> {
    let weights = |x: &[f64]| {
        let lam = x[1];
        let w = x[0] * (e / (2.0 - lam)).min(1.0);
        (w * lam, w * (1.0 - lam))
    };
    let objective = |x: &[f64]| -> Result<Eval> {
        let (q1, q2) = weights(x);
        ctx.covariant(&[
            (1.0 - q1 - q2, Signal::vacuum()),
            (q1, Signal::fock(1)),
            (q2, Signal::fock(2)),
        ])
    };
    let m = ctx.m() as f64;
    let binary_q = (m / (m + 1.0)).min(e);
    let spec = SearchSpec::new(vec![(0.0, 1.0), (0.0, 1.0)]).with_seed(vec![binary_q / e.min(1.0), 1.0]);
    let opt = maximize_nd(|x| objective(x).map_or(f64::NEG_INFINITY, |v| v.rate), &spec)?;
    let (q1, q2) = weights(&opt.argmax);
    Ok(RateResult {
        rate: opt.value,
        optimal_params: vec![("q1".into(), q1), ("q2".into(), q2)],
        diagnostics: diagnostics(&opt, objective(&opt.argmax).ok()),
    })
}

/// Best ternary rate: vacuum plus two pulses, or Fock states `{0, 1, 2}`.
pub fn ternary_rate_opt(m: usize, e: f64, encoding: TernaryEncoding, policy: &TruncationPolicy) -> Result<RateResult> {
    ternary_opt(&Ctx::lossless(m, policy)?, e, encoding)
}

pub(crate) fn fock_truncated_opt(ctx: &Ctx, t: usize, e: f64) -> Result<RateResult> {
    if t == 0 {
        return Err(domain("photon-number cutoff must be at least 1"));
    }
    require_energy(e)?;
    let hi = e.min(t as f64);
    let objective = |s: f64| -> Result<Eval> {
        let d = truncated_thermal(s, t)?;
        let items: Vec<(f64, Signal)> = d.probs().iter().enumerate().map(|(n, &p)| (p, Signal::fock(n))).collect();
        ctx.covariant(&items)
    };
    let opt = maximize_1d(
        |s| objective(s).map_or(f64::NEG_INFINITY, |v| v.rate),
        &SearchSpec::new(vec![(0.0, hi)]),
    )?;
    Ok(RateResult {
        rate: opt.value,
        optimal_params: vec![("s".into(), opt.argmax[0])],
        diagnostics: diagnostics(&opt, objective(opt.argmax[0]).ok()),
    })
}

/// Rate of Fock encodings confined to `0..=t` photons at mean energy `<= e`.
pub fn fock_truncated_rate(t: usize, e: f64) -> Result<RateResult> {
    let policy = TruncationPolicy::default();
    fock_truncated_opt(&Ctx::lossless(1, &policy)?, t, e)
}
