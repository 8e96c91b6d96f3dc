//! Grids of rate evaluations, one record per (scheme, energy).

use serde::Serialize;

use crate::channels::ChannelSpec;
use crate::error::{domain, Result};
use crate::numerics::{thermal_entropy_g, TruncationPolicy};
use crate::par;
use crate::rates::{rate_with_loss, RateResult, Scheme};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRecord {
    pub energy: f64,
    pub m: usize,
    pub eta: f64,
    pub n_th: f64,
    pub scheme: String,
    pub rate_nats: f64,
    /// Rate divided by the lossless capacity at the same energy.
    pub rate_over_capacity: f64,
    pub params: Vec<(String, f64)>,
    pub truncation_n: usize,
    pub tail_mass: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RateRecord {
    pub fn new(scheme: &Scheme, channel: &ChannelSpec, energy: f64, result: Result<RateResult>) -> Self {
        let m = channel.m();
        let cap = m as f64 * thermal_entropy_g(energy / m as f64).unwrap_or(f64::NAN);
        let base = Self {
            energy,
            m,
            eta: channel.eta(),
            n_th: channel.n_th(),
            scheme: scheme.id(),
            rate_nats: f64::NAN,
            rate_over_capacity: f64::NAN,
            params: Vec::new(),
            truncation_n: 0,
            tail_mass: 0.0,
            converged: false,
            error: None,
        };
        match result {
            Ok(r) => Self {
                rate_nats: r.rate,
                rate_over_capacity: if cap > 0.0 { r.rate / cap } else { 0.0 },
                params: r.optimal_params,
                truncation_n: r.diagnostics.truncation_n,
                tail_mass: r.diagnostics.tail_mass,
                converged: r.diagnostics.converged,
                ..base
            },
            Err(e) => Self {
                error: Some(e.to_string()),
                ..base
            },
        }
    }
}

/// `points` energies from `min` to `max`, evenly spaced or log-spaced.
pub fn energy_grid(min: f64, max: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if !(min > 0.0) || !(max >= min) || !max.is_finite() {
        return Err(domain(format!("need 0 < min <= max, got [{min}, {max}]")));
    }
    if points < 2 {
        return Err(domain("an energy grid needs at least two points"));
    }
    let t = |i: usize| i as f64 / (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => min,
            i if i == points - 1 => max,
            i if log => (min.ln() + (max.ln() - min.ln()) * t(i)).exp(),
            i => min + (max - min) * t(i),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub schemes: Vec<Scheme>,
    pub channel: ChannelSpec,
    pub energies: Vec<f64>,
    pub policy: TruncationPolicy,
}

/// Evaluates every (scheme, energy) pair; records come back ordered by scheme
/// and then energy however the work was scheduled.
pub fn sweep(req: &SweepRequest) -> Result<Vec<RateRecord>> {
    if req.schemes.is_empty() {
        return Err(domain("no schemes requested"));
    }
    if req.energies.iter().any(|&e| !(e > 0.0)) {
        return Err(domain("energies must be positive"));
    }
    let cases: Vec<(Scheme, f64)> = req
        .schemes
        .iter()
        .flat_map(|s| req.energies.iter().map(move |&e| (*s, e)))
        .collect();
    Ok(par::map(&cases, |(s, e)| {
        RateRecord::new(s, &req.channel, *e, rate_with_loss(s, &req.channel, *e, &req.policy))
    }))
}
