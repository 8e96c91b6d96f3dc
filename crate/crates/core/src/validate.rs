//! Self-checks behind `phaserate validate` and the acceptance tests. Each
//! check reports the worst deviation it measured next to its tolerance.

use std::fmt;
use std::str::FromStr;

use crate::channels::{dephase_oracle_holevo, fock_amplitudes, loss_kraus_oracle, ChannelSpec};
use crate::classical::{dmc_capacity, mutual_information, oop_channel};
use crate::distributions::{gaussian_single_mode, squeezed_coherent, thermal_total, Signal, SqueezedCoherentParams};
use crate::error::{domain, Error, Result};
use crate::numerics::TruncationPolicy;
use crate::optimize::{maximize_1d, SearchSpec};
use crate::par;
use crate::rates::{
    capacity, coherent_upper_bound, covariant_holevo, fock_truncated_rate, gamma_poisson_mixture,
    gamma_thermal_coherent_rate, phase_ref_rate, rate_with_loss, room_coherent_opt, room_rate, room_squeezed_opt,
    ternary_rate_opt, Ensemble, PulseShape, RefKind, Scheme, TernaryEncoding,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Oracles,
    Identities,
    Bounds,
    All,
}

impl Suite {
    /// Check ids belonging to the suite.
    pub fn members(self) -> Vec<u8> {
        match self {
            Suite::Oracles => vec![8, 10],
            Suite::Identities => vec![1, 2, 6, 7, 9],
            Suite::Bounds => vec![3, 4, 5, 11, 12, 13],
            Suite::All => (1..=CHECK_COUNT).collect(),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracles" => Ok(Suite::Oracles),
            "identities" => Ok(Suite::Identities),
            "bounds" => Ok(Suite::Bounds),
            "all" => Ok(Suite::All),
            _ => Err(domain(format!("unknown suite '{s}'"))),
        }
    }
}

pub const CHECK_COUNT: u8 = 13;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Worst measured value of the checked quantity; its meaning is in `detail`.
    pub measured: f64,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<28} measured={:.3e}  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.detail
        )
    }
}

fn check(id: u8, name: &'static str, passed: bool, measured: f64, detail: String) -> Check {
    Check {
        id,
        name,
        passed,
        measured,
        detail,
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

fn pulse(r: f64, s: f64) -> Result<Signal> {
    Ok(if r == 0.0 {
        Signal::coherent_with_energy(s)
    } else {
        Signal::SqueezedCoherent(SqueezedCoherentParams::from_energy(r, s)?)
    })
}

/// Runs check `id` (1..=13).
pub fn run_check(id: u8, policy: &TruncationPolicy) -> Result<Check> {
    match id {
        1 => capacity_identity(policy),
        2 => room_equals_oop(policy),
        3 => sandwich(policy),
        4 => squeezing_advantage(policy),
        5 => ternary_squeezing(policy),
        6 => gamma_mixture(),
        7 => loss_rescaling(policy),
        8 => gaussian_triple(),
        9 => fock_saturation(),
        10 => oracle_equivalence(policy),
        11 => high_energy_slope(policy),
        12 => phase_reference(policy),
        13 => low_energy_trend(policy),
        _ => Err(domain(format!("no check with id {id}"))),
    }
}

/// Runs a suite; a check that errors is reported as failed.
pub fn run_suite(suite: Suite, policy: &TruncationPolicy) -> Vec<Check> {
    suite
        .members()
        .into_iter()
        .map(|id| {
            run_check(id, policy).unwrap_or_else(|e| check(id, "error", false, f64::NAN, e.to_string()))
        })
        .collect()
}

fn capacity_identity(policy: &TruncationPolicy) -> Result<Check> {
    let mut dev = 0.0f64;
    for m in [1, 2, 4] {
        for e in [0.5, 1.0, 2.0] {
            let th = thermal_total(m, e, policy)?;
            let z: f64 = th.probs().iter().sum();
            let items = th.probs().iter().enumerate().map(|(n, p)| (p / z, Signal::fock(n))).collect();
            let ens = Ensemble::new(items, policy)?;
            dev = dev.max((covariant_holevo(&ens, m)? - capacity(m, e)?).abs());
        }
    }
    Ok(check(1, "capacity identity", dev <= 1e-9, dev, "max |holevo - m g(E/m)|, tol 1e-9".into()))
}

fn room_equals_oop(policy: &TruncationPolicy) -> Result<Check> {
    let mut cases = vec![];
    for e in log_grid(0.01, 2.0, 5) {
        for r in [0.0f64, 0.3, 0.6] {
            let p_max = if r == 0.0 { 1.0 } else { (e / r.sinh().powi(2)).min(1.0) };
            for k in [0.1, 0.3, 0.5, 0.7, 0.9] {
                cases.push((e, p_max * k, r));
            }
        }
    }
    let devs = par::map(&cases, |&(e, p, r)| -> Result<(f64, f64)> {
        let s = e / p;
        let q = pulse(r, s)?.photon_dist(policy)?;
        let w = oop_channel(&q);
        // pointwise: same input law on both sides
        let matched = (room_rate(1, e, p, r, PulseShape::SingleMode, policy)? - mutual_information(&[1.0 - p, p], &w)?).abs();
        // optimized: ROOM over the on-probability for this pulse vs the channel capacity
        let best = maximize_1d(
            |pp| room_rate(1, pp * s, pp, r, PulseShape::SingleMode, policy).unwrap_or(f64::NEG_INFINITY),
            &SearchSpec::new(vec![(1e-9, 1.0)]).with_refine_tol(1e-9),
        )?;
        let cap = dmc_capacity(&w, 1e-13)?.capacity;
        Ok((matched, (best.value - cap).abs()))
    });
    let devs = devs.into_iter().collect::<Result<Vec<_>>>()?;
    let matched = worst(devs.iter().map(|d| d.0));
    let optimized = worst(devs.iter().map(|d| d.1));
    let dev = matched.max(optimized);
    Ok(check(
        2,
        "ROOM = OOP at m=1",
        dev <= 1e-10,
        dev,
        format!("{} points; matched-p {matched:.2e}, optimized-p {optimized:.2e}; tol 1e-10", cases.len()),
    ))
}

fn sandwich(policy: &TruncationPolicy) -> Result<Check> {
    let cases: Vec<(usize, f64)> = [1, 2, 4]
        .into_iter()
        .flat_map(|m| log_grid(1e-3, 100.0, 25).into_iter().map(move |e| (m, e)))
        .collect();
    let gaps = par::map(&cases, |&(m, e)| -> Result<f64> {
        Ok(room_coherent_opt(m, e, policy)?.rate - coherent_upper_bound(m, e, policy)?)
    });
    let gaps = gaps.into_iter().collect::<Result<Vec<_>>>()?;
    let max_gap = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(check(
        3,
        "bound sandwich",
        max_gap <= 0.0,
        max_gap,
        format!("max(room - upper) over {} points, must be <= 0", cases.len()),
    ))
}

fn squeezing_advantage(policy: &TruncationPolicy) -> Result<Check> {
    let grid = log_grid(0.01, 1.0, 41);
    let diffs = par::map(&grid, |&e| -> Result<f64> {
        Ok(room_squeezed_opt(1, e, policy)?.rate - coherent_upper_bound(1, e, policy)?)
    });
    let diffs = diffs.into_iter().collect::<Result<Vec<_>>>()?;
    let above: Vec<f64> = grid.iter().zip(&diffs).filter(|(_, d)| **d > 0.0).map(|(e, _)| *e).collect();
    let best = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let detail = match (above.first(), above.last()) {
        (Some(lo), Some(hi)) => format!("squeezed ROOM beats the coherent bound for E in [{lo:.4}, {hi:.4}]"),
        _ => "no energy with an advantage".into(),
    };
    Ok(check(4, "squeezing advantage", !above.is_empty(), best, detail))
}

fn largest_squeezing(res: &crate::rates::RateResult) -> f64 {
    [("q1", "r1"), ("q2", "r2")]
        .iter()
        .filter(|(q, _)| res.param(q).unwrap_or(0.0) > 1e-6)
        .map(|(_, r)| res.param(r).unwrap_or(0.0).abs())
        .fold(0.0, f64::max)
}

fn ternary_squeezing(policy: &TruncationPolicy) -> Result<Check> {
    let cases = [(1.1, 0.55, 0.70), (2.0, 0.60, 0.76)];
    let rs = par::map(&cases, |&(e, _, _)| -> Result<f64> {
        Ok(largest_squeezing(&ternary_rate_opt(1, e, TernaryEncoding::Squeezed, policy)?))
    });
    let rs = rs.into_iter().collect::<Result<Vec<_>>>()?;
    let ok = cases.iter().zip(&rs).all(|((_, lo, hi), r)| r >= lo && r <= hi);
    let db = |r: f64| 20.0 * r / std::f64::consts::LN_10;
    Ok(check(
        5,
        "ternary squeezing",
        ok,
        rs[1],
        format!(
            "largest r = {:.4} ({:.2} dB) at E=1.1 in [0.55, 0.70]; {:.4} ({:.2} dB) at E=2 in [0.60, 0.76]",
            rs[0],
            db(rs[0]),
            rs[1],
            db(rs[1])
        ),
    ))
}

fn gamma_mixture() -> Result<Check> {
    let mix = gamma_poisson_mixture(2, 4.0, 40)?;
    let th = thermal_total(2, 4.0, &TruncationPolicy::default())?;
    let dev = worst(mix.iter().enumerate().map(|(n, v)| (v - th.get(n)).abs()));
    Ok(check(6, "Gamma-Poisson = thermal", dev <= 1e-8, dev, "max over n <= 40, tol 1e-8".into()))
}

fn loss_rescaling(policy: &TruncationPolicy) -> Result<Check> {
    let ch = ChannelSpec::new(1, 0.8, 0.0)?;
    let mut dev = 0.0f64;
    for e in [0.5, 1.0, 2.0] {
        let lossy = rate_with_loss(&Scheme::RoomCoherent, &ch, e, policy)?.rate;
        dev = dev.max((lossy - room_coherent_opt(1, 0.8 * e, policy)?.rate).abs());
    }
    Ok(check(7, "loss rescaling", dev <= 1e-9, dev, "eta = 0.8 vs lossless at 0.8E, tol 1e-9".into()))
}

fn gaussian_triple() -> Result<Check> {
    const N: usize = 60;
    let policy = TruncationPolicy::default();
    let diff = |a: &crate::distributions::PhotonDist, b: &crate::distributions::PhotonDist| {
        worst((0..=N).map(|n| (a.get(n) - b.get(n)).abs()))
    };
    let mut dev = 0.0f64;
    for r in [0.3, 0.6] {
        for alpha in [0.0, 1.0] {
            let sq = SqueezedCoherentParams::new(r, alpha)?;
            dev = dev.max(diff(&gaussian_single_mode(sq.to_gaussian(), &policy)?, &squeezed_coherent(sq, &policy)?));
            let amps = fock_amplitudes(&Signal::SqueezedCoherent(sq), &policy)?;
            for eta in [0.5, 0.8, 0.9] {
                let g = gaussian_single_mode(sq.to_gaussian().attenuate(eta, 0.0), &policy)?;
                dev = dev.max(diff(&g, &loss_kraus_oracle(&amps, eta)?));
            }
        }
    }
    Ok(check(8, "Gaussian/Hermite/Kraus", dev <= 1e-8, dev, format!("elementwise n <= {N}, tol 1e-8")))
}

fn fock_saturation() -> Result<Check> {
    let d1 = (fock_truncated_rate(1, 10.0)?.rate - 2f64.ln()).abs();
    let d2 = (fock_truncated_rate(2, 10.0)?.rate - 3f64.ln()).abs();
    let dev = d1.max(d2);
    Ok(check(9, "Fock saturation", dev <= 1e-6, dev, "t=1 vs ln 2, t=2 vs ln 3, tol 1e-6".into()))
}

fn oracle_equivalence(policy: &TruncationPolicy) -> Result<Check> {
    let mut dev = 0.0f64;
    for e in [0.1, 1.0] {
        let ensembles: Vec<Vec<(f64, Signal)>> = vec![
            vec![(0.7, Signal::vacuum()), (0.3, pulse(0.0, e / 0.3)?)],
            vec![(0.7, Signal::vacuum()), (0.3, pulse(0.3, e / 0.3)?)],
            vec![
                (0.7, Signal::vacuum()),
                (0.2, pulse(0.2, 0.6 * e / 0.2)?),
                (0.1, pulse(0.4, 0.4 * e / 0.1)?),
            ],
        ];
        for items in ensembles {
            let cov = covariant_holevo(&Ensemble::new(items.clone(), policy)?, 1)?;
            dev = dev.max((cov - dephase_oracle_holevo(&items, policy)?).abs());
        }
    }
    Ok(check(10, "m=1 oracle equivalence", dev <= 1e-9, dev, "binary/ternary ensembles, tol 1e-9".into()))
}

fn high_energy_slope(policy: &TruncationPolicy) -> Result<Check> {
    let mut slopes = vec![];
    for m in [1usize, 2] {
        let hi = gamma_thermal_coherent_rate(m, 1000.0, policy)?;
        let lo = gamma_thermal_coherent_rate(m, 100.0, policy)?;
        slopes.push((hi - lo) / std::f64::consts::LN_10);
    }
    let dev = worst(slopes.iter().enumerate().map(|(i, s)| (s - (i as f64 + 0.5)).abs()));
    Ok(check(
        11,
        "high-energy slope",
        dev <= 0.05,
        dev,
        format!("slopes m=1: {:.4}, m=2: {:.4}; want m - 1/2 within 0.05", slopes[0], slopes[1]),
    ))
}

fn phase_reference(policy: &TruncationPolicy) -> Result<Check> {
    let xs: Vec<f64> = (1..=19).map(|k| 0.05 * k as f64).collect();
    let rates = par::map(&xs, |&x| phase_ref_rate(2, 100.0, x, RefKind::TruncatedPhase, policy));
    let rates = rates.into_iter().collect::<Result<Vec<_>>>()?;
    let (best_x, best) = xs
        .iter()
        .zip(&rates)
        .fold((0.0, f64::NEG_INFINITY), |acc, (&x, &r)| if r > acc.1 { (x, r) } else { acc });
    let gamma = gamma_thermal_coherent_rate(2, 100.0, policy)?;
    Ok(check(
        12,
        "phase reference loses",
        best < gamma,
        best - gamma,
        format!("best reference rate {best:.6} at x = {best_x:.2} vs Gamma-thermal {gamma:.6}"),
    ))
}

fn low_energy_trend(policy: &TruncationPolicy) -> Result<Check> {
    let es = [1e-3, 1e-4, 1e-5, 1e-6];
    let ratios = par::map(&es, |&e| -> Result<f64> { Ok(room_coherent_opt(1, e, policy)?.rate / (e * (1.0 / e).ln())) });
    let ratios = ratios.into_iter().collect::<Result<Vec<_>>>()?;
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let in_band = ratios.iter().all(|&r| (0.6..=1.0).contains(&r));
    Ok(check(
        13,
        "low-energy trend",
        increasing && in_band,
        ratios[ratios.len() - 1],
        format!("rate / (E ln 1/E) = {ratios:.4?}; increasing, each in [0.6, 1.0]"),
    ))
}
