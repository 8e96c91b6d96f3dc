use std::fmt;
use std::str::FromStr;

use crate::channels::ChannelSpec;
use crate::classical::oop_opt;
use crate::error::{domain, Error, Result};
use crate::numerics::{thermal_entropy_g, TruncationPolicy};
use crate::optimize::{maximize_1d, SearchSpec};

use super::encodings::{fock_truncated_opt, room_opt, ternary_opt, BinaryEncoding, Ctx, TernaryEncoding};
use super::thermal::{gamma_thermal_coherent_rate, phase_ref_rate, RefKind};
use super::{capacity, coherent_upper_bound, low_energy_asymptotes, Diagnostics, RateResult};

/// Every rate or bound the sweep and CLI can evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Capacity,
    CoherentUpper,
    RoomCoherent,
    RoomSqueezed,
    Ternary(TernaryEncoding),
    Oop(BinaryEncoding),
    FockTruncated(usize),
    GammaThermal,
    /// `x = None` optimizes the reference fraction.
    PhaseRef { x: Option<f64>, kind: RefKind },
    /// Low-energy reference curves; the rate is the lower curve.
    Asymptotes,
}

impl Scheme {
    pub const ALL_IDS: [&'static str; 14] = [
        "capacity",
        "coherent-upper",
        "room-coherent",
        "room-squeezed",
        "ternary-coherent",
        "ternary-squeezed",
        "ternary-fock",
        "oop-coherent",
        "oop-squeezed",
        "fock-truncated-1",
        "fock-truncated-2",
        "gamma-thermal",
        "phase-ref",
        "asymptotes",
    ];

    pub fn id(&self) -> String {
        match self {
            Scheme::Capacity => "capacity".into(),
            Scheme::CoherentUpper => "coherent-upper".into(),
            Scheme::RoomCoherent => "room-coherent".into(),
            Scheme::RoomSqueezed => "room-squeezed".into(),
            Scheme::Ternary(TernaryEncoding::Coherent) => "ternary-coherent".into(),
            Scheme::Ternary(TernaryEncoding::Squeezed) => "ternary-squeezed".into(),
            Scheme::Ternary(TernaryEncoding::Fock) => "ternary-fock".into(),
            Scheme::Oop(BinaryEncoding::Coherent) => "oop-coherent".into(),
            Scheme::Oop(BinaryEncoding::Squeezed) => "oop-squeezed".into(),
            Scheme::FockTruncated(t) => format!("fock-truncated-{t}"),
            Scheme::GammaThermal => "gamma-thermal".into(),
            Scheme::PhaseRef { .. } => "phase-ref".into(),
            Scheme::Asymptotes => "asymptotes".into(),
        }
    }

    /// Reference curves are exempt from the capacity cap.
    pub fn is_asymptotic(&self) -> bool {
        matches!(self, Scheme::Asymptotes)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "capacity" => Scheme::Capacity,
            "coherent-upper" => Scheme::CoherentUpper,
            "room-coherent" => Scheme::RoomCoherent,
            "room-squeezed" => Scheme::RoomSqueezed,
            "ternary-coherent" => Scheme::Ternary(TernaryEncoding::Coherent),
            "ternary-squeezed" => Scheme::Ternary(TernaryEncoding::Squeezed),
            "ternary-fock" => Scheme::Ternary(TernaryEncoding::Fock),
            "oop-coherent" => Scheme::Oop(BinaryEncoding::Coherent),
            "oop-squeezed" => Scheme::Oop(BinaryEncoding::Squeezed),
            "gamma-thermal" => Scheme::GammaThermal,
            "phase-ref" => Scheme::PhaseRef {
                x: None,
                kind: RefKind::TruncatedPhase,
            },
            "asymptotes" => Scheme::Asymptotes,
            other => match other.strip_prefix("fock-truncated-").map(str::parse::<usize>) {
                Some(Ok(t)) if t >= 1 => Scheme::FockTruncated(t),
                _ => return Err(domain(format!("unknown scheme '{other}'"))),
            },
        })
    }
}

fn uses_fock(s: &Scheme) -> bool {
    matches!(s, Scheme::FockTruncated(_) | Scheme::Ternary(TernaryEncoding::Fock))
}

fn unsupported(s: &Scheme, what: &str) -> Error {
    Error::Unsupported(format!("{s} {what}"))
}

/// Evaluates `scheme` through `channel`. Optimization parameters and the
/// energy budget `e` refer to the transmitted ensemble.
pub fn rate_with_loss(scheme: &Scheme, channel: &ChannelSpec, e: f64, policy: &TruncationPolicy) -> Result<RateResult> {
    let m = channel.m();
    let (eta, n_th) = (channel.eta(), channel.n_th());
    let pure_loss = n_th == 0.0;
    if uses_fock(scheme) && !pure_loss {
        return Err(unsupported(scheme, "needs a zero-temperature environment"));
    }
    let ctx = Ctx {
        channel: *channel,
        policy,
    };
    match *scheme {
        Scheme::Capacity => {
            // thermal-loss bound per mode; phase noise can only lower it
            let mf = m as f64;
            let noise = (1.0 - eta) * n_th;
            let out = thermal_entropy_g(eta * e / mf + noise)? - thermal_entropy_g(noise)?;
            Ok(RateResult::exact(if eta == 1.0 { capacity(m, e)? } else { mf * out }))
        }
        Scheme::CoherentUpper if pure_loss => Ok(RateResult::exact(coherent_upper_bound(m, eta * e, policy)?)),
        Scheme::GammaThermal if pure_loss => Ok(RateResult::exact(gamma_thermal_coherent_rate(m, eta * e, policy)?)),
        Scheme::Asymptotes if pure_loss => {
            let (lo, hi) = low_energy_asymptotes(m, eta * e)?;
            let mut r = RateResult::exact(lo);
            r.optimal_params.push(("upper".into(), hi));
            Ok(r)
        }
        Scheme::CoherentUpper | Scheme::GammaThermal | Scheme::Asymptotes => {
            Err(unsupported(scheme, "needs a zero-temperature environment"))
        }
        Scheme::RoomCoherent => room_opt(&ctx, e, BinaryEncoding::Coherent),
        Scheme::RoomSqueezed => room_opt(&ctx, e, BinaryEncoding::Squeezed),
        Scheme::Ternary(enc) => ternary_opt(&ctx, e, enc),
        Scheme::Oop(enc) => oop_opt(&ctx, e, enc),
        Scheme::FockTruncated(t) => fock_truncated_opt(&ctx, t, e),
        Scheme::PhaseRef { x, kind } => {
            if !channel.is_lossless() {
                return Err(unsupported(scheme, "is only available without loss"));
            }
            match x {
                Some(x) => {
                    let mut r = RateResult::exact(phase_ref_rate(m, e, x, kind, policy)?);
                    r.optimal_params.push(("x".into(), x));
                    Ok(r)
                }
                None => {
                    let spec = SearchSpec::new(vec![(0.01, 0.99)]).with_grid_points(19);
                    let opt = maximize_1d(
                        |x| phase_ref_rate(m, e, x, kind, policy).unwrap_or(f64::NEG_INFINITY),
                        &spec,
                    )?;
                    Ok(RateResult {
                        rate: opt.value,
                        optimal_params: vec![("x".into(), opt.argmax[0])],
                        diagnostics: Diagnostics {
                            truncation_n: 0,
                            tail_mass: 0.0,
                            iterations: opt.iterations,
                            converged: opt.converged,
                        },
                    })
                }
            }
        }
    }
}
