//! Settings from flags, an optional JSON file and built-in defaults, in that
//! order of precedence.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Deserialize;

use phaserate::channels::ChannelSpec;
use phaserate::numerics::TruncationPolicy;
use phaserate::rates::{RefKind, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefArg {
    TruncatedPhase,
    Coherent,
}

/// Flags shared by `rate` and `sweep`. Every field is optional so that a
/// config file can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Scheme id; `sweep` accepts a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub scheme: Vec<String>,
    /// Modes per channel use.
    #[arg(long)]
    pub m: Option<usize>,
    /// Transmissivity of the loss channel.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Thermal occupation of the environment.
    #[arg(long = "n-th")]
    pub n_th: Option<f64>,
    /// Report rates in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
    /// Tail mass allowed when truncating photon-number series.
    #[arg(long = "tail-eps")]
    pub tail_eps: Option<f64>,
    /// Energy fraction of the phase reference (phase-ref only; optimized if absent).
    #[arg(long)]
    pub x: Option<f64>,
    /// Phase reference state (phase-ref only).
    #[arg(long = "ref", value_enum)]
    pub reference: Option<RefArg>,
    /// Worker threads; 0 picks the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// JSON file with defaults for any of these settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub schemes: Option<Vec<String>>,
    pub m: Option<usize>,
    pub eta: Option<f64>,
    pub n_th: Option<f64>,
    pub bits: Option<bool>,
    pub tail_eps: Option<f64>,
    pub x: Option<f64>,
    #[serde(rename = "ref")]
    pub reference: Option<RefArg>,
    pub jobs: Option<usize>,
    pub energy: Option<f64>,
    pub emin: Option<f64>,
    pub emax: Option<f64>,
    pub points: Option<usize>,
    pub log: Option<bool>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Fully resolved settings shared by `rate` and `sweep`.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub schemes: Vec<Scheme>,
    pub channel: ChannelSpec,
    pub policy: TruncationPolicy,
    pub bits: bool,
    pub jobs: usize,
}

pub fn resolve(c: &Common, f: &FileConfig) -> Result<Resolved> {
    let ids = if c.scheme.is_empty() {
        f.schemes.clone().unwrap_or_default()
    } else {
        c.scheme.clone()
    };
    if ids.is_empty() {
        bail!("no scheme given (use --scheme)");
    }
    let x = c.x.or(f.x);
    let kind = match c.reference.or(f.reference).unwrap_or(RefArg::TruncatedPhase) {
        RefArg::TruncatedPhase => RefKind::TruncatedPhase,
        RefArg::Coherent => RefKind::Coherent,
    };
    let schemes = ids
        .iter()
        .map(|id| {
            let s: Scheme = id.trim().parse()?;
            Ok(match s {
                Scheme::PhaseRef { .. } => Scheme::PhaseRef { x, kind },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let channel = ChannelSpec::new(
        c.m.or(f.m).unwrap_or(1),
        c.eta.or(f.eta).unwrap_or(1.0),
        c.n_th.or(f.n_th).unwrap_or(0.0),
    )?;
    let mut policy = TruncationPolicy::default();
    if let Some(eps) = c.tail_eps.or(f.tail_eps) {
        policy = policy.with_tail_eps(eps)?;
    }
    Ok(Resolved {
        schemes,
        channel,
        policy,
        bits: c.bits || f.bits.unwrap_or(false),
        jobs: c.jobs.or(f.jobs).unwrap_or(0),
    })
}
