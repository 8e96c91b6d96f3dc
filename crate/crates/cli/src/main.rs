use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use phaserate::par;
use phaserate::rates::rate_with_loss;
use phaserate::sweep::{energy_grid, sweep, RateRecord, SweepRequest};
use phaserate::validate::{run_suite, Suite};
use phaserate::Error;

mod config;
mod output;

use config::{resolve, Common, FileConfig, Format};

#[derive(Debug, Parser)]
#[command(name = "phaserate", version, about = "Communication rates over optical channels with phase noise")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate one scheme at one energy and print a JSON record.
    Rate {
        #[command(flatten)]
        common: Common,
        /// Mean photon number per channel use.
        #[arg(long)]
        energy: Option<f64>,
    },
    /// Evaluate schemes over an energy grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        emin: Option<f64>,
        #[arg(long)]
        emax: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Log-spaced grid.
        #[arg(long)]
        log: bool,
        /// Output file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run the built-in consistency checks.
    Validate {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long = "tail-eps")]
        tail_eps: Option<f64>,
    },
}

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICS: u8 = 3;

struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn usage(err: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        err: err.into(),
    }
}

fn io(err: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_IO,
        err: err.into(),
    }
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Domain(_) | Error::Infeasible(_) | Error::Unsupported(_) | Error::DimensionMismatch { .. }
    )
}

fn cmd_rate(common: &Common, energy: Option<f64>) -> std::result::Result<u8, Failure> {
    let file = FileConfig::load(common.config.as_deref()).map_err(usage)?;
    let set = resolve(common, &file).map_err(usage)?;
    let energy = energy.or(file.energy).ok_or_else(|| usage(anyhow!("--energy is required")))?;
    let [scheme] = set.schemes.as_slice() else {
        return Err(usage(anyhow!("rate takes exactly one scheme")));
    };
    let result = par::with_threads(set.jobs, || rate_with_loss(scheme, &set.channel, energy, &set.policy));
    if let Err(e) = &result {
        if is_usage_error(e) {
            return Err(usage(anyhow!("{e}")));
        }
    }
    let record = RateRecord::new(scheme, &set.channel, energy, result);
    println!("{}", output::json_record(&record, set.bits));
    Ok(if record.converged { 0 } else { EXIT_NUMERICS })
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    common: &Common,
    emin: Option<f64>,
    emax: Option<f64>,
    points: Option<usize>,
    log: bool,
    out: Option<PathBuf>,
    format: Option<Format>,
) -> std::result::Result<u8, Failure> {
    let file = FileConfig::load(common.config.as_deref()).map_err(usage)?;
    let set = resolve(common, &file).map_err(usage)?;
    let lo = emin.or(file.emin).ok_or_else(|| usage(anyhow!("--emin is required")))?;
    let hi = emax.or(file.emax).ok_or_else(|| usage(anyhow!("--emax is required")))?;
    let points = points.or(file.points).unwrap_or(25);
    let log = log || file.log.unwrap_or(false);
    let energies = energy_grid(lo, hi, points, log).map_err(usage)?;
    let req = SweepRequest {
        schemes: set.schemes.clone(),
        channel: set.channel,
        energies,
        policy: set.policy,
    };
    let records = par::with_threads(set.jobs, || sweep(&req)).map_err(usage)?;
    for r in records.iter().filter(|r| r.error.is_some()) {
        eprintln!("warning: {} at E={}: {}", r.scheme, r.energy, r.error.as_deref().unwrap_or(""));
    }
    let format = format.or(file.format).unwrap_or(Format::Csv);
    let out = out.or(file.out);
    let write = |w: &mut dyn Write| -> io::Result<()> {
        let mut w = BufWriter::new(w);
        match format {
            Format::Csv => output::write_csv(&mut w, &records, set.bits)?,
            Format::Jsonl => output::write_jsonl(&mut w, &records, set.bits)?,
        }
        w.flush()
    };
    match &out {
        Some(path) => {
            let mut f = File::create(path).with_context(|| format!("creating {}", path.display())).map_err(io)?;
            write(&mut f).with_context(|| format!("writing {}", path.display())).map_err(io)?;
        }
        None => write(&mut io::stdout().lock()).map_err(io)?,
    }
    Ok(0)
}

fn cmd_validate(suite: &str, tail_eps: Option<f64>) -> std::result::Result<u8, Failure> {
    let suite: Suite = suite.parse().map_err(usage)?;
    let mut policy = phaserate::numerics::TruncationPolicy::default();
    if let Some(eps) = tail_eps {
        policy = policy.with_tail_eps(eps).map_err(usage)?;
    }
    let checks = run_suite(suite, &policy);
    for c in &checks {
        println!("{c}");
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    println!("{passed}/{} checks passed", checks.len());
    Ok(if passed == checks.len() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Rate { common, energy } => cmd_rate(&common, energy),
        Cmd::Sweep {
            common,
            emin,
            emax,
            points,
            log,
            out,
            format,
        } => cmd_sweep(&common, emin, emax, points, log, out, format),
        Cmd::Validate { suite, tail_eps } => cmd_validate(&suite, tail_eps),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
