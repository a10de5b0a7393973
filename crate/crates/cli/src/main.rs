//! `ndstk`: experiments on non-autonomous interval and circle systems.

mod commands;
mod output;
mod systems;

use std::env;
use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ndstk_core::Rational;
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "ndstk", version, about, args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Directory receiving the artifacts. Not recorded in them, so runs
    /// into different directories compare equal.
    #[arg(long, global = true, default_value = "ndstk-out")]
    #[serde(skip)]
    pub out: PathBuf,
    /// Seed for randomized steps. NDSTK_SEED overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase", tag = "experiment")]
pub enum Command {
    /// Separated-set entropy estimates.
    Entropy(EntropyArgs),
    /// The transitive zero-entropy sequence and its block schedule.
    Construct(ConstructArgs),
    /// Chain transitivity, mixing and weak mixing on a grid.
    Chains(ChainsArgs),
    /// Shadowing decisions, modulus estimates and the mixing trace.
    Shadow(ShadowArgs),
    /// Sensitivity-time sets and family membership.
    Sense(SenseArgs),
    /// Distances between sets, fuzzy sets and maps.
    Metrics(MetricsArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct EntropyArgs {
    /// tent, identity, fm:M, rotation:A,B,..., construct:L or file:PATH.json
    #[arg(long, default_value = "tent")]
    pub system: String,
    /// base, power:K, product:SPEC+SPEC, hyper:M, fuzzy:LEVELS,CAP[,de] or arcs
    #[arg(long, default_value = "base")]
    pub kind: String,
    /// Strictly decreasing scales.
    #[arg(long, value_delimiter = ',', default_value = "1/16,1/64")]
    pub eps: Vec<Rational>,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    /// Number of candidate states.
    #[arg(long, default_value_t = 1 << 16)]
    pub budget: usize,
    #[arg(long, default_value_t = 4)]
    pub resolution_factor: usize,
    #[arg(long, default_value_t = 0.1)]
    pub tolerance: f64,
    /// Also count spanning sets.
    #[arg(long)]
    pub spanning: bool,
    /// Also report exact lap counts (interval base systems).
    #[arg(long)]
    pub laps: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ConstructArgs {
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// Check that every dyadic interval of level k covers [0, 1] at time s_k.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ChainsArgs {
    #[arg(long, default_value = "tent")]
    pub system: String,
    /// transitive, mixing or weak-mixing:K
    #[arg(long, default_value = "mixing")]
    pub property: String,
    #[arg(long, default_value = "1/10")]
    pub eps: Rational,
    /// Number of evenly spaced grid points.
    #[arg(long, default_value_t = 51)]
    pub grid: usize,
    #[arg(long, default_value_t = 64)]
    pub horizon: usize,
    /// Write every witness chain.
    #[arg(long)]
    pub witnesses: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ShadowArgs {
    #[arg(long, default_value = "tent")]
    pub system: String,
    /// decide, modulus or mixing
    #[arg(long, default_value = "decide")]
    pub mode: String,
    /// Pseudo-orbit for `decide`.
    #[arg(long, value_delimiter = ',')]
    pub orbit: Vec<Rational>,
    #[arg(long, default_value = "1/10")]
    pub eps: Rational,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Steps per sampled pseudo-orbit.
    #[arg(long, default_value_t = 10)]
    pub length: usize,
    #[arg(long, value_delimiter = ',', default_value = "1/1000,1/100,1/50,1/20")]
    pub deltas: Vec<Rational>,
    /// Chain step bound for `mixing`.
    #[arg(long, default_value = "1/50")]
    pub delta: Rational,
    #[arg(long, default_value = "1/2")]
    pub u: Rational,
    #[arg(long, default_value = "1/2")]
    pub v: Rational,
    #[arg(long, default_value = "1/5")]
    pub radius: Rational,
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SenseArgs {
    #[arg(long, default_value = "tent")]
    pub system: String,
    #[arg(long, value_delimiter = ',', default_value = "1/3")]
    pub points: Vec<Rational>,
    #[arg(long, default_value = "1/10")]
    pub eps: Rational,
    #[arg(long, default_value = "1/4")]
    pub delta: Rational,
    #[arg(long, default_value_t = 40)]
    pub horizon: usize,
    /// Deterministic neighbourhood samples per point.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Extra seeded random samples per point.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    /// infinite:C, cofinite:M, syndetic:G or full
    #[arg(long, default_value = "infinite:20")]
    pub family: String,
    /// A compact K; enables the base, hyperspace and fuzzy containment report.
    #[arg(long, value_delimiter = ',')]
    pub compact: Vec<Rational>,
    /// Fuzzy set `ALPHA:X,Y;...` for the containment report (default chi_K).
    #[arg(long)]
    pub fuzzy: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct MetricsArgs {
    /// Two compact-set JSON files.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub hausdorff: Vec<String>,
    /// Two fuzzy-set JSON files, levelwise metric.
    #[arg(long, num_args = 2, value_names = ["U", "V"])]
    pub dinf: Vec<String>,
    /// Two fuzzy-set JSON files, endograph metric on a grid.
    #[arg(long, num_args = 2, value_names = ["U", "V"])]
    pub endograph: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub resolution: usize,
    /// Two system specs; compares their first maps.
    #[arg(long, num_args = 2, value_names = ["F", "G"])]
    pub uniform: Vec<String>,
}

/// Turns `--config FILE` into flags. Keys become `--key`, arrays are joined
/// by commas, `true` becomes a bare flag and `experiment` names the
/// subcommand. Flags given on the command line come later and win.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let mut rest = args.clone();
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        rest.remove(pos);
        p.to_string()
    } else {
        let Some(p) = args.get(pos + 1) else {
            bail!("--config needs a file");
        };
        rest.drain(pos..pos + 2);
        p.clone()
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading {path}"))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
    let Some(map) = value.as_object() else {
        bail!("{path}: the config must be a JSON object");
    };
    let scalar = |v: &serde_json::Value| -> Result<String> {
        Ok(match v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => bail!("unsupported config value {other}"),
        })
    };
    let mut flags = Vec::new();
    let mut experiment = None;
    for (key, v) in map {
        if key == "experiment" {
            experiment = Some(scalar(v)?);
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            serde_json::Value::Bool(true) => flags.push(flag),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::Array(items) => {
                let items = items.iter().map(scalar).collect::<Result<Vec<_>>>()?;
                // Metric pairs take two values; lists take one joined value.
                if matches!(key.as_str(), "hausdorff" | "dinf" | "endograph" | "uniform") {
                    flags.push(flag);
                    flags.extend(items);
                } else {
                    flags.push(flag);
                    flags.push(items.join(","));
                }
            }
            v => {
                flags.push(flag);
                flags.push(scalar(v)?);
            }
        }
    }
    let subcommands = ["entropy", "construct", "chains", "shadow", "sense", "metrics"];
    let given = rest.iter().skip(1).position(|a| subcommands.contains(&a.as_str())).map(|i| i + 1);
    let mut out = vec![rest[0].clone()];
    match (given, experiment) {
        (Some(i), Some(e)) if rest[i] != e => bail!("config experiment `{e}` conflicts with subcommand `{}`", rest[i]),
        (Some(i), _) => {
            out.extend(rest[1..i].iter().cloned());
            out.push(rest[i].clone());
            out.extend(flags);
            out.extend(rest[i + 1..].iter().cloned());
        }
        (None, Some(e)) => {
            out.push(e);
            out.extend(flags);
            out.extend(rest[1..].iter().cloned());
        }
        (None, None) => bail!("{path}: no `experiment` key and no subcommand given"),
    }
    Ok(out)
}

/// Outcome of a finished run.
#[derive(Debug, PartialEq, Eq)]
pub enum Status {
    Complete,
    /// Budget or horizon too small for a conclusion.
    Incomplete,
}

fn resolve_seed(cli: &mut Cli) -> Result<()> {
    if let Ok(s) = env::var("NDSTK_SEED") {
        cli.common.seed = s.trim().parse().with_context(|| format!("NDSTK_SEED `{s}` is not an unsigned integer"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv = match expand_config(env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = resolve_seed(&mut cli) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(Status::Complete) => ExitCode::SUCCESS,
        Ok(Status::Incomplete) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.downcast_ref::<io::Error>().is_some()) {
                ExitCode::FAILURE
            } else {
                ExitCode::from(2)
            }
        }
    }
}
