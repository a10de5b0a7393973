//! Builders named on the command line.

use std::fs;

use anyhow::{bail, Context, Result};
use ndstk_core::entropy::{arcs_system, fuzzy_system, hyper_system, power_system, product_system, FuzzyMetric, SystemHandle};
use ndstk_core::fuzzy::PCFuzzy;
use ndstk_core::hyperspace::FiniteCompact;
use ndstk_core::maps::{build_fm, build_rotation_sequence, build_transitive_zero_entropy, identity, tent, NdsSpec, Space};
use ndstk_core::Rational;
use serde::Deserialize;

fn rationals(list: &str) -> Result<Vec<Rational>> {
    list.split(',')
        .map(|s| s.trim().parse::<Rational>().with_context(|| format!("bad number `{s}`")))
        .collect()
}

/// `tent`, `identity`, `fm:M`, `rotation:A1,A2,...`, `construct:LEVELS` or
/// `file:PATH.json`.
pub fn build_nds(spec: &str) -> Result<NdsSpec> {
    let (name, param) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match name {
        "tent" => NdsSpec::constant(tent()),
        "identity" => NdsSpec::constant(identity(Space::Interval)),
        "fm" => NdsSpec::constant(build_fm(param.parse().context("fm needs a positive integer")?)?),
        "rotation" => build_rotation_sequence(&rationals(param)?)?,
        "construct" => build_transitive_zero_entropy(param.parse().context("construct needs a level count")?)?.nds,
        "file" => {
            let text = fs::read_to_string(param).with_context(|| format!("reading {param}"))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {param}"))?
        }
        _ => bail!("unknown system `{spec}`"),
    })
}

/// `base`, `power:K`, `product:SPEC+SPEC...`, `hyper:M`,
/// `fuzzy:LEVELS,CAP[,de]` or `arcs`.
pub fn build_system(nds: &NdsSpec, kind: &str) -> Result<SystemHandle> {
    let (name, param) = kind.split_once(':').unwrap_or((kind, ""));
    Ok(match name {
        "base" => SystemHandle::base(nds.clone()),
        "power" => power_system(nds, param.parse().context("power needs a factor count")?)?,
        "product" => {
            let mut factors = vec![nds.clone()];
            for other in param.split('+') {
                factors.push(build_nds(other)?);
            }
            product_system(&factors)?
        }
        "hyper" => hyper_system(nds, param.parse().context("hyper needs a point cap")?)?,
        "fuzzy" => {
            let parts: Vec<&str> = param.split(',').collect();
            let (levels, cap) = match parts.as_slice() {
                [l, c] | [l, c, _] => (l.parse()?, c.parse()?),
                _ => bail!("fuzzy needs LEVELS,CAP[,de]"),
            };
            let metric = match parts.get(2) {
                None | Some(&"dinf") => FuzzyMetric::Levelwise,
                Some(&"de") => FuzzyMetric::Endograph,
                Some(m) => bail!("unknown fuzzy metric `{m}`"),
            };
            fuzzy_system(nds, levels, cap, metric)?
        }
        "arcs" => arcs_system(nds)?,
        _ => bail!("unknown system kind `{kind}`"),
    })
}

/// `1/3:0.2,0.6;1:0.6`: threshold, then the level's points.
pub fn parse_fuzzy(text: &str) -> Result<PCFuzzy> {
    let mut thresholds = Vec::new();
    let mut levels = Vec::new();
    for part in text.split(';') {
        let (alpha, points) = part.split_once(':').context("fuzzy levels look like ALPHA:X,Y,...")?;
        thresholds.push(alpha.trim().parse::<Rational>()?);
        levels.push(rationals(points)?);
    }
    Ok(PCFuzzy::from_values(Space::Interval, thresholds, levels)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CompactFile {
    Points(Vec<Rational>),
    Tagged { space: Space, points: Vec<Rational> },
}

pub fn load_compact(path: &str) -> Result<FiniteCompact> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let (space, points) = match serde_json::from_str(&text).with_context(|| format!("parsing {path}"))? {
        CompactFile::Points(p) => (Space::Interval, p),
        CompactFile::Tagged { space, points } => (space, points),
    };
    Ok(FiniteCompact::new(space, points)?)
}

#[derive(Deserialize)]
struct FuzzyFile {
    #[serde(default = "interval")]
    space: Space,
    thresholds: Vec<Rational>,
    levels: Vec<Vec<Rational>>,
}

fn interval() -> Space {
    Space::Interval
}

pub fn load_fuzzy(path: &str) -> Result<PCFuzzy> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let f: FuzzyFile = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
    Ok(PCFuzzy::from_values(f.space, f.thresholds, f.levels)?)
}

pub fn compact_from_list(list: &[Rational]) -> Result<FiniteCompact> {
    Ok(FiniteCompact::new(Space::Interval, list.to_vec())?)
}
