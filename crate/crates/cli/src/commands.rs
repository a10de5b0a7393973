use anyhow::{bail, Context, Result};
use ndstk_core::chains::{check_chain_property, ChainProperty};
use ndstk_core::entropy::{entropy_estimate, lap_count_entropy, EstimateConfig, State, SystemHandle};
use ndstk_core::fuzzy::{d_endograph, d_infty, EndographGrid, PCFuzzy};
use ndstk_core::hyperspace::hausdorff;
use ndstk_core::maps::{build_fm, build_transitive_zero_entropy, dyadic_intervals, identity, Space};
use ndstk_core::sensitivity::{check_multi_f_sensitive, induced_containments, FamilyPredicate, Sampling};
use ndstk_core::shadowing::{
    decide_finite_shadowing, decide_h_shadowing, estimate_shadowing_modulus, mixing_from_shadowing, TraceVerdict,
};
use ndstk_core::Rational;
use serde_json::json;

use crate::output::Artifacts;
use crate::systems::{build_nds, build_system, compact_from_list, load_compact, load_fuzzy, parse_fuzzy};
use crate::{ChainsArgs, Cli, Command, ConstructArgs, EntropyArgs, MetricsArgs, SenseArgs, ShadowArgs, Status};

pub fn run(cli: &Cli) -> Result<Status> {
    let mut out = Artifacts::new(&cli.common.out, cli)?;
    let status = match &cli.command {
        Command::Entropy(a) => entropy(a, &mut out)?,
        Command::Construct(a) => construct(a, &mut out)?,
        Command::Chains(a) => chains(a, &mut out)?,
        Command::Shadow(a) => shadow(a, cli.common.seed, &mut out)?,
        Command::Sense(a) => sense(a, cli.common.seed, &mut out)?,
        Command::Metrics(a) => metrics(a, &mut out)?,
    };
    for path in &out.written {
        println!("wrote {}", path.display());
    }
    Ok(status)
}

fn incomplete_if(flag: bool) -> Status {
    if flag {
        Status::Incomplete
    } else {
        Status::Complete
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn entropy(a: &EntropyArgs, out: &mut Artifacts) -> Result<Status> {
    let nds = build_nds(&a.system)?;
    let sys = build_system(&nds, &a.kind)?;
    let mut config = EstimateConfig::new(a.eps.clone(), a.n_max, a.budget);
    config.resolution_factor = a.resolution_factor;
    config.convergence_tolerance = a.tolerance;
    config.spanning = a.spanning;
    let laps = if a.laps { Some(lap_count_entropy(&nds, a.n_max)?) } else { None };
    let series = entropy_estimate(&sys, &config)?;

    let rows: Vec<Vec<String>> = series
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.eps.to_string(),
                r.separated.to_string(),
                r.coarse_separated.to_string(),
                opt(&r.spanning),
                format!("{:.6}", r.slope),
                r.resolved.to_string(),
            ]
        })
        .collect();
    out.csv(
        "entropy.csv",
        &["n", "eps", "separated", "coarse_separated", "spanning", "slope", "resolved"],
        &rows,
    )?;
    let plot: Vec<Vec<String>> = series
        .rows
        .iter()
        .map(|r| vec![r.n.to_string(), r.eps.to_string(), format!("{:.6}", (r.separated as f64).ln())])
        .collect();
    let plotted = out.emit_plot_data("entropy.plot.csv", &["n", "eps", "log_count"], &plot)?;
    let incomplete = series.summary.is_none() || !plotted;
    out.json("entropy.json", &json!({ "series": series, "laps": laps }), incomplete)?;

    println!("system {} ({}), {} candidates", a.system, series.kind, series.candidates);
    match &series.summary {
        Some(s) => println!("slope {:.4} at eps {} over n = {}..{}", s.slope, s.eps, s.n_from, s.n_to),
        None => println!("no scale has four resolved rows; raise the budget or lower n_max"),
    }
    if let Some(l) = &laps {
        println!("lap-count slope {:.4}", l.slope);
    }
    Ok(incomplete_if(incomplete))
}

fn construct(a: &ConstructArgs, out: &mut Artifacts) -> Result<Status> {
    let t = build_transitive_zero_entropy(a.levels)?;
    let id = identity(Space::Interval);
    let mut rows = Vec::new();
    let mut levels = Vec::new();
    let mut failed = false;
    for k in 1..=a.levels + 1 {
        let distance = build_fm(k)?.uniform_distance(&id)?;
        let (s, len) = match (t.boundaries.get(k - 1), t.block_lengths.get(k - 1)) {
            (Some(s), Some(l)) => (Some(*s), Some(*l)),
            _ => (None, None),
        };
        let verified = match s {
            Some(s) if a.verify => {
                let ok = dyadic_intervals(k as u32).iter().all(|j| t.nds.image(0, s, j).is_full());
                failed |= !ok;
                Some(ok)
            }
            _ => None,
        };
        rows.push(vec![k.to_string(), opt(&s), opt(&len), distance.to_string(), opt(&verified)]);
        levels.push(json!({
            "level": k,
            "s": s,
            "block_length": len,
            "uniform_distance_to_identity": distance,
            "verified": verified,
        }));
        if let Some(s) = s {
            let check = match verified {
                Some(true) => ": every dyadic J of this level has f_0^s(J) = [0, 1]",
                Some(false) => ": some dyadic J of this level does not cover [0, 1]",
                None => "",
            };
            println!("s_{k} = {s}{check}");
        }
    }
    out.csv(
        "construct.csv",
        &["level", "s", "block_length", "uniform_distance_to_identity", "verified"],
        &rows,
    )?;
    let plot: Vec<Vec<String>> = t
        .boundaries
        .iter()
        .enumerate()
        .map(|(i, s)| vec![(i + 1).to_string(), s.to_string()])
        .collect();
    out.emit_plot_data("construct.plot.csv", &["level", "s"], &plot)?;
    out.json(
        "construct.json",
        &json!({ "boundaries": t.boundaries, "block_lengths": t.block_lengths, "levels": levels }),
        failed,
    )?;
    Ok(incomplete_if(failed))
}

fn parse_property(s: &str) -> Result<ChainProperty> {
    Ok(match s.split_once(':') {
        None if s == "transitive" => ChainProperty::Transitive,
        None if s == "mixing" => ChainProperty::Mixing,
        Some(("weak-mixing", k)) => ChainProperty::WeakMixing(k.parse().context("weak-mixing needs an order")?),
        _ => bail!("unknown chain property `{s}`"),
    })
}

fn chains(a: &ChainsArgs, out: &mut Artifacts) -> Result<Status> {
    let property = parse_property(&a.property)?;
    let nds = build_nds(&a.system)?;
    let sys = SystemHandle::base(nds.clone());
    if a.grid < 2 {
        bail!("the grid needs at least two points");
    }
    let grid: Vec<State> = nds.space().grid(a.grid).into_iter().map(State::Point).collect();
    let report = check_chain_property(&sys, property, &a.eps, &grid, a.horizon)?;

    let rows: Vec<Vec<String>> = report
        .pairs
        .iter()
        .map(|p| vec![grid[p.from].to_string(), grid[p.to].to_string(), opt(&p.min_length), opt(&p.stable_from)])
        .collect();
    out.csv("chains.csv", &["from", "to", "min_length", "stable_from"], &rows)?;
    if a.witnesses {
        let mut steps = Vec::new();
        for (i, p) in report.pairs.iter().enumerate() {
            if let Some(c) = &p.chain {
                for (t, s) in c.states().iter().enumerate() {
                    steps.push(vec![i.to_string(), t.to_string(), s.to_string()]);
                }
            }
        }
        out.csv("chains_witnesses.csv", &["pair_index", "step", "state"], &steps)?;
    }
    let plot: Vec<Vec<String>> = report
        .pairs
        .iter()
        .enumerate()
        .map(|(i, p)| vec![i.to_string(), opt(&p.min_length)])
        .collect();
    let plotted = out.emit_plot_data("chains.plot.csv", &["pair_index", "min_chain_length"], &plot)?;
    let longest = report.pairs.iter().filter_map(|p| p.min_length).max();
    let summary = json!({
        "property": report.property,
        "epsilon": report.epsilon,
        "grid_size": report.grid_size,
        "horizon": report.horizon,
        "verdict": report.verdict,
        "mixing_n": report.mixing_n,
        "longest_min_length": longest,
        "note": report.note,
    });
    let incomplete = !report.is_verified() || !plotted;
    out.json("chains.json", &summary, incomplete)?;
    println!("{:?} at eps {} on {} points, horizon {}: {:?}", property, a.eps, a.grid, a.horizon, report.verdict);
    if let Some(n) = report.mixing_n {
        println!("chains of every length from {n} to {} between all pairs", a.horizon);
    }
    if let Some(note) = &report.note {
        println!("{note}");
    }
    Ok(incomplete_if(incomplete))
}

fn shadow(a: &ShadowArgs, seed: u64, out: &mut Artifacts) -> Result<Status> {
    let nds = build_nds(&a.system)?;
    match a.mode.as_str() {
        "decide" => {
            if a.orbit.is_empty() {
                bail!("decide needs --orbit");
            }
            let finite = decide_finite_shadowing(&nds, &a.orbit, &a.eps)?;
            let h = decide_h_shadowing(&nds, &a.orbit, &a.eps)?;
            let rows = [("finite", &finite), ("h", &h)]
                .iter()
                .map(|(name, d)| {
                    vec![name.to_string(), d.shadowed.to_string(), opt(&d.witness), d.boundary_tight.to_string()]
                })
                .collect::<Vec<_>>();
            out.csv("shadow.csv", &["kind", "shadowed", "witness", "boundary_tight"], &rows)?;
            let witness_orbit = finite.witness.as_ref().map(|z| nds.orbit_values(z, 0, a.orbit.len() - 1));
            let plot: Vec<Vec<String>> = a
                .orbit
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    let w = witness_orbit.as_ref().map(|o| o[k].to_f64());
                    vec![k.to_string(), format!("{:.6}", x.to_f64()), w.map(|w| format!("{w:.6}")).unwrap_or_default()]
                })
                .collect();
            out.emit_plot_data("shadow.plot.csv", &["k", "pseudo_orbit", "witness_orbit"], &plot)?;
            out.json(
                "shadow.json",
                &json!({ "orbit": a.orbit, "epsilon": a.eps, "finite": finite, "h": h }),
                false,
            )?;
            println!("finite shadowing: {} (witness {})", finite.shadowed, opt(&finite.witness));
            println!("h-shadowing: {} (witness {})", h.shadowed, opt(&h.witness));
            if finite.boundary_tight || h.boundary_tight {
                println!("boundary-tight: only closed tubes admit a witness");
            }
            Ok(Status::Complete)
        }
        "modulus" => {
            let m = estimate_shadowing_modulus(&nds, &a.eps, a.trials, a.length, &a.deltas, seed)?;
            let rows: Vec<Vec<String>> = m
                .rows
                .iter()
                .map(|r| vec![r.delta.to_string(), r.trials.to_string(), r.failures.to_string()])
                .collect();
            out.csv("shadow_modulus.csv", &["delta", "trials", "failures"], &rows)?;
            let plot: Vec<Vec<String>> = m
                .rows
                .iter()
                .map(|r| vec![format!("{:.6}", r.delta.to_f64()), format!("{:.6}", r.failures as f64 / r.trials as f64)])
                .collect();
            out.emit_plot_data("shadow_modulus.plot.csv", &["delta", "failure_rate"], &plot)?;
            out.json("shadow_modulus.json", &m, false)?;
            println!("largest accepted delta at eps {}: {} (seed {seed})", a.eps, m.delta);
            Ok(Status::Complete)
        }
        "mixing" => {
            let tr = mixing_from_shadowing(&nds, &a.eps, &a.delta, &a.u, &a.v, &a.radius, a.horizon)?;
            let rows: Vec<Vec<String>> = tr
                .steps
                .iter()
                .map(|s| vec![s.k.to_string(), s.chain_found.to_string(), opt(&s.witness), s.lands.to_string()])
                .collect();
            out.csv("shadow_mixing.csv", &["k", "chain_found", "witness", "lands"], &rows)?;
            let plot: Vec<Vec<String>> = tr
                .steps
                .iter()
                .map(|s| vec![s.k.to_string(), u8::from(s.lands).to_string()])
                .collect();
            out.emit_plot_data("shadow_mixing.plot.csv", &["k", "lands"], &plot)?;
            let incomplete = tr.verdict == TraceVerdict::Inconclusive;
            out.json("shadow_mixing.json", &tr, incomplete)?;
            println!("{:?}, every k from {} lands", tr.verdict, opt(&tr.verified_from));
            Ok(incomplete_if(incomplete))
        }
        m => bail!("unknown shadow mode `{m}`"),
    }
}

fn parse_family(s: &str) -> Result<FamilyPredicate> {
    let (name, param) = s.split_once(':').unwrap_or((s, ""));
    let n = || param.parse::<usize>().with_context(|| format!("family `{s}` needs a count"));
    let f = match name {
        "infinite" => FamilyPredicate::Infinite { min_count: n()? },
        "cofinite" => FamilyPredicate::Cofinite { max_missing: n()? },
        "syndetic" => FamilyPredicate::Syndetic { max_gap: n()? },
        "full" => FamilyPredicate::Full,
        _ => bail!("unknown family `{s}`"),
    };
    f.validate()?;
    Ok(f)
}

fn sense(a: &SenseArgs, seed: u64, out: &mut Artifacts) -> Result<Status> {
    let family = parse_family(&a.family)?;
    let nds = build_nds(&a.system)?;
    let sys = SystemHandle::base(nds.clone());
    let sampling = Sampling {
        grid: a.samples,
        random: a.random,
        seed,
    };
    let points: Vec<State> = a.points.iter().cloned().map(State::Point).collect();
    let report = check_multi_f_sensitive(&sys, &points, &a.eps, &a.delta, &family, a.horizon, &sampling)?;
    let flag = |b: bool| u8::from(b).to_string();
    let rows: Vec<Vec<String>> = (1..=a.horizon)
        .map(|n| {
            let mut row = vec![n.to_string()];
            row.extend(report.per_point.iter().map(|t| flag(t.contains(n))));
            row.push(flag(report.intersection.contains(n)));
            row
        })
        .collect();
    let mut header: Vec<String> = vec!["n".into()];
    header.extend(a.points.iter().map(|p| format!("x={p}")));
    header.push("intersection".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv("sense.csv", &header, &rows)?;
    let plot: Vec<Vec<String>> = (1..=a.horizon)
        .map(|n| vec![n.to_string(), flag(report.intersection.contains(n))])
        .collect();
    out.emit_plot_data("sense.plot.csv", &["n", "member_flag"], &plot)?;

    let containments = if a.compact.is_empty() {
        None
    } else {
        let k = compact_from_list(&a.compact)?;
        let u = match &a.fuzzy {
            Some(text) => parse_fuzzy(text)?,
            None => PCFuzzy::chi(&k),
        };
        Some(induced_containments(&nds, &k, &u, &a.eps, &a.delta, a.horizon, &sampling)?)
    };
    out.json("sense.json", &json!({ "report": report, "containments": containments }), false)?;
    println!(
        "{} of {} times in the intersection; member of {:?}: {}",
        report.intersection.len(),
        a.horizon,
        family,
        report.member
    );
    if let Some(c) = &containments {
        println!(
            "N_dinf(chi_K) in N_D(K): {}; N_D([u]_1, eps/4) in N_dinf(u): {}",
            c.chi_in_hyper.holds, c.top_in_fuzzy.holds
        );
    }
    Ok(Status::Complete)
}

fn metrics(a: &MetricsArgs, out: &mut Artifacts) -> Result<Status> {
    let mut rows: Vec<(String, String, String, Rational)> = Vec::new();
    if let [x, y] = a.hausdorff.as_slice() {
        rows.push(("hausdorff".into(), x.clone(), y.clone(), hausdorff(&load_compact(x)?, &load_compact(y)?)?));
    }
    if let [x, y] = a.dinf.as_slice() {
        rows.push(("dinf".into(), x.clone(), y.clone(), d_infty(&load_fuzzy(x)?, &load_fuzzy(y)?)?));
    }
    if let [x, y] = a.endograph.as_slice() {
        let grid = EndographGrid::new(a.resolution)?;
        rows.push(("endograph".into(), x.clone(), y.clone(), d_endograph(&load_fuzzy(x)?, &load_fuzzy(y)?, &grid)?));
    }
    if let [x, y] = a.uniform.as_slice() {
        let d = build_nds(x)?.map_at(0).uniform_distance(build_nds(y)?.map_at(0))?;
        rows.push(("uniform".into(), x.clone(), y.clone(), d));
    }
    if rows.is_empty() {
        bail!("give at least one of --hausdorff, --dinf, --endograph or --uniform");
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|(m, x, y, v)| vec![m.clone(), x.clone(), y.clone(), v.to_string()])
        .collect();
    out.csv("metrics.csv", &["metric", "a", "b", "value"], &table)?;
    let values: Vec<_> = rows
        .iter()
        .map(|(m, x, y, v)| json!({ "metric": m, "a": x, "b": y, "value": v }))
        .collect();
    out.json("metrics.json", &values, false)?;
    for (m, _, _, v) in &rows {
        println!("{m} {v}");
    }
    Ok(Status::Complete)
}
