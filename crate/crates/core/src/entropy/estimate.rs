use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::maps::{identity, NdsSpec, Space};
use crate::rational::Rational;

use super::candidates::candidates;
use super::separated::{separated_scan, spanning_count};
use super::system::SystemHandle;

/// Settings for [`entropy_estimate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateConfig {
    /// Strictly decreasing scales.
    pub eps_schedule: Vec<Rational>,
    pub n_max: usize,
    pub candidate_budget: usize,
    /// A scan stops once its separated set has more than
    /// `candidates / resolution_factor^dimension` elements; beyond that the
    /// grid, not the dynamics, limits the count.
    pub resolution_factor: usize,
    /// Each row is repeated on a grid with half the resolution per axis; the
    /// row is resolved only if the coarse count is at least
    /// `(1 - convergence_tolerance)` times the fine one.
    pub convergence_tolerance: f64,
    /// Also compute greedy spanning counts on resolved rows.
    pub spanning: bool,
}

impl EstimateConfig {
    pub fn new(eps_schedule: Vec<Rational>, n_max: usize, candidate_budget: usize) -> Self {
        EstimateConfig {
            eps_schedule,
            n_max,
            candidate_budget,
            resolution_factor: 4,
            convergence_tolerance: 0.1,
            spanning: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyRow {
    pub n: usize,
    pub eps: Rational,
    /// Greedy separated count; a lower bound when the row is unresolved.
    pub separated: usize,
    /// The same count on the half-resolution grid.
    pub coarse_separated: usize,
    pub spanning: Option<usize>,
    /// `ln(separated) / n`.
    pub slope: f64,
    pub resolved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub eps: Rational,
    pub n_from: usize,
    pub n_to: usize,
    /// Least-squares slope of `ln(separated)` against `n`.
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropySeries {
    pub kind: String,
    pub candidates: usize,
    pub resolution_limit: usize,
    pub rows: Vec<EntropyRow>,
    /// Some rows hit the resolution limit or no summary could be formed.
    pub incomplete: bool,
    pub summary: Option<Summary>,
}

impl EntropySeries {
    pub fn rows_at(&self, eps: &Rational) -> impl Iterator<Item = &EntropyRow> {
        let eps = eps.clone();
        self.rows.iter().filter(move |r| r.eps == eps)
    }

    pub fn slope(&self) -> Option<f64> {
        self.summary.as_ref().map(|s| s.slope)
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Separated (and optionally spanning) counts for every `n <= n_max` and
/// every scale, with a summary slope.
///
/// The summary uses the smallest scale with at least four resolved rows and
/// fits `ln(separated)` over the upper half of its resolved `n`.
pub fn entropy_estimate(sys: &SystemHandle, config: &EstimateConfig) -> Result<EntropySeries> {
    let eps = &config.eps_schedule;
    if eps.is_empty() {
        return arg("epsilon schedule is empty");
    }
    if eps.iter().any(|e| !e.is_positive()) {
        return arg("epsilon values must be positive");
    }
    if eps.windows(2).any(|w| w[0] <= w[1]) {
        return arg("epsilon schedule must be strictly decreasing");
    }
    if config.n_max < 4 {
        return arg("n_max must be at least 4");
    }
    if config.candidate_budget == 0 || config.resolution_factor == 0 {
        return arg("candidate budget and resolution factor must be positive");
    }
    if !(0.0..1.0).contains(&config.convergence_tolerance) {
        return arg("convergence tolerance must lie in [0, 1)");
    }
    let cands = candidates(sys, config.candidate_budget);
    let scale = (config.resolution_factor as f64).powi(sys.dimension() as i32);
    let limit = ((cands.len() as f64 / scale).floor() as usize).max(1);
    let jobs: Vec<(usize, Rational)> = eps
        .iter()
        .flat_map(|e| (1..=config.n_max).map(move |n| (n, e.clone())))
        .collect();
    let scans = separated_scan(sys, &cands, &jobs, limit)?;
    let coarse_budget = (config.candidate_budget >> sys.dimension().min(usize::BITS as usize - 1)).max(1);
    let coarse = separated_scan(sys, &candidates(sys, coarse_budget), &jobs, limit)?;

    let mut rows = Vec::with_capacity(scans.len());
    let mut incomplete = false;
    for (per_eps, coarse_eps) in scans.chunks(config.n_max).zip(coarse.chunks(config.n_max)) {
        let mut resolved = true;
        for (scan, rough) in per_eps.iter().zip(coarse_eps) {
            let converged = rough.count as f64 >= (1.0 - config.convergence_tolerance) * scan.count as f64;
            resolved &= !scan.saturated && converged;
            incomplete |= !resolved;
            let spanning = if resolved && config.spanning {
                Some(spanning_count(sys, scan.n, &scan.eps, &cands, &cands)?)
            } else {
                None
            };
            rows.push(EntropyRow {
                n: scan.n,
                eps: scan.eps.clone(),
                separated: scan.count,
                coarse_separated: rough.count,
                spanning,
                slope: (scan.count as f64).ln() / scan.n as f64,
                resolved,
            });
        }
    }

    let summary = eps.iter().rev().find_map(|e| {
        let good: Vec<&EntropyRow> = rows.iter().filter(|r| &r.eps == e && r.resolved).collect();
        if good.len() < 4 {
            return None;
        }
        let upper = &good[good.len() / 2..];
        let xs: Vec<f64> = upper.iter().map(|r| r.n as f64).collect();
        let ys: Vec<f64> = upper.iter().map(|r| (r.separated as f64).ln()).collect();
        Some(Summary {
            eps: e.clone(),
            n_from: upper[0].n,
            n_to: upper[upper.len() - 1].n,
            slope: least_squares_slope(&xs, &ys),
        })
    });
    incomplete |= summary.is_none();
    Ok(EntropySeries {
        kind: sys.kind().to_string(),
        candidates: cands.len(),
        resolution_limit: limit,
        rows,
        incomplete,
        summary,
    })
}

/// Exact lap counts of `f_0^n` for `n = 1..=n_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LapSeries {
    pub laps: Vec<u64>,
    /// `ln(laps(f_0^{n_max})) / n_max`.
    pub slope: f64,
}

/// Lap-number growth of the compositions, an independent entropy value for
/// piecewise-monotone interval sequences.
pub fn lap_count_entropy(nds: &NdsSpec, n_max: usize) -> Result<LapSeries> {
    if nds.space() != Space::Interval {
        return Err(Error::Unsupported("lap counting needs interval maps".into()));
    }
    if n_max == 0 {
        return arg("n_max must be at least 1");
    }
    let mut acc = identity(Space::Interval);
    let mut laps = Vec::with_capacity(n_max);
    for k in 0..n_max {
        acc = nds.map_at(k).compose(&acc)?;
        laps.push(acc.laps() as u64);
    }
    let slope = (laps[n_max - 1] as f64).ln() / n_max as f64;
    Ok(LapSeries { laps, slope })
}
