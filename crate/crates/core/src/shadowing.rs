//! Exact finite shadowing and h-shadowing for interval sequences, by pulling
//! closed tubes back through piecewise-linear preimages.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chains::chains_for_lengths;
use crate::entropy::{State, SystemHandle};
use crate::error::{arg, Error, Result};
use crate::fuzzy::PCFuzzy;
use crate::hyperspace::FiniteCompact;
use crate::maps::{IntervalUnion, NdsSpec, Space};
use crate::rational::Rational;

/// Constraint sets of a pseudo-orbit and the initial points satisfying all
/// of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tube {
    /// `S_k`, the admissible values of `f_0^k(z)`.
    pub constraints: Vec<IntervalUnion>,
    /// Every `z` with `f_0^k(z) ∈ S_k` for all `k`.
    pub feasible: IntervalUnion,
}

impl Tube {
    /// Pushes the feasible set forward and checks it stays in every `S_k`.
    pub fn verify(&self, nds: &NdsSpec) -> bool {
        if !self.feasible.is_subset_of(&self.constraints[0]) {
            return false;
        }
        let mut set = self.feasible.clone();
        for (k, s) in self.constraints.iter().enumerate().skip(1) {
            set = nds.map_at(k - 1).image(&set);
            if !set.is_subset_of(s) {
                return false;
            }
        }
        true
    }
}

fn check_interval(nds: &NdsSpec) -> Result<()> {
    if nds.space() != Space::Interval {
        return Err(Error::Unsupported("shadowing is decided for interval maps only".into()));
    }
    Ok(())
}

fn check_inputs(nds: &NdsSpec, len: usize, eps: &Rational) -> Result<()> {
    check_interval(nds)?;
    if len == 0 {
        return arg("a pseudo-orbit needs at least one point");
    }
    if !eps.is_positive() {
        return arg(format!("epsilon must be positive, got {eps}"));
    }
    Ok(())
}

/// Intersects each constraint with the preimage of the next, from the end.
fn pull_back(nds: &NdsSpec, constraints: &[IntervalUnion]) -> IntervalUnion {
    let last = constraints.len() - 1;
    let mut set = constraints[last].clone();
    for k in (0..last).rev() {
        if set.is_empty() {
            return set;
        }
        set = constraints[k].intersect(&nds.map_at(k).preimage(&set));
    }
    set
}

fn check_orbit(orbit: &[Rational]) -> Result<()> {
    if let Some(x) = orbit.iter().find(|x| !x.in_unit_interval()) {
        return arg(format!("pseudo-orbit point {x} is outside [0, 1]"));
    }
    Ok(())
}

/// The closed `eps`-tube around a pseudo-orbit and its exact feasible set.
pub fn tube_set(nds: &NdsSpec, orbit: &[Rational], eps: &Rational) -> Result<Tube> {
    check_inputs(nds, orbit.len(), eps)?;
    check_orbit(orbit)?;
    let constraints: Vec<IntervalUnion> = orbit.iter().map(|x| IntervalUnion::ball(x, eps)).collect();
    let feasible = pull_back(nds, &constraints);
    Ok(Tube {
        constraints,
        feasible,
    })
}

/// Outcome of a shadowing decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShadowDecision {
    pub shadowed: bool,
    /// The leftmost shadowing point.
    pub witness: Option<Rational>,
    /// Shadowed with closed tubes, but no tested feasible point stays
    /// strictly inside them: the strict decision may differ.
    pub boundary_tight: bool,
    pub feasible: IntervalUnion,
}

/// Whether the orbit of `z` stays strictly within `eps` of the pseudo-orbit,
/// except at `exact_end` where it must hit the last point.
fn strictly_inside(nds: &NdsSpec, z: &Rational, orbit: &[Rational], eps: &Rational, exact_end: bool) -> bool {
    let values = nds.orbit_values(z, 0, orbit.len() - 1);
    let n = orbit.len() - 1;
    values.iter().zip(orbit).enumerate().all(|(k, (v, x))| {
        if exact_end && k == n {
            v == x
        } else {
            (v - x).abs() < *eps
        }
    })
}

fn decide(nds: &NdsSpec, orbit: &[Rational], eps: &Rational, feasible: IntervalUnion, exact_end: bool) -> ShadowDecision {
    let witness = feasible.min().cloned();
    let boundary_tight = witness.is_some()
        && !feasible.intervals().iter().any(|(lo, hi)| {
            [lo.clone(), Rational::midpoint(lo, hi), hi.clone()]
                .iter()
                .any(|z| strictly_inside(nds, z, orbit, eps, exact_end))
        });
    ShadowDecision {
        shadowed: witness.is_some(),
        witness,
        boundary_tight,
        feasible,
    }
}

/// Whether some point `z` has `|f_0^k(z) - x_k| <= eps` for every `k`.
pub fn decide_finite_shadowing(nds: &NdsSpec, orbit: &[Rational], eps: &Rational) -> Result<ShadowDecision> {
    let tube = tube_set(nds, orbit, eps)?;
    Ok(decide(nds, orbit, eps, tube.feasible, false))
}

/// Like [`decide_finite_shadowing`], but the orbit of `z` must end exactly at
/// the last pseudo-orbit point.
pub fn decide_h_shadowing(nds: &NdsSpec, orbit: &[Rational], eps: &Rational) -> Result<ShadowDecision> {
    check_inputs(nds, orbit.len(), eps)?;
    check_orbit(orbit)?;
    let last = orbit.len() - 1;
    let constraints: Vec<IntervalUnion> = orbit
        .iter()
        .enumerate()
        .map(|(k, x)| {
            if k == last {
                IntervalUnion::point(x.clone())
            } else {
                IntervalUnion::ball(x, eps)
            }
        })
        .collect();
    let feasible = pull_back(nds, &constraints);
    Ok(decide(nds, orbit, eps, feasible, true))
}

/// Shadowing of a pseudo-orbit of finite compact sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetShadowDecision {
    pub shadowed: bool,
    /// The largest shadowing compact: every admissible point. Any shadowing
    /// compact is a subset of it.
    pub admissible: IntervalUnion,
}

/// `eps`-neighbourhood of a finite set, clipped to `[0, 1]`.
fn neighbourhood(set: &FiniteCompact, eps: &Rational) -> IntervalUnion {
    set.values()
        .iter()
        .fold(IntervalUnion::empty(), |acc, x| acc.union(&IntervalUnion::ball(x, eps)))
}

/// Decides shadowing in the hyperspace by reduction to points. A compact
/// `B` shadows when `f_0^k(B)` lies in the `eps`-neighbourhood of `A_k` and
/// comes within `eps` of every point of `A_k`. The first condition confines
/// `B` to the admissible set `Z`; the second only gets easier as `B` grows,
/// so the pseudo-orbit is shadowed exactly when `Z` itself works. With
/// `exact_end` the last image must equal `A_n`.
pub fn decide_hyper_shadowing(
    nds: &NdsSpec,
    orbit: &[FiniteCompact],
    eps: &Rational,
    exact_end: bool,
) -> Result<SetShadowDecision> {
    check_inputs(nds, orbit.len(), eps)?;
    if orbit.iter().any(|a| a.space() != Space::Interval) {
        return arg("shadowing needs interval sets");
    }
    let last = orbit.len() - 1;
    let constraints: Vec<IntervalUnion> = orbit
        .iter()
        .enumerate()
        .map(|(k, a)| {
            if exact_end && k == last {
                neighbourhood(a, &Rational::ZERO)
            } else {
                neighbourhood(a, eps)
            }
        })
        .collect();
    let admissible = pull_back(nds, &constraints);
    let mut image = admissible.clone();
    let mut shadowed = !admissible.is_empty();
    for (k, a) in orbit.iter().enumerate() {
        if !shadowed {
            break;
        }
        if k > 0 {
            image = nds.map_at(k - 1).image(&image);
        }
        let reach = if exact_end && k == last { Rational::ZERO } else { eps.clone() };
        shadowed = a
            .values()
            .iter()
            .all(|x| !image.intersect(&IntervalUnion::ball(x, &reach)).is_empty());
    }
    Ok(SetShadowDecision { shadowed, admissible })
}

/// Shadowing of a fuzzy pseudo-orbit under the levelwise metric, decided
/// level by level on the union of all thresholds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzyShadowDecision {
    pub shadowed: bool,
    /// `(alpha, admissible set)` per threshold; nested decreasing in alpha.
    pub levels: Vec<(Rational, IntervalUnion)>,
}

pub fn decide_fuzzy_shadowing(nds: &NdsSpec, orbit: &[PCFuzzy], eps: &Rational) -> Result<FuzzyShadowDecision> {
    check_inputs(nds, orbit.len(), eps)?;
    let mut alphas: Vec<Rational> = orbit.iter().flat_map(|u| u.thresholds().iter().cloned()).collect();
    alphas.sort();
    alphas.dedup();
    let mut levels = Vec::with_capacity(alphas.len());
    let mut shadowed = true;
    for alpha in alphas {
        let sets = orbit
            .iter()
            .map(|u| u.level_set(&alpha).cloned())
            .collect::<Result<Vec<_>>>()?;
        let d = decide_hyper_shadowing(nds, &sets, eps, false)?;
        shadowed &= d.shadowed;
        levels.push((alpha, d.admissible));
    }
    Ok(FuzzyShadowDecision { shadowed, levels })
}

/// A uniform rational in `(0, 1)` on a dyadic grid.
fn unit_open(rng: &mut ChaCha8Rng) -> Rational {
    const DEN: i64 = 1 << 20;
    Rational::ratio(rng.gen_range(1..DEN), DEN)
}

/// A `delta`-pseudo-orbit with `len + 1` points: a uniform start, then each
/// point is the true image plus a uniform error in `(-delta, delta)`,
/// clamped to `[0, 1]`.
pub fn random_pseudo_orbit(nds: &NdsSpec, len: usize, delta: &Rational, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let mut out = Vec::with_capacity(len + 1);
    out.push(Rational::ratio(rng.gen_range(0..=1 << 20), 1 << 20));
    for k in 0..len {
        let image = nds.map_at(k).eval_value(&out[k]);
        let u = &unit_open(rng) * &Rational::from_integer(2) - Rational::ONE;
        let next = (&image + &(&u * delta)).max(Rational::ZERO).min(Rational::ONE);
        out.push(next);
    }
    out
}

/// Per-`delta` outcome of a modulus estimate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModulusRow {
    pub delta: Rational,
    pub trials: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModulusEstimate {
    pub epsilon: Rational,
    /// Largest accepted `delta`, or zero when none was.
    pub delta: Rational,
    pub seed: u64,
    pub rows: Vec<ModulusRow>,
    /// A pseudo-orbit that was not shadowed at the smallest `delta`, when
    /// every `delta` failed.
    pub counterexample: Option<Vec<Rational>>,
}

/// Largest `delta` in `delta_grid` for which every sampled
/// `delta`-pseudo-orbit of `orbit_length` steps is `eps`-shadowed.
/// Trial `t` at grid index `i` draws from ChaCha8 stream `i * trials + t`
/// of `seed`, so the estimate does not depend on scheduling.
pub fn estimate_shadowing_modulus(
    nds: &NdsSpec,
    eps: &Rational,
    trials: usize,
    orbit_length: usize,
    delta_grid: &[Rational],
    seed: u64,
) -> Result<ModulusEstimate> {
    check_inputs(nds, orbit_length + 1, eps)?;
    if trials == 0 {
        return arg("at least one trial is needed");
    }
    if delta_grid.is_empty() || delta_grid.iter().any(|d| !d.is_positive()) {
        return arg("the delta grid must be nonempty and positive");
    }
    let mut rows = Vec::with_capacity(delta_grid.len());
    let mut best: Option<Rational> = None;
    let mut smallest_failure: Option<(Rational, Vec<Rational>)> = None;
    for (i, delta) in delta_grid.iter().enumerate() {
        let outcomes: Vec<Option<Vec<Rational>>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((i * trials + t) as u64);
                let orbit = random_pseudo_orbit(nds, orbit_length, delta, &mut rng);
                let d = decide_finite_shadowing(nds, &orbit, eps).expect("validated inputs");
                (!d.shadowed).then_some(orbit)
            })
            .collect();
        let failures = outcomes.iter().filter(|o| o.is_some()).count();
        if failures == 0 {
            if best.as_ref().is_none_or(|b| delta > b) {
                best = Some(delta.clone());
            }
        } else if smallest_failure.as_ref().is_none_or(|(d, _)| delta < d) {
            let orbit = outcomes.into_iter().flatten().next().expect("a failure");
            smallest_failure = Some((delta.clone(), orbit));
        }
        rows.push(ModulusRow {
            delta: delta.clone(),
            trials,
            failures,
        });
    }
    let counterexample = if best.is_none() {
        smallest_failure.map(|(_, o)| o)
    } else {
        None
    };
    Ok(ModulusEstimate {
        epsilon: eps.clone(),
        delta: best.unwrap_or(Rational::ZERO),
        seed,
        rows,
        counterexample,
    })
}

/// One length in a mixing-from-shadowing trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixingStep {
    pub k: usize,
    pub chain_found: bool,
    /// Leftmost point shadowing the chain.
    pub witness: Option<Rational>,
    /// `witness ∈ U` and `f_0^k(witness) ∈ V`.
    pub lands: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceVerdict {
    /// Every `k` from `verified_from` to the horizon lands.
    Verified,
    /// A chain of the largest length was found but its shadow missed.
    Failed,
    /// No chain of the largest length was found on the grid.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixingTrace {
    pub steps: Vec<MixingStep>,
    pub verified_from: Option<usize>,
    pub verdict: TraceVerdict,
}

/// Runs the argument "shadowing and chain mixing give mixing" for
/// `U = B(u, radius)` and `V = B(v, radius)` (open balls): for each
/// `k <= horizon`, finds a `delta`-chain from `u` to `v` of length `k` on a
/// grid of spacing `delta / 2`, shadows it within `eps`, and checks that the
/// witness starts in `U` and lands in `V` after `k` steps.
#[allow(clippy::too_many_arguments)]
pub fn mixing_from_shadowing(
    nds: &NdsSpec,
    eps: &Rational,
    delta: &Rational,
    u: &Rational,
    v: &Rational,
    radius: &Rational,
    horizon: usize,
) -> Result<MixingTrace> {
    check_inputs(nds, 1, eps)?;
    if !delta.is_positive() || !radius.is_positive() {
        return arg("delta and radius must be positive");
    }
    if horizon == 0 {
        return arg("the horizon must be at least 1");
    }
    check_orbit(&[u.clone(), v.clone()])?;
    let sys = SystemHandle::base(nds.clone());
    let steps_per_unit = (&Rational::from_integer(2) / delta).floor_i64().unwrap_or(i64::MAX).max(1);
    let grid: Vec<State> = Space::Interval
        .grid(steps_per_unit as usize + 1)
        .into_iter()
        .map(State::Point)
        .collect();
    let lengths: Vec<usize> = (1..=horizon).collect();
    let chains = chains_for_lengths(&sys, &State::Point(u.clone()), &State::Point(v.clone()), delta, &lengths, &grid);
    let mut steps = Vec::with_capacity(horizon);
    for (k, chain) in lengths.iter().zip(chains) {
        let Some(chain) = chain else {
            steps.push(MixingStep {
                k: *k,
                chain_found: false,
                witness: None,
                lands: false,
            });
            continue;
        };
        let orbit: Vec<Rational> = chain
            .states()
            .iter()
            .map(|s| match s {
                State::Point(x) => x.clone(),
                _ => unreachable!("base chains hold points"),
            })
            .collect();
        let witness = decide_finite_shadowing(nds, &orbit, eps)?.witness;
        let lands = witness.as_ref().is_some_and(|z| {
            let end = nds.orbit_values(z, 0, *k).pop().expect("nonempty orbit");
            (z - u).abs() < *radius && (&end - v).abs() < *radius
        });
        steps.push(MixingStep {
            k: *k,
            chain_found: true,
            witness,
            lands,
        });
    }
    let tail = steps.iter().rev().take_while(|s| s.lands).count();
    let verified_from = (tail > 0).then(|| horizon - tail + 1);
    let last = &steps[horizon - 1];
    let verdict = if last.lands {
        TraceVerdict::Verified
    } else if last.chain_found {
        TraceVerdict::Failed
    } else {
        TraceVerdict::Inconclusive
    };
    Ok(MixingTrace {
        steps,
        verified_from,
        verdict,
    })
}
