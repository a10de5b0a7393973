//! Sensitivity-time sets at a finite horizon, Furstenberg-family predicates
//! and the containments between base, hyperspace and fuzzy time sets.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{fuzzy_system, hyper_system, FuzzyMetric, State, SystemHandle};
use crate::error::{arg, Result};
use crate::fuzzy::PCFuzzy;
use crate::hyperspace::{Arc, FiniteCompact};
use crate::maps::{NdsSpec, ProductPoint, Space};
use crate::rational::Rational;

/// A subset of `{1, ..., horizon}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TimeSet {
    horizon: usize,
    members: Vec<usize>,
}

impl TimeSet {
    pub fn new(horizon: usize, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.first() == Some(&0) || members.last().is_some_and(|&n| n > horizon) {
            return arg(format!("time set members must lie in 1..={horizon}"));
        }
        Ok(TimeSet { horizon, members })
    }

    pub fn empty(horizon: usize) -> Self {
        TimeSet {
            horizon,
            members: Vec::new(),
        }
    }

    pub fn full(horizon: usize) -> Self {
        TimeSet {
            horizon,
            members: (1..=horizon).collect(),
        }
    }

    fn from_flags(flags: &[bool]) -> Self {
        TimeSet {
            horizon: flags.len(),
            members: flags.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| i + 1).collect(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: usize) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    pub fn missing(&self) -> usize {
        self.horizon - self.members.len()
    }

    /// Largest gap between consecutive members, counting `0` and
    /// `horizon + 1` as members.
    pub fn max_gap(&self) -> usize {
        std::iter::once(0)
            .chain(self.members.iter().copied())
            .chain(std::iter::once(self.horizon + 1))
            .collect::<Vec<_>>()
            .windows(2)
            .map(|w| w[1] - w[0])
            .max()
            .expect("two sentinels")
    }

    pub fn intersect(&self, other: &TimeSet) -> TimeSet {
        let horizon = self.horizon.min(other.horizon);
        TimeSet {
            horizon,
            members: self
                .members
                .iter()
                .copied()
                .filter(|n| *n <= horizon && other.contains(*n))
                .collect(),
        }
    }

    pub fn is_subset_of(&self, other: &TimeSet) -> bool {
        self.members.iter().all(|n| other.contains(*n))
    }

    /// Members of `self` missing from `other`.
    pub fn difference(&self, other: &TimeSet) -> Vec<usize> {
        self.members.iter().copied().filter(|n| !other.contains(*n)).collect()
    }
}

/// A Furstenberg family read at a finite horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FamilyPredicate {
    /// At least `min_count` members.
    Infinite { min_count: usize },
    /// At most `max_missing` times absent.
    Cofinite { max_missing: usize },
    /// No gap, including the gaps at both ends, longer than `max_gap`.
    Syndetic { max_gap: usize },
    /// Every time present.
    Full,
}

impl FamilyPredicate {
    pub fn validate(&self) -> Result<()> {
        match self {
            FamilyPredicate::Infinite { min_count: 0 } => arg("min_count must be positive"),
            FamilyPredicate::Syndetic { max_gap: 0 } => arg("max_gap must be positive"),
            _ => Ok(()),
        }
    }
}

pub fn family_member(family: &FamilyPredicate, ts: &TimeSet) -> bool {
    match *family {
        FamilyPredicate::Infinite { min_count } => ts.len() >= min_count,
        FamilyPredicate::Cofinite { max_missing } => ts.missing() <= max_missing,
        FamilyPredicate::Syndetic { max_gap } => ts.max_gap() <= max_gap,
        FamilyPredicate::Full => ts.missing() == 0,
    }
}

/// How the open `eps`-ball around a state is sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Sampling {
    /// Deterministic low-discrepancy samples. Sample sets for smaller counts
    /// are prefixes of those for larger counts.
    pub grid: usize,
    /// Seeded uniform samples added to the grid.
    pub random: usize,
    pub seed: u64,
}

impl Sampling {
    pub fn grid(grid: usize) -> Self {
        Sampling {
            grid,
            random: 0,
            seed: 0,
        }
    }

    fn total(&self) -> usize {
        self.grid + self.random
    }
}

const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `j` in base `b`, in `(0, 1)` for `j >= 1`.
fn radical_inverse(mut j: u64, b: u64) -> Rational {
    let mut num = 0i64;
    let mut den = 1i64;
    while j > 0 {
        num = num * b as i64 + (j % b) as i64;
        den *= b as i64;
        j /= b;
    }
    Rational::ratio(num, den)
}

/// Offsets in `(-1, 1)`, one per coordinate, for every sample.
fn unit_offsets(sampling: &Sampling, coords: usize) -> Vec<Vec<Rational>> {
    let two = Rational::from_integer(2);
    let mut out: Vec<Vec<Rational>> = (1..=sampling.grid as u64)
        .map(|j| {
            (0..coords)
                .map(|i| {
                    // Coordinates past the prime list reuse a base at a
                    // shifted index so they do not move in lockstep.
                    let base = BASES[i % BASES.len()];
                    let shift = (i / BASES.len()) as u64 * 7919;
                    &(&two * &radical_inverse(j + shift, base)) - &Rational::ONE
                })
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    const DEN: i64 = 1 << 20;
    for _ in 0..sampling.random {
        out.push(
            (0..coords)
                .map(|_| Rational::ratio(rng.gen_range(1 - DEN..DEN), DEN))
                .collect(),
        );
    }
    out
}

fn shift(space: Space, x: &Rational, by: &Rational) -> Rational {
    let y = x + by;
    match space {
        Space::Interval => y.max(Rational::ZERO).min(Rational::ONE),
        Space::Circle => y.fract(),
    }
}

/// Distinct points a state is built from; each is moved independently.
fn anchor_points(s: &State) -> Vec<Rational> {
    match s {
        State::Point(x) => vec![x.clone()],
        State::Product(p) => p.coords().to_vec(),
        State::Compact(k) => k.values().to_vec(),
        State::Fuzzy(u) => u.support().values().to_vec(),
        State::Arc(a) => vec![a.start().clone()],
    }
}

/// Moves the anchors of `s` to `moved` (same order as [`anchor_points`]).
fn rebuild(space: Space, s: &State, anchors: &[Rational], moved: &[Rational]) -> Result<State> {
    let lookup: BTreeMap<&Rational, &Rational> = anchors.iter().zip(moved).collect();
    let map_set = |k: &FiniteCompact| FiniteCompact::new(space, k.values().iter().map(|v| lookup[v].clone()).collect());
    Ok(match s {
        State::Point(_) => State::Point(moved[0].clone()),
        State::Product(_) => State::Product(ProductPoint::new(space, moved.to_vec())?),
        State::Compact(k) => State::Compact(map_set(k)?),
        State::Fuzzy(u) => {
            let levels = u.levels().iter().map(map_set).collect::<Result<Vec<_>>>()?;
            State::Fuzzy(PCFuzzy::new(u.thresholds().to_vec(), levels)?.canonical())
        }
        State::Arc(a) => {
            let by = &moved[0] - &anchors[0];
            State::Arc(Arc::new(shift(space, a.start(), &by), shift(space, a.end(), &by), a.is_full())?)
        }
    })
}

/// States of the open `eps`-ball around `x`: each anchor point moves by
/// its own offset of size below `eps`, and every sample is re-checked
/// exactly against the ball.
pub fn sample_ball(sys: &SystemHandle, x: &State, eps: &Rational, sampling: &Sampling) -> Result<Vec<State>> {
    let anchors = anchor_points(x);
    let space = sys.space();
    let mut out = Vec::with_capacity(sampling.total());
    for offsets in unit_offsets(sampling, anchors.len()) {
        let moved: Vec<Rational> = anchors
            .iter()
            .zip(&offsets)
            .map(|(a, o)| shift(space, a, &(o * eps)))
            .collect();
        let y = rebuild(space, x, &anchors, &moved)?;
        if sys.distance(x, &y) < *eps {
            out.push(y);
        }
    }
    Ok(out)
}

fn check_params(eps: &Rational, delta: &Rational, horizon: usize) -> Result<()> {
    if !eps.is_positive() || !delta.is_positive() {
        return arg("epsilon and delta must be positive");
    }
    if horizon == 0 {
        return arg("the horizon must be at least 1");
    }
    Ok(())
}

/// Times `n` at which some given neighbour `y` has
/// `d(f_0^n(x), f_0^n(y)) > delta`.
pub fn separation_times(sys: &SystemHandle, x: &State, neighbours: &[State], delta: &Rational, horizon: usize) -> TimeSet {
    let base = sys.orbit(0, x, horizon + 1);
    let flags = neighbours
        .par_iter()
        .map(|y| {
            let orbit = sys.orbit(0, y, horizon + 1);
            (1..=horizon).map(|n| !sys.within(&base[n], &orbit[n], delta)).collect::<Vec<bool>>()
        })
        .reduce(
            || vec![false; horizon],
            |a, b| a.iter().zip(&b).map(|(p, q)| *p || *q).collect(),
        );
    TimeSet::from_flags(&flags)
}

/// The sampled part of `N(x, eps, delta)` up to `horizon`. Every member is
/// certified by an explicit neighbour.
pub fn sensitivity_times(
    sys: &SystemHandle,
    x: &State,
    eps: &Rational,
    delta: &Rational,
    horizon: usize,
    sampling: &Sampling,
) -> Result<TimeSet> {
    check_params(eps, delta, horizon)?;
    if sampling.total() == 0 {
        return arg("at least one neighbourhood sample is needed");
    }
    let neighbours = sample_ball(sys, x, eps, sampling)?;
    Ok(separation_times(sys, x, &neighbours, delta, horizon))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiSensitivity {
    pub family: FamilyPredicate,
    pub horizon: usize,
    pub per_point: Vec<TimeSet>,
    pub intersection: TimeSet,
    pub member: bool,
}

/// Whether the intersection of the time sets of `points` lies in `family`.
#[allow(clippy::too_many_arguments)]
pub fn check_multi_f_sensitive(
    sys: &SystemHandle,
    points: &[State],
    eps: &Rational,
    delta: &Rational,
    family: &FamilyPredicate,
    horizon: usize,
    sampling: &Sampling,
) -> Result<MultiSensitivity> {
    family.validate()?;
    if points.is_empty() {
        return arg("at least one point is needed");
    }
    let per_point = points
        .iter()
        .map(|x| sensitivity_times(sys, x, eps, delta, horizon, sampling))
        .collect::<Result<Vec<_>>>()?;
    let intersection = per_point
        .iter()
        .skip(1)
        .fold(per_point[0].clone(), |acc, t| acc.intersect(t));
    Ok(MultiSensitivity {
        family: *family,
        horizon,
        member: family_member(family, &intersection),
        per_point,
        intersection,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Containment {
    pub holds: bool,
    /// Times in the smaller set but missing from the larger one.
    pub violations: Vec<usize>,
}

impl Containment {
    fn of(small: &TimeSet, large: &TimeSet) -> Self {
        let violations = small.difference(large);
        Containment {
            holds: violations.is_empty(),
            violations,
        }
    }
}

/// Time sets around a compact `K` and a fuzzy set `u`, and the two
/// containments between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedContainments {
    pub horizon: usize,
    /// Base time sets at each point of `K`.
    pub base: Vec<TimeSet>,
    /// `N_D(K, eps, delta)` in the hyperspace.
    pub hyper: TimeSet,
    /// `N_dinf(chi_K, eps, delta)`.
    pub fuzzy_chi: TimeSet,
    /// `N_D([u]_1, eps / 4, delta)`.
    pub hyper_top: TimeSet,
    /// `N_dinf(u, eps, delta)`.
    pub fuzzy: TimeSet,
    /// `N_dinf(chi_K) ⊆ N_D(K)`.
    pub chi_in_hyper: Containment,
    /// `N_D([u]_1, eps / 4) ⊆ N_dinf(u, eps)`.
    pub top_in_fuzzy: Containment,
}

/// Lifts a neighbour `b` of `[u]_1` to a neighbour of `u`: the points of
/// `[u]_1` move as in `b`, the rest of the support stays put.
fn lift_top(space: Space, u: &PCFuzzy, top_moved: &[Rational]) -> Result<PCFuzzy> {
    let top = u.top().values();
    let support = u.support().values();
    let moved: Vec<Rational> = support
        .iter()
        .map(|p| match top.binary_search(p) {
            Ok(i) => top_moved[i].clone(),
            Err(_) => p.clone(),
        })
        .collect();
    match rebuild(space, &State::Fuzzy(u.clone()), support, &moved)? {
        State::Fuzzy(v) => Ok(v),
        _ => unreachable!("fuzzy states rebuild to fuzzy states"),
    }
}

/// Samples both sides of each containment and compares them. The fuzzy
/// sample around `u` contains, besides its own ball samples, the lift of
/// every hyperspace sample around `[u]_1`, which is how a separating
/// neighbour of `[u]_1` yields one of `u`.
pub fn induced_containments(
    nds: &NdsSpec,
    k: &FiniteCompact,
    u: &PCFuzzy,
    eps: &Rational,
    delta: &Rational,
    horizon: usize,
    sampling: &Sampling,
) -> Result<InducedContainments> {
    check_params(eps, delta, horizon)?;
    if sampling.total() == 0 {
        return arg("at least one neighbourhood sample is needed");
    }
    let space = nds.space();
    if k.space() != space || u.space() != space {
        return arg("K and u must live in the space of the maps");
    }
    let base_sys = SystemHandle::base(nds.clone());
    let base = k
        .values()
        .iter()
        .map(|x| sensitivity_times(&base_sys, &State::Point(x.clone()), eps, delta, horizon, sampling))
        .collect::<Result<Vec<_>>>()?;

    let hyper_sys = hyper_system(nds, k.len().max(u.top().len()))?;
    let k_state = State::Compact(k.clone());
    let k_ball = sample_ball(&hyper_sys, &k_state, eps, sampling)?;
    let hyper = separation_times(&hyper_sys, &k_state, &k_ball, delta, horizon);

    let levels = u.thresholds().len();
    let fuzzy_sys = fuzzy_system(nds, levels, u.support().len().max(k.len()), FuzzyMetric::Levelwise)?;
    let chi_state = State::Fuzzy(PCFuzzy::chi(k));
    let chi_ball = sample_ball(&fuzzy_sys, &chi_state, eps, sampling)?;
    let fuzzy_chi = separation_times(&fuzzy_sys, &chi_state, &chi_ball, delta, horizon);

    let quarter = eps / &Rational::from_integer(4);
    let top_state = State::Compact(u.top().clone());
    let top_ball = sample_ball(&hyper_sys, &top_state, &quarter, sampling)?;
    let hyper_top = separation_times(&hyper_sys, &top_state, &top_ball, delta, horizon);

    let u_state = State::Fuzzy(u.clone());
    let mut u_ball = sample_ball(&fuzzy_sys, &u_state, eps, sampling)?;
    // Ball samples are rebuilt in the same anchor order, so the moved top
    // points are recovered by re-running the offsets.
    let top = u.top().values();
    for offsets in unit_offsets(sampling, top.len()) {
        let moved: Vec<Rational> = top
            .iter()
            .zip(&offsets)
            .map(|(a, o)| shift(space, a, &(o * &quarter)))
            .collect();
        let v = State::Fuzzy(lift_top(space, u, &moved)?);
        if fuzzy_sys.distance(&u_state, &v) < *eps {
            u_ball.push(v);
        }
    }
    let fuzzy = separation_times(&fuzzy_sys, &u_state, &u_ball, delta, horizon);

    Ok(InducedContainments {
        horizon,
        chi_in_hyper: Containment::of(&fuzzy_chi, &hyper),
        top_in_fuzzy: Containment::of(&hyper_top, &fuzzy),
        base,
        hyper,
        fuzzy_chi,
        hyper_top,
        fuzzy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::power_system;
    use crate::maps::{identity, tent, PLMap, Tail};
    use crate::rational::q;
    use proptest::prelude::*;

    fn tent_sys() -> SystemHandle {
        SystemHandle::base(NdsSpec::constant(tent()))
    }

    fn ts(horizon: usize, members: impl IntoIterator<Item = usize>) -> TimeSet {
        TimeSet::new(horizon, members.into_iter().collect()).unwrap()
    }

    #[test]
    fn family_examples() {
        let most = ts(20, (1..=20).filter(|n| *n != 3));
        assert!(family_member(&FamilyPredicate::Cofinite { max_missing: 1 }, &most));
        assert!(!family_member(&FamilyPredicate::Full, &most));
        let evens = ts(20, (2..=20).step_by(2));
        assert!(family_member(&FamilyPredicate::Syndetic { max_gap: 2 }, &evens));
        assert!(!family_member(&FamilyPredicate::Syndetic { max_gap: 1 }, &evens));
        assert!(!family_member(&FamilyPredicate::Infinite { min_count: 10 }, &ts(20, 1..=9)));
        assert!(family_member(&FamilyPredicate::Full, &TimeSet::full(5)));
        assert_eq!(ts(10, [4, 5]).max_gap(), 6);
        assert!(TimeSet::new(5, vec![0]).is_err());
        assert!(TimeSet::new(5, vec![6]).is_err());
        assert!(FamilyPredicate::Syndetic { max_gap: 0 }.validate().is_err());
    }

    #[test]
    fn identity_never_separates() {
        let sys = SystemHandle::base(NdsSpec::constant(identity(Space::Interval)));
        // Neighbours start closer than eps and never move apart, so no time
        // separates beyond delta = eps.
        let t = sensitivity_times(&sys, &State::Point(q(1, 3)), &q(1, 10), &q(1, 10), 20, &Sampling::grid(50)).unwrap();
        assert!(t.is_empty());
        let m = check_multi_f_sensitive(
            &sys,
            &[State::Point(q(1, 3))],
            &q(1, 10),
            &q(1, 10),
            &FamilyPredicate::Infinite { min_count: 1 },
            20,
            &Sampling::grid(50),
        )
        .unwrap();
        assert!(!m.member);
    }

    #[test]
    fn tent_at_zero() {
        let t = sensitivity_times(&tent_sys(), &State::Point(q(0, 1)), &q(1, 10), &q(2, 5), 20, &Sampling::grid(1000)).unwrap();
        // Neighbours y in (0, 1/10) sample every dyadic scale, so from n = 3
        // on some T^n(y) lies in (2/5, 3/5] or beyond.
        let brute: Vec<usize> = (1..=20)
            .filter(|&n| {
                (1..1000).any(|j| {
                    let y = q(j, 10_000);
                    NdsSpec::constant(tent()).orbit_values(&y, 0, n)[n] > q(2, 5)
                })
            })
            .collect();
        assert_eq!(t.members(), &brute[..]);
        assert!((3..=20).all(|n| t.contains(n)));
        assert!(!t.contains(1));
    }

    #[test]
    fn constant_tail_collapses() {
        let flat = PLMap::interval(vec![(q(0, 1), q(1, 2)), (q(1, 1), q(1, 2))]).unwrap();
        let nds = NdsSpec::new(Space::Interval, vec![tent(), tent()], Tail::Constant(flat)).unwrap();
        let sys = SystemHandle::base(nds);
        let t = sensitivity_times(&sys, &State::Point(q(1, 2)), &q(1, 5), &q(1, 10), 10, &Sampling::grid(200)).unwrap();
        assert_eq!(t.members(), &[1, 2]);
    }

    #[test]
    fn samples_stay_in_the_open_ball() {
        let sys = power_system(&NdsSpec::constant(tent()), 3).unwrap();
        let x = State::Product(ProductPoint::new(Space::Interval, vec![q(0, 1), q(1, 2), q(1, 1)]).unwrap());
        let eps = q(1, 8);
        let sampling = Sampling {
            grid: 64,
            random: 64,
            seed: 9,
        };
        let ys = sample_ball(&sys, &x, &eps, &sampling).unwrap();
        assert_eq!(ys.len(), 128);
        assert!(ys.iter().all(|y| sys.distance(&x, y) < eps));
    }

    #[test]
    fn multi_reduces_to_single() {
        let x = State::Point(q(1, 3));
        let family = FamilyPredicate::Infinite { min_count: 5 };
        let single = sensitivity_times(&tent_sys(), &x, &q(1, 10), &q(1, 4), 30, &Sampling::grid(100)).unwrap();
        let multi = check_multi_f_sensitive(&tent_sys(), &[x], &q(1, 10), &q(1, 4), &family, 30, &Sampling::grid(100)).unwrap();
        assert_eq!(multi.intersection, single);
        assert_eq!(multi.member, family_member(&family, &single));
    }

    #[test]
    fn tent_three_points_infinite() {
        let points: Vec<State> = [q(1, 7), q(2, 5), q(9, 10)].into_iter().map(State::Point).collect();
        let m = check_multi_f_sensitive(
            &tent_sys(),
            &points,
            &q(1, 10),
            &q(1, 4),
            &FamilyPredicate::Infinite { min_count: 20 },
            40,
            &Sampling::grid(200),
        )
        .unwrap();
        assert!(m.member);
        assert!(m.per_point.iter().all(|t| m.intersection.is_subset_of(t)));
    }

    #[test]
    fn singleton_agreement() {
        let nds = NdsSpec::constant(tent());
        let (eps, delta, sampling) = (q(1, 20), q(1, 3), Sampling::grid(64));
        for x in [q(0, 1), q(1, 3), q(5, 7)] {
            let base = sensitivity_times(&SystemHandle::base(nds.clone()), &State::Point(x.clone()), &eps, &delta, 25, &sampling).unwrap();
            let single = FiniteCompact::new(Space::Interval, vec![x.clone()]).unwrap();
            let hyper = sensitivity_times(&hyper_system(&nds, 1).unwrap(), &State::Compact(single.clone()), &eps, &delta, 25, &sampling).unwrap();
            let fsys = fuzzy_system(&nds, 1, 1, FuzzyMetric::Levelwise).unwrap();
            let fuzzy = sensitivity_times(&fsys, &State::Fuzzy(PCFuzzy::chi(&single)), &eps, &delta, 25, &sampling).unwrap();
            assert_eq!(base, hyper);
            assert_eq!(base, fuzzy);
        }
    }

    #[test]
    fn lemma_containments() {
        let nds = NdsSpec::constant(tent());
        let k = FiniteCompact::new(Space::Interval, vec![q(0, 1), q(1, 2)]).unwrap();
        let u = PCFuzzy::from_values(
            Space::Interval,
            vec![q(1, 3), q(1, 1)],
            vec![vec![q(1, 5), q(3, 5), q(9, 10)], vec![q(3, 5)]],
        )
        .unwrap();
        let r = induced_containments(&nds, &k, &u, &q(1, 10), &q(1, 5), 30, &Sampling::grid(40)).unwrap();
        assert!(r.chi_in_hyper.holds && r.top_in_fuzzy.holds, "{r:?}");
        assert!(!r.hyper_top.is_empty());
        let id = induced_containments(
            &NdsSpec::constant(identity(Space::Interval)),
            &k,
            &u,
            &q(1, 10),
            &q(1, 5),
            10,
            &Sampling::grid(20),
        )
        .unwrap();
        assert!(id.hyper.is_empty() && id.fuzzy.is_empty() && id.base.iter().all(TimeSet::is_empty));
        let single = FiniteCompact::new(Space::Interval, vec![q(1, 3)]).unwrap();
        let s = induced_containments(&nds, &single, &PCFuzzy::chi(&single), &q(1, 10), &q(1, 5), 20, &Sampling::grid(30)).unwrap();
        assert_eq!(s.base[0], s.hyper);
        assert_eq!(s.hyper, s.fuzzy_chi);
    }

    #[test]
    fn hereditary_upwards_exhaustive() {
        let h = 12;
        let families = [
            FamilyPredicate::Infinite { min_count: 1 },
            FamilyPredicate::Infinite { min_count: 6 },
            FamilyPredicate::Cofinite { max_missing: 0 },
            FamilyPredicate::Cofinite { max_missing: 4 },
            FamilyPredicate::Syndetic { max_gap: 1 },
            FamilyPredicate::Syndetic { max_gap: 3 },
            FamilyPredicate::Full,
        ];
        let set = |mask: u32| TimeSet::from_flags(&(0..h).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>());
        for mask in 0u32..1 << h {
            let s = set(mask);
            for f in &families {
                if family_member(f, &s) {
                    for bit in 0..h {
                        assert!(family_member(f, &set(mask | 1 << bit)));
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn cofinite_budgets_add(a in 0u32..1 << 12, b in 0u32..1 << 12, m1 in 0usize..12, m2 in 0usize..12) {
            let set = |mask: u32| TimeSet::from_flags(&(0..12).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>());
            let (s, t) = (set(a), set(b));
            let f = |m| FamilyPredicate::Cofinite { max_missing: m };
            if family_member(&f(m1), &s) && family_member(&f(m2), &t) {
                prop_assert!(family_member(&f(m1 + m2), &s.intersect(&t)));
            }
        }

        #[test]
        fn more_samples_never_remove(x in 0i64..=100, small in 1usize..40, extra in 0usize..40) {
            let x = State::Point(q(x, 100));
            let few = sensitivity_times(&tent_sys(), &x, &q(1, 20), &q(1, 4), 15, &Sampling::grid(small)).unwrap();
            let many = sensitivity_times(&tent_sys(), &x, &q(1, 20), &q(1, 4), 15, &Sampling::grid(small + extra)).unwrap();
            prop_assert!(few.is_subset_of(&many));
        }
    }
}
