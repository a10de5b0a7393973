use std::fmt;

use serde::{Deserialize, Serialize};

use super::interval_union::IntervalUnion;
use super::space::{Point, Space};
use crate::error::{arg, Error, Result};
use crate::rational::Rational;

/// An exact piecewise-linear self-map of the interval or the circle.
///
/// Interval maps store node values in `[0, 1]`. Circle maps store a lift:
/// node values are real numbers with `Y_r = Y_0 + degree`, normalized so
/// that `Y_0` lies in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMap", into = "RawMap")]
pub struct PLMap {
    space: Space,
    nodes: Vec<(Rational, Rational)>,
    slopes: Vec<Rational>,
    degree: i64,
}

#[derive(Serialize, Deserialize)]
struct RawMap {
    space: Space,
    nodes: Vec<(Rational, Rational)>,
}

impl TryFrom<RawMap> for PLMap {
    type Error = Error;
    fn try_from(raw: RawMap) -> Result<Self> {
        PLMap::new(raw.space, raw.nodes)
    }
}

impl From<PLMap> for RawMap {
    fn from(map: PLMap) -> Self {
        RawMap {
            space: map.space,
            nodes: map.nodes,
        }
    }
}

impl PLMap {
    pub fn new(space: Space, nodes: Vec<(Rational, Rational)>) -> Result<Self> {
        match space {
            Space::Interval => Self::interval(nodes),
            Space::Circle => Self::circle(nodes),
        }
    }

    /// Connect-the-dots map of `[0, 1]`.
    pub fn interval(nodes: Vec<(Rational, Rational)>) -> Result<Self> {
        check_abscissae(&nodes)?;
        if let Some((_, y)) = nodes.iter().find(|(_, y)| !y.in_unit_interval()) {
            return arg(format!("interval map value {y} leaves [0, 1]"));
        }
        Ok(Self::assemble(Space::Interval, nodes, 0))
    }

    /// Circle map from lift nodes; `Y_r - Y_0` must be an integer.
    pub fn circle(mut nodes: Vec<(Rational, Rational)>) -> Result<Self> {
        check_abscissae(&nodes)?;
        let span = &nodes[nodes.len() - 1].1 - &nodes[0].1;
        let degree = match (span.is_integer(), span.floor_i64()) {
            (true, Some(d)) => d,
            _ => return arg(format!("lift does not close up: Y_r - Y_0 = {span}")),
        };
        let shift = nodes[0].1.floor();
        if !shift.is_zero() {
            for (_, y) in &mut nodes {
                *y = &*y - &shift;
            }
        }
        Ok(Self::assemble(Space::Circle, nodes, degree))
    }

    fn assemble(space: Space, nodes: Vec<(Rational, Rational)>, degree: i64) -> Self {
        let slopes = nodes
            .windows(2)
            .map(|w| &(&w[1].1 - &w[0].1) / &(&w[1].0 - &w[0].0))
            .collect();
        PLMap {
            space,
            nodes,
            slopes,
            degree,
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn nodes(&self) -> &[(Rational, Rational)] {
        &self.nodes
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    /// Number of linear pieces.
    pub fn pieces(&self) -> usize {
        self.slopes.len()
    }

    /// Degree of a circle map; `0` for interval maps.
    pub fn degree(&self) -> i64 {
        self.degree
    }

    fn segment(&self, x: &Rational) -> usize {
        let idx = self.nodes.partition_point(|(xi, _)| xi <= x);
        idx.clamp(1, self.slopes.len()) - 1
    }

    fn interp(&self, i: usize, x: &Rational) -> Rational {
        let (xi, yi) = &self.nodes[i];
        if x == xi {
            return yi.clone();
        }
        yi + &(&self.slopes[i] * &(x - xi))
    }

    /// Evaluates at a point of the map's space.
    pub fn eval(&self, x: &Point) -> Result<Point> {
        if x.space() != self.space {
            return arg(format!(
                "{} map applied to a {} point",
                self.space,
                x.space()
            ));
        }
        Ok(Point::from_normalized(self.space, self.eval_value(x.value())))
    }

    /// Evaluates a value already in normal form for the map's space.
    pub fn eval_value(&self, x: &Rational) -> Rational {
        let y = self.interp(self.segment(x), x);
        match self.space {
            Space::Interval => y,
            Space::Circle => y.fract(),
        }
    }

    /// Value of the lift at any real `x`; the map itself on the interval.
    pub fn lift_eval(&self, x: &Rational) -> Rational {
        match self.space {
            Space::Interval => self.interp(self.segment(x), x),
            Space::Circle => {
                let k = x.floor();
                let y = self.interp(self.segment(&(x - &k)), &(x - &k));
                if self.degree == 0 || k.is_zero() {
                    y
                } else {
                    &y + &(&k * &Rational::from_integer(self.degree))
                }
            }
        }
    }

    /// Degree-one circle map with a non-decreasing lift.
    pub fn is_orientation_preserving(&self) -> bool {
        self.space == Space::Circle
            && self.degree == 1
            && self.slopes.iter().all(|s| !s.is_negative())
    }

    /// Number of maximal monotone pieces; flat pieces join their neighbours.
    pub fn laps(&self) -> usize {
        let mut laps = 1;
        let mut last = 0i8;
        for s in &self.slopes {
            let sign = if s.is_positive() {
                1
            } else if s.is_negative() {
                -1
            } else {
                0
            };
            if sign != 0 {
                if last != 0 && sign != last {
                    laps += 1;
                }
                last = sign;
            }
        }
        laps
    }

    /// Lift values over `[lo, hi] ⊂ [0, 1]` as a closed range.
    fn lifted_range(&self, lo: &Rational, hi: &Rational) -> Vec<(Rational, Rational)> {
        let first = self.segment(lo);
        let last = self.segment(hi);
        let mut out = Vec::with_capacity(last - first + 1);
        for i in first..=last {
            let a = if i == first { lo.clone() } else { self.nodes[i].0.clone() };
            let b = if i == last { hi.clone() } else { self.nodes[i + 1].0.clone() };
            let (ya, yb) = (self.interp(i, &a), self.interp(i, &b));
            out.push(if ya <= yb { (ya, yb) } else { (yb, ya) });
        }
        out
    }

    /// Exact image of a union of intervals.
    pub fn image(&self, u: &IntervalUnion) -> IntervalUnion {
        let mut pieces = Vec::new();
        for (lo, hi) in u.intervals() {
            pieces.extend(self.lifted_range(lo, hi));
        }
        match self.space {
            Space::Interval => IntervalUnion::normalized(pieces),
            Space::Circle => project_to_circle(pieces),
        }
    }

    /// Exact preimage of a union of intervals.
    pub fn preimage(&self, u: &IntervalUnion) -> IntervalUnion {
        if u.is_empty() {
            return IntervalUnion::empty();
        }
        let mut out = Vec::new();
        for (i, slope) in self.slopes.iter().enumerate() {
            let (x0, y0) = &self.nodes[i];
            let (x1, y1) = &self.nodes[i + 1];
            let (ymin, ymax) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
            let shifts = match self.space {
                Space::Interval => 0..=0,
                Space::Circle => {
                    let lo = ymin.floor_i64().unwrap_or(0) - 1;
                    let hi = ymax.floor_i64().unwrap_or(0);
                    lo..=hi
                }
            };
            for k in shifts {
                let k = Rational::from_integer(k);
                for (lo, hi) in u.intervals() {
                    let lo = (lo + &k).max(ymin.clone());
                    let hi = (hi + &k).min(ymax.clone());
                    if lo > hi {
                        continue;
                    }
                    if slope.is_zero() {
                        out.push((x0.clone(), x1.clone()));
                        continue;
                    }
                    let a = x0 + &(&(&lo - y0) / slope);
                    let b = x0 + &(&(&hi - y0) / slope);
                    out.push(if a <= b { (a, b) } else { (b, a) });
                }
            }
        }
        let pre = IntervalUnion::normalized(out);
        match self.space {
            Space::Interval => pre,
            Space::Circle => close_circle(pre),
        }
    }

    /// `self ∘ inner`, computed exactly on the merged breakpoints.
    pub fn compose(&self, inner: &PLMap) -> Result<PLMap> {
        if self.space != inner.space {
            return arg("cannot compose maps on different spaces");
        }
        let mut xs: Vec<Rational> = inner.nodes.iter().map(|(x, _)| x.clone()).collect();
        for (i, slope) in inner.slopes.iter().enumerate() {
            if slope.is_zero() {
                continue;
            }
            let (x0, y0) = &inner.nodes[i];
            let (_, y1) = &inner.nodes[i + 1];
            let (ymin, ymax) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
            let (klo, khi) = match self.space {
                Space::Interval => (0, 0),
                Space::Circle => (
                    ymin.floor_i64().unwrap_or(0),
                    ymax.floor_i64().unwrap_or(0),
                ),
            };
            for k in klo..=khi {
                let k = Rational::from_integer(k);
                for (xj, _) in &self.nodes {
                    let target = xj + &k;
                    if &target > ymin && &target < ymax {
                        xs.push(x0 + &(&(&target - y0) / slope));
                    }
                }
            }
        }
        xs.sort();
        xs.dedup();
        let nodes = xs
            .into_iter()
            .map(|x| {
                let y = self.lift_eval(&inner.lift_eval(&x));
                (x, y)
            })
            .collect();
        Ok(Self::new(self.space, nodes)?.simplified())
    }

    /// Drops nodes interior to a straight piece.
    pub fn simplified(&self) -> PLMap {
        let mut nodes = vec![self.nodes[0].clone()];
        for i in 1..self.slopes.len() {
            if self.slopes[i] != self.slopes[i - 1] {
                nodes.push(self.nodes[i].clone());
            }
        }
        nodes.push(self.nodes[self.nodes.len() - 1].clone());
        Self::assemble(self.space, nodes, self.degree)
    }

    /// Exact `sup_x d(f(x), g(x))`.
    pub fn uniform_distance(&self, other: &PLMap) -> Result<Rational> {
        if self.space != other.space {
            return arg("uniform distance between maps on different spaces");
        }
        let mut xs: Vec<&Rational> = self
            .nodes
            .iter()
            .chain(&other.nodes)
            .map(|(x, _)| x)
            .collect();
        xs.sort();
        xs.dedup();
        let diff: Vec<Rational> = xs
            .iter()
            .map(|x| &self.lift_eval(x) - &other.lift_eval(x))
            .collect();
        let best = match self.space {
            Space::Interval => diff.iter().map(Rational::abs).max().unwrap_or_default(),
            Space::Circle => {
                let half = Rational::ratio(1, 2);
                let dist = |d: &Rational| Space::Circle.distance(d, &Rational::ZERO);
                let mut best = diff.iter().map(dist).max().unwrap_or_default();
                // A lift difference crossing a half-integer attains 1/2.
                for w in diff.windows(2) {
                    let (lo, hi) = if w[0] <= w[1] { (&w[0], &w[1]) } else { (&w[1], &w[0]) };
                    let crossing = &(lo - &half).floor() + &half;
                    let crossing = if &crossing < lo { &crossing + &Rational::ONE } else { crossing };
                    if &crossing <= hi {
                        best = half.clone();
                        break;
                    }
                }
                best
            }
        };
        Ok(best)
    }
}

fn check_abscissae(nodes: &[(Rational, Rational)]) -> Result<()> {
    if nodes.len() < 2 {
        return arg("a map needs at least two nodes");
    }
    if nodes[0].0 != Rational::ZERO || nodes[nodes.len() - 1].0 != Rational::ONE {
        return arg("map nodes must start at 0 and end at 1");
    }
    if nodes.windows(2).any(|w| w[0].0 >= w[1].0) {
        return arg("map node abscissae must be strictly increasing");
    }
    Ok(())
}

/// Projects lifted ranges onto `[0, 1]` viewed as the circle.
pub(crate) fn project_to_circle(pieces: Vec<(Rational, Rational)>) -> IntervalUnion {
    let mut out = Vec::with_capacity(pieces.len() + 1);
    for (lo, hi) in pieces {
        if &hi - &lo >= Rational::ONE {
            return IntervalUnion::full();
        }
        let k = lo.floor();
        let (a, b) = (&lo - &k, &hi - &k);
        if b <= Rational::ONE {
            out.push((a, b));
        } else {
            out.push((a, Rational::ONE));
            out.push((Rational::ZERO, &b - &Rational::ONE));
        }
    }
    close_circle(IntervalUnion::normalized(out))
}

/// On the circle `0` and `1` are the same point; keep both or neither.
pub(crate) fn close_circle(u: IntervalUnion) -> IntervalUnion {
    let zero = u.contains(&Rational::ZERO);
    let one = u.contains(&Rational::ONE);
    match (zero, one) {
        (true, false) => u.union(&IntervalUnion::point(Rational::ONE)),
        (false, true) => u.union(&IntervalUnion::point(Rational::ZERO)),
        _ => u,
    }
}

impl fmt::Debug for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PLMap({}; ", self.space)?;
        for (i, (x, y)) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({x}, {y})")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::construct::{identity, rotation, tent};
    use crate::rational::q;
    use proptest::prelude::*;

    fn iu(lo: Rational, hi: Rational) -> IntervalUnion {
        IntervalUnion::interval(lo, hi).unwrap()
    }

    #[test]
    fn tent_values() {
        let t = tent();
        assert_eq!(t.eval_value(&q(1, 2)), q(1, 1));
        assert_eq!(t.eval_value(&q(1, 4)), q(1, 2));
        assert_eq!(identity(Space::Interval).eval_value(&q(37, 100)), q(37, 100));
        assert!(t.eval(&Point::circle(q(1, 3))).is_err());
    }

    #[test]
    fn validation() {
        assert!(PLMap::interval(vec![(q(0, 1), q(0, 1))]).is_err());
        assert!(PLMap::interval(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(3, 2))]).is_err());
        assert!(PLMap::interval(vec![(q(1, 2), q(0, 1)), (q(1, 1), q(1, 1))]).is_err());
        assert!(PLMap::circle(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(1, 2))]).is_err());
    }

    #[test]
    fn tent_images_and_preimages() {
        let t = tent();
        assert!(t.image(&iu(q(0, 1), q(1, 2))).is_full());
        assert_eq!(
            t.preimage(&IntervalUnion::point(q(1, 1))).intervals(),
            &[(q(1, 2), q(1, 2))]
        );
        assert_eq!(
            t.preimage(&iu(q(3, 4), q(1, 1))).intervals(),
            &[(q(3, 8), q(5, 8))]
        );
        assert!(t.image(&IntervalUnion::empty()).is_empty());
    }

    #[test]
    fn identity_fixes_sets() {
        let u = IntervalUnion::new(vec![(q(1, 5), q(3, 10)), (q(1, 2), q(3, 5))]).unwrap();
        let id = identity(Space::Interval);
        assert_eq!(id.image(&u), u);
        assert_eq!(id.preimage(&u), u);
    }

    #[test]
    fn uniform_distances() {
        let t = tent();
        assert_eq!(t.uniform_distance(&t).unwrap(), q(0, 1));
        let zero = PLMap::interval(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(0, 1))]).unwrap();
        assert_eq!(identity(Space::Interval).uniform_distance(&zero).unwrap(), q(1, 1));
        assert!(t.uniform_distance(&rotation(q(0, 1)).unwrap()).is_err());
        let r = rotation(q(1, 3)).unwrap();
        assert_eq!(r.uniform_distance(&identity(Space::Circle)).unwrap(), q(1, 3));
        let half = rotation(q(1, 2)).unwrap();
        assert_eq!(half.uniform_distance(&identity(Space::Circle)).unwrap(), q(1, 2));
    }

    #[test]
    fn circle_lift_and_images() {
        let r = rotation(q(3, 4)).unwrap();
        assert!(r.is_orientation_preserving());
        assert_eq!(r.eval_value(&q(1, 2)), q(1, 4));
        assert_eq!(r.lift_eval(&q(3, 2)), q(9, 4));
        let img = r.image(&iu(q(0, 1), q(1, 2)));
        assert_eq!(img.intervals(), &[(q(0, 1), q(1, 4)), (q(3, 4), q(1, 1))]);
        let pre = r.preimage(&img);
        assert_eq!(pre.intervals(), &[(q(0, 1), q(1, 2)), (q(1, 1), q(1, 1))]);
        let doubling = PLMap::circle(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(2, 1))]).unwrap();
        assert_eq!(doubling.degree(), 2);
        assert!(!doubling.is_orientation_preserving());
        assert!(doubling.image(&iu(q(0, 1), q(1, 2))).is_full());
        assert_eq!(
            doubling.preimage(&IntervalUnion::point(q(0, 1))).intervals(),
            &[(q(0, 1), q(0, 1)), (q(1, 2), q(1, 2)), (q(1, 1), q(1, 1))]
        );
    }

    #[test]
    fn composition_matches_pointwise() {
        let t = tent();
        let tt = t.compose(&t).unwrap();
        assert_eq!(tt.laps(), 4);
        for i in 0..=40 {
            let x = q(i, 40);
            assert_eq!(tt.eval_value(&x), t.eval_value(&t.eval_value(&x)));
        }
        let r = rotation(q(1, 3)).unwrap().compose(&rotation(q(1, 4)).unwrap()).unwrap();
        assert_eq!(r.eval_value(&q(0, 1)), q(7, 12));
    }

    #[test]
    fn serde_round_trip() {
        let t = tent();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"space":"interval","nodes":[["0/1","0/1"],["1/2","1/1"],["1/1","0/1"]]}"#);
        let back: PLMap = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<PLMap>(r#"{"space":"interval","nodes":[["0","2"],["1","0"]]}"#).is_err());
    }

    fn arb_map() -> impl Strategy<Value = PLMap> {
        prop::collection::vec((1i64..40, 0i64..=40), 1..6).prop_map(|raw| {
            let mut xs: Vec<i64> = raw.iter().map(|(x, _)| *x).collect();
            xs.sort();
            xs.dedup();
            let mut nodes = vec![(q(0, 1), q(raw[0].1, 40))];
            for (x, (_, y)) in xs.iter().zip(&raw) {
                nodes.push((q(*x, 40), q(*y, 40)));
            }
            nodes.push((q(1, 1), q(raw[raw.len() - 1].1, 40)));
            PLMap::interval(nodes).unwrap()
        })
    }

    fn arb_union() -> impl Strategy<Value = IntervalUnion> {
        prop::collection::vec((0i64..=60, 0i64..=10), 1..4).prop_map(|raw| {
            IntervalUnion::new(
                raw.into_iter()
                    .map(|(a, w)| (q(a, 60), q((a + w).min(60), 60)))
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn tent_is_symmetric(n in 0i64..=1000, d in 1i64..=1000) {
            let x = q(n.min(d), d);
            let t = tent();
            prop_assert_eq!(t.eval_value(&x), t.eval_value(&(&Rational::ONE - &x)));
        }

        #[test]
        fn preimage_of_image_contains(f in arb_map(), u in arb_union()) {
            prop_assert!(u.is_subset_of(&f.preimage(&f.image(&u))));
        }

        #[test]
        fn image_of_preimage_within_range(f in arb_map(), u in arb_union()) {
            let range = f.image(&IntervalUnion::full());
            let v = u.intersect(&range);
            prop_assert!(v.is_subset_of(&f.image(&f.preimage(&v))));
            prop_assert!(f.image(&f.preimage(&u)).is_subset_of(&u));
        }

        #[test]
        fn image_contains_pointwise_values(f in arb_map(), u in arb_union(), t in 0i64..=100) {
            let (lo, hi) = u.intervals()[0].clone();
            let x = &lo + &(&(&hi - &lo) * &q(t, 100));
            prop_assert!(f.image(&u).contains(&f.eval_value(&x)));
            prop_assert!(f.preimage(&IntervalUnion::point(f.eval_value(&x))).contains(&x));
        }

        #[test]
        fn composition_is_pointwise(f in arb_map(), g in arb_map(), t in 0i64..=97) {
            let x = q(t, 97);
            prop_assert_eq!(f.compose(&g).unwrap().eval_value(&x), f.eval_value(&g.eval_value(&x)));
        }

        #[test]
        fn uniform_distance_dominates_samples(f in arb_map(), g in arb_map(), t in 0i64..=97) {
            let x = q(t, 97);
            let d = f.uniform_distance(&g).unwrap();
            prop_assert!((f.eval_value(&x) - g.eval_value(&x)).abs() <= d);
        }
    }
}
