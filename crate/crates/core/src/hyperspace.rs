//! Finite compact sets with the Hausdorff metric, circle arcs and the maps
//! relating them to product systems.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{arg, Error, Result};
use crate::maps::{PLMap, Point, ProductPoint, Space};
use crate::rational::Rational;

/// A nonempty finite subset of the interval or the circle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteCompact {
    points: Vec<Rational>,
    space: Space,
}

impl FiniteCompact {
    /// Normalizes, sorts and deduplicates; rejects the empty set.
    pub fn new(space: Space, values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return arg("a compact set must be nonempty");
        }
        let values = values
            .into_iter()
            .map(|v| space.normalize(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_normalized(space, values))
    }

    pub(crate) fn from_normalized(space: Space, mut values: Vec<Rational>) -> Self {
        debug_assert!(!values.is_empty());
        values.sort();
        values.dedup();
        FiniteCompact {
            points: values,
            space,
        }
    }

    pub fn from_points(points: &[Point]) -> Result<Self> {
        let space = match points.first() {
            Some(p) => p.space(),
            None => return arg("a compact set must be nonempty"),
        };
        if points.iter().any(|p| p.space() != space) {
            return arg("points of a compact set live in different spaces");
        }
        Ok(Self::from_normalized(
            space,
            points.iter().map(|p| p.value().clone()).collect(),
        ))
    }

    pub fn singleton(p: &Point) -> Self {
        FiniteCompact {
            points: vec![p.value().clone()],
            space: p.space(),
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.points
    }

    pub fn points(&self) -> Vec<Point> {
        self.points
            .iter()
            .map(|v| Point::from_normalized(self.space, v.clone()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn min(&self) -> &Rational {
        &self.points[0]
    }

    pub fn max(&self) -> &Rational {
        &self.points[self.points.len() - 1]
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.points.binary_search(x).is_ok()
    }

    pub fn is_subset_of(&self, other: &FiniteCompact) -> bool {
        self.space == other.space && self.points.iter().all(|p| other.contains(p))
    }

    pub fn union(&self, other: &FiniteCompact) -> Result<FiniteCompact> {
        if self.space != other.space {
            return arg("union of sets in different spaces");
        }
        Ok(Self::from_normalized(
            self.space,
            self.points.iter().chain(&other.points).cloned().collect(),
        ))
    }

    /// `min_{b in self} d(x, b)`.
    pub fn distance_to(&self, x: &Rational) -> Rational {
        let idx = self.points.partition_point(|p| p < x);
        let mut best: Option<Rational> = None;
        let mut consider = |p: &Rational| {
            let d = self.space.distance(p, x);
            if best.as_ref().is_none_or(|b| d < *b) {
                best = Some(d);
            }
        };
        if idx < self.points.len() {
            consider(&self.points[idx]);
        }
        if idx > 0 {
            consider(&self.points[idx - 1]);
        }
        if self.space == Space::Circle {
            consider(&self.points[0]);
            consider(&self.points[self.points.len() - 1]);
        }
        best.expect("compact sets are nonempty")
    }

    /// `sup_{a in self} d(a, other)`.
    pub fn directed_distance(&self, other: &FiniteCompact) -> Rational {
        self.points
            .iter()
            .map(|a| other.distance_to(a))
            .max()
            .expect("compact sets are nonempty")
    }

    /// Hausdorff distance.
    pub fn hausdorff(&self, other: &FiniteCompact) -> Result<Rational> {
        if self.space != other.space {
            return arg("Hausdorff distance between sets in different spaces");
        }
        Ok(self.hausdorff_unchecked(other))
    }

    pub(crate) fn hausdorff_unchecked(&self, other: &FiniteCompact) -> Rational {
        if self == other {
            return Rational::ZERO;
        }
        self.directed_distance(other)
            .max(other.directed_distance(self))
    }

    /// Whether the Hausdorff distance to `other` is at most `eps`.
    pub(crate) fn within_hausdorff(&self, other: &FiniteCompact, eps: &Rational) -> bool {
        self.covered_by(other, eps) && other.covered_by(self, eps)
    }

    fn covered_by(&self, other: &FiniteCompact, eps: &Rational) -> bool {
        let space = self.space;
        let pts = &other.points;
        self.points.iter().all(|x| {
            let idx = pts.partition_point(|p| p < x);
            (idx < pts.len() && space.within(&pts[idx], x, eps))
                || (idx > 0 && space.within(&pts[idx - 1], x, eps))
                || (space == Space::Circle
                    && (space.within(&pts[0], x, eps) || space.within(&pts[pts.len() - 1], x, eps)))
        })
    }

    /// Pointwise image `f(A)`.
    pub fn image(&self, f: &PLMap) -> Result<FiniteCompact> {
        if f.space() != self.space {
            return arg(format!("{} map applied to a {} set", f.space(), self.space));
        }
        Ok(self.image_unchecked(f))
    }

    pub(crate) fn image_unchecked(&self, f: &PLMap) -> FiniteCompact {
        Self::from_normalized(self.space, self.points.iter().map(|p| f.eval_value(p)).collect())
    }
}

impl Serialize for FiniteCompact {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.points.serialize(serializer)
    }
}

impl fmt::Display for FiniteCompact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// `Hausdorff(A, B)`.
pub fn hausdorff(a: &FiniteCompact, b: &FiniteCompact) -> Result<Rational> {
    a.hausdorff(b)
}

/// The induced map on compact sets.
pub fn induced_image(f: &PLMap, a: &FiniteCompact) -> Result<FiniteCompact> {
    a.image(f)
}

/// The underlying set of a tuple.
pub fn phi(p: &ProductPoint) -> FiniteCompact {
    FiniteCompact::from_normalized(p.space(), p.coords().to_vec())
}

/// Number of `m`-tuples whose underlying set is a given set of `k` points,
/// i.e. the number of surjections from `m` onto `k` elements.
pub fn phi_fiber_size(m: usize, k: usize) -> u128 {
    if k > m || k == 0 {
        return u128::from(m == 0 && k == 0);
    }
    // Inclusion-exclusion: sum_j (-1)^j C(k, j) (k - j)^m.
    let mut total: i128 = 0;
    let mut binom: i128 = 1;
    for j in 0..=k {
        let term = binom * (k as i128 - j as i128).pow(m as u32);
        total += if j % 2 == 0 { term } else { -term };
        binom = binom * (k - j) as i128 / (j + 1) as i128;
    }
    total as u128
}

/// A continuum of the circle: the counterclockwise arc from `a` to `b`, or
/// the whole circle anchored at `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Arc {
    a: Rational,
    b: Rational,
    full: bool,
}

impl Arc {
    pub fn new(a: Rational, b: Rational, full: bool) -> Result<Self> {
        let (a, b) = (a.fract(), b.fract());
        if full && a != b {
            return arg("a full-circle arc is anchored at a single point");
        }
        Ok(Arc { a, b, full })
    }

    pub fn full_circle(anchor: Rational) -> Self {
        let a = anchor.fract();
        Arc {
            b: a.clone(),
            a,
            full: true,
        }
    }

    pub fn start(&self) -> &Rational {
        &self.a
    }

    pub fn end(&self) -> &Rational {
        &self.b
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    /// Arc length in `[0, 1]`.
    pub fn length(&self) -> Rational {
        if self.full {
            Rational::ONE
        } else {
            (&self.b - &self.a).fract()
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.full || (x - &self.a).fract() <= self.length()
    }

    /// Circle distance from `x` to the arc.
    pub fn distance_to(&self, x: &Rational) -> Rational {
        if self.contains(x) {
            Rational::ZERO
        } else {
            Space::Circle
                .distance(x, &self.a)
                .min(Space::Circle.distance(x, &self.b))
        }
    }

    /// `sup_{x in self} d(x, other)`.
    fn directed_distance(&self, other: &Arc) -> Rational {
        if other.full {
            return Rational::ZERO;
        }
        let gap = &Rational::ONE - &other.length();
        let gap_mid = (&other.b + &(&gap / &Rational::from_integer(2))).fract();
        let mut best = other.distance_to(&self.a).max(other.distance_to(&self.b));
        // Inside the complementary gap the distance peaks at its midpoint.
        if self.contains(&gap_mid) {
            best = best.max(other.distance_to(&gap_mid));
        }
        best
    }

    /// Hausdorff distance between arcs.
    pub fn hausdorff(&self, other: &Arc) -> Rational {
        self.directed_distance(other).max(other.directed_distance(self))
    }

    /// The arc on the grid of `n` points `{a + i L/(n-1)}`, for cross-checks.
    pub fn sample(&self, n: usize) -> FiniteCompact {
        let n = n.max(2);
        let len = self.length();
        let values = (0..n)
            .map(|i| (&self.a + &(&len * &Rational::ratio(i as i64, (n - 1) as i64))).fract())
            .collect();
        FiniteCompact::from_normalized(Space::Circle, values)
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.full {
            write!(f, "S1@{}", self.a)
        } else {
            write!(f, "[{}, {}]", self.a, self.b)
        }
    }
}

/// Image of an arc under an orientation-preserving circle map.
pub fn arc_image(f: &PLMap, arc: &Arc) -> Result<Arc> {
    if !f.is_orientation_preserving() {
        return Err(Error::Argument(
            "arc images need an orientation-preserving circle map".into(),
        ));
    }
    Ok(arc_image_unchecked(f, arc))
}

pub(crate) fn arc_image_unchecked(f: &PLMap, arc: &Arc) -> Arc {
    let fa = f.lift_eval(&arc.a);
    if arc.full {
        return Arc::full_circle(fa);
    }
    let fb = f.lift_eval(&(&arc.a + &arc.length()));
    if &fb - &fa >= Rational::ONE {
        Arc::full_circle(fa)
    } else {
        Arc {
            a: fa.fract(),
            b: fb.fract(),
            full: false,
        }
    }
}

/// Endpoint pair of a point `(a, arc)` of the arc space: `(a, b)` for
/// `[a, b]` and `(a, a)` for the full circle.
pub fn psi(anchor: &Point, arc: &Arc) -> Result<ProductPoint> {
    if anchor.space() != Space::Circle || anchor.value() != &arc.a {
        return arg(format!("point {anchor} is not the anchor of arc {arc}"));
    }
    let b = if arc.full { arc.a.clone() } else { arc.b.clone() };
    Ok(ProductPoint::from_normalized(Space::Circle, vec![arc.a.clone(), b]))
}
