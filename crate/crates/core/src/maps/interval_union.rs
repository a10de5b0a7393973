use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::rational::Rational;

/// A finite union of disjoint closed subintervals of `[0, 1]`, kept sorted
/// with touching or overlapping pieces merged.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(Rational, Rational)>", into = "Vec<(Rational, Rational)>")]
pub struct IntervalUnion {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        IntervalUnion {
            intervals: vec![(Rational::ZERO, Rational::ONE)],
        }
    }

    pub fn point(x: Rational) -> Self {
        IntervalUnion {
            intervals: vec![(x.clone(), x)],
        }
    }

    /// `[lo, hi]`; both ends must lie in `[0, 1]` with `lo <= hi`.
    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    /// Validates and normalizes an arbitrary list of closed intervals.
    pub fn new(intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        for (lo, hi) in &intervals {
            if lo > hi {
                return arg(format!("interval [{lo}, {hi}] has lo > hi"));
            }
            if !lo.in_unit_interval() || !hi.in_unit_interval() {
                return arg(format!("interval [{lo}, {hi}] leaves [0, 1]"));
            }
        }
        Ok(Self::normalized(intervals))
    }

    /// Sorts and merges; assumes each pair is a valid interval.
    pub(crate) fn normalized(mut intervals: Vec<(Rational, Rational)>) -> Self {
        intervals.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some((_, last_hi)) if lo <= *last_hi => {
                    if hi > *last_hi {
                        *last_hi = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        IntervalUnion { intervals: merged }
    }

    /// `[center - radius, center + radius] ∩ [0, 1]`.
    pub fn ball(center: &Rational, radius: &Rational) -> Self {
        let lo = (center - radius).max(Rational::ZERO);
        let hi = (center + radius).min(Rational::ONE);
        if lo > hi {
            Self::empty()
        } else {
            IntervalUnion {
                intervals: vec![(lo, hi)],
            }
        }
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn min(&self) -> Option<&Rational> {
        self.intervals.first().map(|(lo, _)| lo)
    }

    pub fn max(&self) -> Option<&Rational> {
        self.intervals.last().map(|(_, hi)| hi)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let idx = self.intervals.partition_point(|(lo, _)| lo <= x);
        idx > 0 && *x <= self.intervals[idx - 1].1
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::normalized(self.intervals.iter().chain(&other.intervals).cloned().collect())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = (&a[i].0).max(&b[j].0);
            let hi = (&a[i].1).min(&b[j].1);
            if lo <= hi {
                out.push((lo.clone(), hi.clone()));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalUnion { intervals: out }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intervals.iter().all(|(lo, hi)| {
            let idx = other.intervals.partition_point(|(l, _)| l <= lo);
            idx > 0 && *hi <= other.intervals[idx - 1].1
        })
    }

    /// Sum of component lengths.
    pub fn measure(&self) -> Rational {
        self.intervals
            .iter()
            .fold(Rational::ZERO, |acc, (lo, hi)| &acc + &(hi - lo))
    }

    pub fn is_full(&self) -> bool {
        self.intervals.len() == 1
            && self.intervals[0].0 == Rational::ZERO
            && self.intervals[0].1 == Rational::ONE
    }
}

impl TryFrom<Vec<(Rational, Rational)>> for IntervalUnion {
    type Error = crate::error::Error;
    fn try_from(v: Vec<(Rational, Rational)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<IntervalUnion> for Vec<(Rational, Rational)> {
    fn from(u: IntervalUnion) -> Self {
        u.intervals
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("∅");
        }
        for (i, (lo, hi)) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "[{lo}, {hi}]")?;
        }
        Ok(())
    }
}
