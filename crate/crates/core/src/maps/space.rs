use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// The two phase spaces supported: the unit interval and the circle `R/Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Interval,
    Circle,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Interval => "interval",
            Space::Circle => "circle",
        }
    }

    /// Metric on the space: `|a - b|` on the interval, arc length on the circle.
    pub fn distance(self, a: &Rational, b: &Rational) -> Rational {
        let d = (a - b).abs();
        match self {
            Space::Interval => d,
            Space::Circle => {
                let d = d.fract();
                let other = &Rational::ONE - &d;
                d.min(other)
            }
        }
    }

    /// Whether `distance(a, b) <= eps`.
    pub fn within(self, a: &Rational, b: &Rational, eps: &Rational) -> bool {
        Rational::abs_diff_le(a, b, eps) || (self == Space::Circle && self.distance(a, b) <= *eps)
    }

    /// Validates an interval value or reduces a circle value into `[0, 1)`.
    pub fn normalize(self, value: Rational) -> Result<Rational> {
        match self {
            Space::Interval if value.in_unit_interval() => Ok(value),
            Space::Interval => Err(Error::Domain {
                value: value.to_string(),
                space: self.name(),
            }),
            Space::Circle => Ok(value.fract()),
        }
    }

    pub fn diameter(self) -> Rational {
        match self {
            Space::Interval => Rational::ONE,
            Space::Circle => Rational::ratio(1, 2),
        }
    }

    /// `n` evenly spaced points: `i/(n-1)` on the interval, `i/n` on the circle.
    pub fn grid(self, n: usize) -> Vec<Rational> {
        let n = n.max(1);
        match self {
            Space::Interval if n == 1 => vec![Rational::ZERO],
            Space::Interval => (0..n)
                .map(|i| Rational::ratio(i as i64, (n - 1) as i64))
                .collect(),
            Space::Circle => (0..n).map(|i| Rational::ratio(i as i64, n as i64)).collect(),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point of the interval or the circle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    value: Rational,
    space: Space,
}

impl Point {
    pub fn new(space: Space, value: Rational) -> Result<Self> {
        Ok(Point {
            value: space.normalize(value)?,
            space,
        })
    }

    pub fn interval(value: Rational) -> Result<Self> {
        Self::new(Space::Interval, value)
    }

    pub fn circle(value: Rational) -> Self {
        Point {
            value: value.fract(),
            space: Space::Circle,
        }
    }

    pub(crate) fn from_normalized(space: Space, value: Rational) -> Self {
        Point { value, space }
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn into_value(self) -> Rational {
        self.value
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn distance(&self, other: &Point) -> Rational {
        self.space.distance(&self.value, &other.value)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// A point of `X^k` with the max metric.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductPoint {
    coords: Vec<Rational>,
    space: Space,
}

impl ProductPoint {
    pub fn new(space: Space, coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Argument("product point needs at least one coordinate".into()));
        }
        let coords = coords
            .into_iter()
            .map(|c| space.normalize(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductPoint { coords, space })
    }

    pub fn from_points(points: &[Point]) -> Result<Self> {
        let space = points
            .first()
            .map(Point::space)
            .ok_or_else(|| Error::Argument("product point needs at least one coordinate".into()))?;
        if points.iter().any(|p| p.space() != space) {
            return Err(Error::Argument("product coordinates live in different spaces".into()));
        }
        Ok(ProductPoint {
            coords: points.iter().map(|p| p.value().clone()).collect(),
            space,
        })
    }

    pub(crate) fn from_normalized(space: Space, coords: Vec<Rational>) -> Self {
        ProductPoint { coords, space }
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn points(&self) -> Vec<Point> {
        self.coords
            .iter()
            .map(|c| Point::from_normalized(self.space, c.clone()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// Max over coordinates; panics if the dimensions differ.
    pub fn distance(&self, other: &ProductPoint) -> Rational {
        assert_eq!(self.len(), other.len(), "product dimension mismatch");
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| self.space.distance(a, b))
            .max()
            .unwrap_or_default()
    }
}
