//! Exact rational numbers with an inline fast path.
//!
//! Values whose reduced numerator and denominator fit in an `i64` are stored
//! inline and combined through `i128` intermediates, which cannot overflow for
//! a single add, multiply or compare. Anything larger is promoted to a boxed
//! `BigRational` and demoted again as soon as it fits. The representation is
//! canonical, so derived equality and hashing are value equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone)]
enum Repr {
    /// Reduced, `den > 0`, `num != i64::MIN`.
    Small(i64, i64),
    /// Reduced, positive denominator, never representable as `Small`.
    Big(Box<BigRational>),
}

/// An exact rational number.
#[derive(Clone)]
pub struct Rational(Repr);

impl Rational {
    pub const ZERO: Rational = Rational(Repr::Small(0, 1));
    pub const ONE: Rational = Rational(Repr::Small(1, 1));

    pub fn zero() -> Self {
        Self::ZERO
    }

    pub fn one() -> Self {
        Self::ONE
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_i128(n as i128, 1)
    }

    /// `num / den`; `None` when `den == 0`.
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            None
        } else {
            Some(Self::from_i128(num as i128, den as i128))
        }
    }

    /// Panicking convenience constructor for literals.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("zero denominator")
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let (mut num, mut den) = (num, den);
        if den < 0 {
            num = -num;
            den = -den;
        }
        let g = gcd_i128(num, den);
        if g > 1 {
            num /= g;
            den /= g;
        }
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) if n != i64::MIN => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(BigRational::new_raw(
                BigInt::from(num),
                BigInt::from(den),
            )))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        // `BigRational` arithmetic keeps values reduced with a positive denominator.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Rational(Repr::Small(n, d));
            }
        }
        Rational(Repr::Big(Box::new(r)))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Self::from_i128(n.div_floor(d) as i128, 1),
            Repr::Big(b) => Self::from_big(b.floor()),
        }
    }

    /// `floor(self)` as an `i64`, when it fits.
    pub fn floor_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, d) => Some(n.div_floor(d)),
            Repr::Big(b) => b.floor().to_integer().to_i64(),
        }
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Self {
        self - &self.floor()
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Midpoint `(a + b) / 2`.
    pub fn midpoint(a: &Self, b: &Self) -> Self {
        &(a + b) / &Rational::from_integer(2)
    }

    /// Whether the value lies in the closed unit interval.
    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && *self <= Rational::ONE
    }

    /// `floor(self / other)` for positive `other`, when it fits in an `i64`.
    pub fn floor_div(&self, other: &Rational) -> Option<i64> {
        debug_assert!(other.is_positive());
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &other.0) {
            let num = *a as i128 * *d as i128;
            let den = *b as i128 * *c as i128;
            return i64::try_from(num.div_euclid(den)).ok();
        }
        (self / other).floor_i64()
    }

    /// Whether `|a - b| <= eps`, without building the difference.
    pub fn abs_diff_le(a: &Rational, b: &Rational, eps: &Rational) -> bool {
        if let (Repr::Small(p1, q1), Repr::Small(p2, q2), Repr::Small(p3, q3)) = (&a.0, &b.0, &eps.0) {
            // |p1/q1 - p2/q2| <= p3/q3  <=>  |p1 q2 - p2 q1| q3 <= p3 q1 q2
            let diff = (*p1 as i128 * *q2 as i128 - *p2 as i128 * *q1 as i128).abs();
            let lhs = diff.checked_mul(*q3 as i128);
            let rhs = (*p3 as i128).checked_mul(*q1 as i128 * *q2 as i128);
            if let (Some(l), Some(r)) = (lhs, rhs) {
                return l <= r;
            }
        }
        (a - b).abs() <= *eps
    }
}

/// Greatest common divisor of `|a|` and `|b|`, using 64-bit steps when both fit.
fn gcd_i128(a: i128, b: i128) -> i128 {
    let (a, b) = (a.unsigned_abs(), b.unsigned_abs());
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        return binary_gcd(a as u64, b as u64) as i128;
    }
    a.gcd(&b) as i128
}

fn binary_gcd(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

macro_rules! small_or_big {
    ($lhs:expr, $rhs:expr, |$a:ident, $b:ident, $c:ident, $d:ident| $small:expr, |$x:ident, $y:ident| $big:expr) => {
        match (&$lhs.0, &$rhs.0) {
            (Repr::Small($a, $b), Repr::Small($c, $d)) => {
                let ($a, $b, $c, $d) = (*$a as i128, *$b as i128, *$c as i128, *$d as i128);
                $small
            }
            _ => {
                let $x = $lhs.to_big();
                let $y = $rhs.to_big();
                Rational::from_big($big)
            }
        }
    };
}

impl Add<&Rational> for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        small_or_big!(self, rhs, |a, b, c, d| {
            if b == d {
                Rational::from_i128(a + c, b)
            } else {
                Rational::from_i128(a * d + c * b, b * d)
            }
        }, |x, y| x + y)
    }
}

impl Sub<&Rational> for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        small_or_big!(self, rhs, |a, b, c, d| {
            if b == d {
                Rational::from_i128(a - c, b)
            } else {
                Rational::from_i128(a * d - c * b, b * d)
            }
        }, |x, y| x - y)
    }
}

impl Mul<&Rational> for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        small_or_big!(self, rhs, |a, b, c, d| Rational::from_i128(a * c, b * d), |x, y| x * y)
    }
}

impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division of a rational by zero");
        small_or_big!(self, rhs, |a, b, c, d| Rational::from_i128(a * d, b * c), |x, y| x / y)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, *d)),
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                (&self).$m(rhs)
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    a.cmp(c)
                } else {
                    (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
                }
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_bigint(s: &str, full: &str) -> Result<BigInt, Error> {
    s.parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("not a rational: {full:?}")))
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q`, integers, and finite decimals such as `0.37` or `-1.5e-3`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty rational".into()));
        }
        if let Some((p, q)) = t.split_once('/') {
            let p = parse_bigint(p.trim(), s)?;
            let q = parse_bigint(q.trim(), s)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Self::from_big(BigRational::new(p, q)));
        }
        let (mantissa, exp) = match t.find(['e', 'E']) {
            Some(i) => {
                let e: i32 = t[i + 1..]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
                (&t[..i], e)
            }
            None => (t, 0),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("not a rational: {s:?}")));
        }
        let digits = format!("{int_part}{frac_part}");
        let digits = if digits == "-" || digits == "+" || digits.is_empty() {
            return Err(Error::Parse(format!("not a rational: {s:?}")));
        } else {
            digits
        };
        let num = parse_bigint(&digits, s)?;
        let scale = exp - frac_part.len() as i32;
        let ten = BigInt::from(10u8);
        let r = if scale >= 0 {
            BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(Self::from_big(r))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Rational::from_integer(n)),
        }
    }
}

impl One for Rational {
    fn one() -> Self {
        Self::ONE
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

/// Shorthand for `Rational::ratio`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::ratio(num, den)
}
