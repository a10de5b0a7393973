use serde::{Deserialize, Serialize};

use super::interval_union::IntervalUnion;
use super::plmap::PLMap;
use super::space::{Point, Space};
use crate::error::{arg, Result};
use crate::rational::Rational;

/// How the sequence continues once the explicit prefix is exhausted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Constant(PLMap),
    Cycle(Vec<PLMap>),
    /// Consecutive blocks `(map, length)`; the last block's map repeats forever.
    Levels(Vec<(PLMap, usize)>),
}

/// A non-autonomous sequence `f_0, f_1, ...` of maps on one space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawNds")]
pub struct NdsSpec {
    space: Space,
    prefix: Vec<PLMap>,
    tail: Tail,
}

#[derive(Deserialize)]
struct RawNds {
    space: Space,
    #[serde(default)]
    prefix: Vec<PLMap>,
    tail: Tail,
}

impl TryFrom<RawNds> for NdsSpec {
    type Error = crate::error::Error;
    fn try_from(raw: RawNds) -> Result<Self> {
        NdsSpec::new(raw.space, raw.prefix, raw.tail)
    }
}

impl NdsSpec {
    pub fn new(space: Space, prefix: Vec<PLMap>, tail: Tail) -> Result<Self> {
        let tail_maps: Vec<&PLMap> = match &tail {
            Tail::Constant(f) => vec![f],
            Tail::Cycle(fs) if fs.is_empty() => return arg("cycle tail needs at least one map"),
            Tail::Cycle(fs) => fs.iter().collect(),
            Tail::Levels(bs) if bs.is_empty() => return arg("levels tail needs at least one block"),
            Tail::Levels(bs) => {
                if bs.iter().any(|(_, len)| *len == 0) {
                    return arg("level blocks must have positive length");
                }
                bs.iter().map(|(f, _)| f).collect()
            }
        };
        if prefix.iter().chain(tail_maps).any(|f| f.space() != space) {
            return arg(format!("every map of a {space} sequence must act on the {space}"));
        }
        Ok(NdsSpec {
            space,
            prefix,
            tail,
        })
    }

    /// The autonomous system `f, f, f, ...`.
    pub fn constant(map: PLMap) -> Self {
        NdsSpec {
            space: map.space(),
            prefix: Vec::new(),
            tail: Tail::Constant(map),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn prefix(&self) -> &[PLMap] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// `f_n`.
    pub fn map_at(&self, n: usize) -> &PLMap {
        if let Some(f) = self.prefix.get(n) {
            return f;
        }
        let mut m = n - self.prefix.len();
        match &self.tail {
            Tail::Constant(f) => f,
            Tail::Cycle(fs) => &fs[m % fs.len()],
            Tail::Levels(blocks) => {
                for (f, len) in blocks {
                    if m < *len {
                        return f;
                    }
                    m -= len;
                }
                &blocks[blocks.len() - 1].0
            }
        }
    }

    /// `[x_0, x_1, ..., x_n]` with `x_k = f_{k-1} ∘ ... ∘ f_0 (x_0)`.
    pub fn orbit(&self, x0: &Point, n: usize) -> Result<Vec<Point>> {
        if x0.space() != self.space {
            return arg(format!("{} point given to a {} sequence", x0.space(), self.space));
        }
        Ok(self
            .orbit_values(x0.value(), 0, n)
            .into_iter()
            .map(|v| Point::from_normalized(self.space, v))
            .collect())
    }

    /// Orbit of a normalized value starting at time `start`.
    pub fn orbit_values(&self, x0: &Rational, start: usize, n: usize) -> Vec<Rational> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(x0.clone());
        for k in 0..n {
            let next = self.map_at(start + k).eval_value(&out[k]);
            out.push(next);
        }
        out
    }

    /// `f_{start+n-1} ∘ ... ∘ f_start (u)`, exactly.
    pub fn image(&self, start: usize, n: usize, u: &IntervalUnion) -> IntervalUnion {
        (start..start + n).fold(u.clone(), |acc, k| self.map_at(k).image(&acc))
    }

    /// `(f_{start+n-1} ∘ ... ∘ f_start)^{-1} (u)`, exactly.
    pub fn preimage(&self, start: usize, n: usize, u: &IntervalUnion) -> IntervalUnion {
        (start..start + n)
            .rev()
            .fold(u.clone(), |acc, k| self.map_at(k).preimage(&acc))
    }

    /// The composed map `f_{start+n-1} ∘ ... ∘ f_start` as one exact map.
    pub fn composition(&self, start: usize, n: usize) -> Result<PLMap> {
        let mut acc = super::construct::identity(self.space);
        for k in start..start + n {
            acc = self.map_at(k).compose(&acc)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::construct::{build_rotation_sequence, identity, tent};
    use crate::rational::q;
    use proptest::prelude::*;

    fn pt(n: i64, d: i64) -> Point {
        Point::interval(q(n, d)).unwrap()
    }

    #[test]
    fn constant_tent_orbit() {
        let nds = NdsSpec::constant(tent());
        let orbit = nds.orbit(&pt(1, 2), 2).unwrap();
        assert_eq!(orbit, vec![pt(1, 2), pt(1, 1), pt(0, 1)]);
        let id = NdsSpec::constant(identity(Space::Interval));
        assert_eq!(id.orbit(&pt(2, 5), 5).unwrap(), vec![pt(2, 5); 6]);
    }

    #[test]
    fn prefix_then_tail() {
        let nds = NdsSpec::new(
            Space::Interval,
            vec![tent(), identity(Space::Interval)],
            Tail::Constant(tent()),
        )
        .unwrap();
        assert_eq!(
            nds.orbit(&pt(1, 4), 3).unwrap(),
            vec![pt(1, 4), pt(1, 2), pt(1, 2), pt(1, 1)]
        );
    }

    #[test]
    fn levels_tail_persists() {
        let id = identity(Space::Interval);
        let nds = NdsSpec::new(
            Space::Interval,
            vec![],
            Tail::Levels(vec![(tent(), 2), (id.clone(), 1)]),
        )
        .unwrap();
        assert_eq!(nds.map_at(1), &tent());
        assert_eq!(nds.map_at(2), &id);
        assert_eq!(nds.map_at(1000), &id);
    }

    #[test]
    fn rejects_mixed_spaces_and_empty_tails() {
        let r = crate::maps::construct::rotation(q(1, 3)).unwrap();
        assert!(NdsSpec::new(Space::Interval, vec![r], Tail::Constant(tent())).is_err());
        assert!(NdsSpec::new(Space::Interval, vec![], Tail::Cycle(vec![])).is_err());
        assert!(NdsSpec::new(Space::Interval, vec![], Tail::Levels(vec![(tent(), 0)])).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let nds = build_rotation_sequence(&[q(1, 3), q(1, 4)]).unwrap();
        let json = serde_json::to_string(&nds).unwrap();
        let back: NdsSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, nds);
        let bad = r#"{"space":"circle","tail":{"constant":{"space":"interval","nodes":[["0","0"],["1","1"]]}}}"#;
        assert!(serde_json::from_str::<NdsSpec>(bad).is_err());
    }

    #[test]
    fn composition_and_set_images_agree() {
        let nds = NdsSpec::new(
            Space::Interval,
            vec![tent()],
            Tail::Cycle(vec![identity(Space::Interval), tent()]),
        )
        .unwrap();
        let f = nds.composition(0, 4).unwrap();
        let u = IntervalUnion::interval(q(0, 1), q(1, 8)).unwrap();
        assert_eq!(f.image(&u), nds.image(0, 4, &u));
        assert_eq!(f.preimage(&u), nds.preimage(0, 4, &u));
    }

    proptest! {
        #[test]
        fn orbit_prefixes_agree(n in 0usize..12, m in 0usize..12, x in 0i64..=64) {
            let nds = NdsSpec::new(
                Space::Interval,
                vec![identity(Space::Interval)],
                Tail::Cycle(vec![tent(), identity(Space::Interval)]),
            ).unwrap();
            let long = nds.orbit(&pt(x, 64), n + m).unwrap();
            let short = nds.orbit(&pt(x, 64), n).unwrap();
            prop_assert_eq!(&long[..=n], &short[..]);
        }
    }
}
