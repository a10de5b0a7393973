use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{arg, Result};
use crate::fuzzy::{d_endograph_exact_unchecked, d_infty_unchecked, PCFuzzy};
use crate::hyperspace::{arc_image_unchecked, Arc, FiniteCompact};
use crate::maps::{NdsSpec, ProductPoint, Space, Tail};
use crate::rational::Rational;

/// Metric used on fuzzy states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FuzzyMetric {
    Levelwise,
    Endograph,
}

/// Which induced system to study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Base,
    Product(usize),
    Hyper(usize),
    Fuzzy {
        levels: usize,
        support_cap: usize,
        metric: FuzzyMetric,
    },
    Arcs,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemKind::Base => f.write_str("base"),
            SystemKind::Product(k) => write!(f, "product({k})"),
            SystemKind::Hyper(m) => write!(f, "hyper({m})"),
            SystemKind::Fuzzy {
                levels,
                support_cap,
                metric,
            } => {
                let metric = match metric {
                    FuzzyMetric::Levelwise => "dinf",
                    FuzzyMetric::Endograph => "dE",
                };
                write!(f, "fuzzy({levels},{support_cap},{metric})")
            }
            SystemKind::Arcs => f.write_str("arcs"),
        }
    }
}

/// A state of any of the supported systems.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Point(Rational),
    Product(ProductPoint),
    Compact(FiniteCompact),
    Fuzzy(PCFuzzy),
    Arc(Arc),
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Point(x) => write!(f, "{x}"),
            State::Product(p) => {
                f.write_str("(")?;
                for (i, c) in p.coords().iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
            State::Compact(k) => write!(f, "{k}"),
            State::Fuzzy(u) => write!(f, "{u}"),
            State::Arc(a) => write!(f, "{a}"),
        }
    }
}

pub(crate) type Features = SmallVec<[Rational; 4]>;

/// A non-autonomous system together with the induced space it acts on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemHandle {
    kind: SystemKind,
    factors: Vec<NdsSpec>,
}

impl SystemHandle {
    pub fn base(nds: NdsSpec) -> Self {
        SystemHandle {
            kind: SystemKind::Base,
            factors: vec![nds],
        }
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn nds(&self) -> &NdsSpec {
        &self.factors[0]
    }

    pub fn factors(&self) -> &[NdsSpec] {
        &self.factors
    }

    pub fn space(&self) -> Space {
        self.factors[0].space()
    }

    /// Number of real coordinates a state carries, used to scale grid
    /// resolution checks.
    pub fn dimension(&self) -> usize {
        match self.kind {
            SystemKind::Base => 1,
            SystemKind::Product(k) => k,
            SystemKind::Hyper(m) => m,
            SystemKind::Fuzzy { support_cap, .. } => support_cap,
            SystemKind::Arcs => 2,
        }
    }

    /// Applies `f_time` (or the induced map) to a state of this system.
    pub fn step(&self, time: usize, s: &State) -> State {
        match (self.kind, s) {
            (SystemKind::Base, State::Point(x)) => State::Point(self.factors[0].map_at(time).eval_value(x)),
            (SystemKind::Product(_), State::Product(p)) => {
                let coords = p
                    .coords()
                    .iter()
                    .zip(&self.factors)
                    .map(|(c, nds)| nds.map_at(time).eval_value(c))
                    .collect();
                State::Product(ProductPoint::from_normalized(p.space(), coords))
            }
            (SystemKind::Hyper(_), State::Compact(k)) => {
                State::Compact(k.image_unchecked(self.factors[0].map_at(time)))
            }
            (SystemKind::Fuzzy { .. }, State::Fuzzy(u)) => {
                State::Fuzzy(u.zadeh_unchecked(self.factors[0].map_at(time)))
            }
            (SystemKind::Arcs, State::Arc(a)) => State::Arc(arc_image_unchecked(self.factors[0].map_at(time), a)),
            (kind, s) => panic!("state {s} does not belong to a {kind} system"),
        }
    }

    /// `[s, f_start(s), ...]` with `len` entries.
    pub fn orbit(&self, start: usize, s: &State, len: usize) -> Vec<State> {
        let mut out = Vec::with_capacity(len);
        if len == 0 {
            return out;
        }
        out.push(s.clone());
        for k in 1..len {
            let next = self.step(start + k - 1, &out[k - 1]);
            out.push(next);
        }
        out
    }

    /// The metric of the induced space.
    pub fn distance(&self, a: &State, b: &State) -> Rational {
        match (a, b) {
            (State::Point(x), State::Point(y)) => self.space().distance(x, y),
            (State::Product(p), State::Product(q)) => p.distance(q),
            (State::Compact(x), State::Compact(y)) => x.hausdorff_unchecked(y),
            (State::Fuzzy(u), State::Fuzzy(v)) => match self.kind {
                SystemKind::Fuzzy {
                    metric: FuzzyMetric::Endograph,
                    ..
                } => d_endograph_exact_unchecked(u, v),
                _ => d_infty_unchecked(u, v),
            },
            (State::Arc(x), State::Arc(y)) => x.hausdorff(y),
            _ => panic!("distance between states of different kinds"),
        }
    }

    /// Whether `distance(a, b) <= eps`, with fast paths for points.
    pub fn within(&self, a: &State, b: &State, eps: &Rational) -> bool {
        let space = self.space();
        match (a, b) {
            (State::Point(x), State::Point(y)) => space.within(x, y, eps),
            (State::Product(p), State::Product(q)) => {
                p.coords().iter().zip(q.coords()).all(|(x, y)| space.within(x, y, eps))
            }
            (State::Compact(x), State::Compact(y)) => x.within_hausdorff(y, eps),
            _ => self.distance(a, b) <= *eps,
        }
    }

    /// Real functions of a state that are 1-Lipschitz for the metric; used
    /// only to prune comparisons. Empty when no cheap bound is known.
    pub(crate) fn features(&self, s: &State, out: &mut Features) {
        out.clear();
        let interval = self.space() == Space::Interval;
        match s {
            State::Point(x) => out.push(x.clone()),
            State::Product(p) => out.extend(p.coords().iter().cloned()),
            State::Compact(k) if interval => {
                out.push(k.min().clone());
                out.push(k.max().clone());
            }
            State::Fuzzy(u) if interval && self.kind_metric() == Some(FuzzyMetric::Levelwise) => {
                out.push(u.top().min().clone());
                out.push(u.top().max().clone());
                out.push(u.support().min().clone());
                out.push(u.support().max().clone());
            }
            _ => {}
        }
    }

    /// Whether features live on the circle (and wrap around).
    pub(crate) fn periodic_features(&self) -> bool {
        self.space() == Space::Circle
    }

    fn kind_metric(&self) -> Option<FuzzyMetric> {
        match self.kind {
            SystemKind::Fuzzy { metric, .. } => Some(metric),
            _ => None,
        }
    }
}

fn all_maps(nds: &NdsSpec) -> impl Iterator<Item = &crate::maps::PLMap> {
    let tail: Vec<&crate::maps::PLMap> = match nds.tail() {
        Tail::Constant(f) => vec![f],
        Tail::Cycle(fs) => fs.iter().collect(),
        Tail::Levels(bs) => bs.iter().map(|(f, _)| f).collect(),
    };
    nds.prefix().iter().chain(tail)
}

/// `f × f × ... × f` (`k` factors) with the max metric.
pub fn power_system(nds: &NdsSpec, k: usize) -> Result<SystemHandle> {
    if k == 0 {
        return arg("power system needs k >= 1");
    }
    if k == 1 {
        return Ok(SystemHandle::base(nds.clone()));
    }
    Ok(SystemHandle {
        kind: SystemKind::Product(k),
        factors: vec![nds.clone(); k],
    })
}

/// `f_1 × ... × f_k` for sequences on the same space.
pub fn product_system(factors: &[NdsSpec]) -> Result<SystemHandle> {
    let Some(first) = factors.first() else {
        return arg("product system needs at least one factor");
    };
    if factors.iter().any(|f| f.space() != first.space()) {
        return arg("product factors must act on the same space");
    }
    Ok(SystemHandle {
        kind: SystemKind::Product(factors.len()),
        factors: factors.to_vec(),
    })
}

/// Induced system on compact sets with at most `m` points.
pub fn hyper_system(nds: &NdsSpec, m: usize) -> Result<SystemHandle> {
    if m == 0 {
        return arg("hyper system needs m >= 1");
    }
    Ok(SystemHandle {
        kind: SystemKind::Hyper(m),
        factors: vec![nds.clone()],
    })
}

/// Zadeh extension on fuzzy sets with grades in `{1/levels, ..., 1}` and at
/// most `support_cap` support points.
pub fn fuzzy_system(nds: &NdsSpec, levels: usize, support_cap: usize, metric: FuzzyMetric) -> Result<SystemHandle> {
    if levels == 0 || support_cap == 0 {
        return arg("fuzzy system needs levels >= 1 and support_cap >= 1");
    }
    Ok(SystemHandle {
        kind: SystemKind::Fuzzy {
            levels,
            support_cap,
            metric,
        },
        factors: vec![nds.clone()],
    })
}

/// Induced system on arcs of the circle.
pub fn arcs_system(nds: &NdsSpec) -> Result<SystemHandle> {
    if nds.space() != Space::Circle {
        return arg("arc systems live on the circle");
    }
    if !all_maps(nds).all(|f| f.is_orientation_preserving()) {
        return arg("arc systems need orientation-preserving maps");
    }
    Ok(SystemHandle {
        kind: SystemKind::Arcs,
        factors: vec![nds.clone()],
    })
}
