//! Pseudo-orbits, chain search on time-layered grid graphs, and chain
//! transitivity / mixing / weak mixing checks.

use std::sync::Arc;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::entropy::{State, SystemHandle, SystemKind};
use crate::error::{arg, Result};
use crate::fuzzy::PCFuzzy;
use crate::hyperspace::FiniteCompact;
use crate::maps::{NdsSpec, PLMap};
use crate::rational::Rational;

/// A finite `delta`-pseudo-orbit `x_0, ..., x_m` started at `start_time`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    states: Vec<State>,
    delta: Rational,
    start_time: usize,
}

impl Chain {
    /// Checks `d(f_{start_time + i}(x_i), x_{i+1}) < delta` at every step.
    pub fn new(sys: &SystemHandle, states: Vec<State>, delta: Rational, start_time: usize) -> Result<Self> {
        if !is_pseudo_orbit_in(sys, &states, &delta, start_time)? {
            let errors = step_errors(sys, &states, start_time);
            let (i, e) = errors
                .iter()
                .enumerate()
                .find(|(_, e)| **e >= delta)
                .expect("some step fails");
            return arg(format!("step {i} has error {e}, not below {delta}"));
        }
        Ok(Chain {
            states,
            delta,
            start_time,
        })
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn start_time(&self) -> usize {
        self.start_time
    }

    /// Number of steps.
    pub fn length(&self) -> usize {
        self.states.len() - 1
    }

    /// `d(f_{start+i}(x_i), x_{i+1})` for every step.
    pub fn step_errors(&self, sys: &SystemHandle) -> Vec<Rational> {
        step_errors(sys, &self.states, self.start_time)
    }
}

impl Serialize for Chain {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Chain", 3)?;
        let states: Vec<String> = self.states.iter().map(|x| x.to_string()).collect();
        s.serialize_field("states", &states)?;
        s.serialize_field("delta", &self.delta)?;
        s.serialize_field("start_time", &self.start_time)?;
        s.end()
    }
}

fn step_errors(sys: &SystemHandle, states: &[State], start_time: usize) -> Vec<Rational> {
    states
        .windows(2)
        .enumerate()
        .map(|(i, w)| sys.distance(&sys.step(start_time + i, &w[0]), &w[1]))
        .collect()
}

/// Whether `seq` is a `delta`-pseudo-orbit of `nds` from `start_time`.
pub fn is_pseudo_orbit(nds: &NdsSpec, seq: &[Rational], delta: &Rational, start_time: usize) -> Result<bool> {
    let space = nds.space();
    let states = seq
        .iter()
        .map(|x| space.normalize(x.clone()).map(State::Point))
        .collect::<Result<Vec<_>>>()?;
    is_pseudo_orbit_in(&SystemHandle::base(nds.clone()), &states, delta, start_time)
}

/// [`is_pseudo_orbit`] for states of any system.
pub fn is_pseudo_orbit_in(sys: &SystemHandle, seq: &[State], delta: &Rational, start_time: usize) -> Result<bool> {
    if !delta.is_positive() {
        return arg(format!("delta must be positive, got {delta}"));
    }
    if seq.len() < 2 {
        return arg("a pseudo-orbit check needs at least two states");
    }
    Ok(seq
        .windows(2)
        .enumerate()
        .all(|(i, w)| sys.distance(&sys.step(start_time + i, &w[0]), &w[1]) < *delta))
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet(vec![0; bits.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    fn intersects(&self, other: &BitSet) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }
}

/// Adjacency of one layer: `rows[u]` holds every node `v` with
/// `d(f_t(u), v) < delta`.
type Layer = Arc<Vec<BitSet>>;

/// Time-layered graph on a sorted node list. Layers are cached per distinct
/// tuple of maps, since most sequences repeat their maps.
struct LayerGraph<'a> {
    sys: &'a SystemHandle,
    nodes: Vec<State>,
    delta: Rational,
    cache: Vec<(Vec<PLMap>, Layer)>,
    layers: Vec<Layer>,
}

impl<'a> LayerGraph<'a> {
    fn new(sys: &'a SystemHandle, mut nodes: Vec<State>, delta: Rational) -> Self {
        nodes.sort();
        nodes.dedup();
        LayerGraph {
            sys,
            nodes,
            delta,
            cache: Vec::new(),
            layers: Vec::new(),
        }
    }

    fn index_of(&self, s: &State) -> Option<usize> {
        self.nodes.binary_search(s).ok()
    }

    fn row(&self, t: usize, s: &State) -> BitSet {
        let image = self.sys.step(t, s);
        let mut row = BitSet::new(self.nodes.len());
        for (v, node) in self.nodes.iter().enumerate() {
            if self.sys.distance(&image, node) < self.delta {
                row.insert(v);
            }
        }
        row
    }

    fn layer(&mut self, t: usize) -> Layer {
        while self.layers.len() <= t {
            let time = self.layers.len();
            let maps: Vec<PLMap> = self.sys.factors().iter().map(|f| f.map_at(time).clone()).collect();
            let layer = match self.cache.iter().find(|(m, _)| *m == maps) {
                Some((_, l)) => l.clone(),
                None => {
                    let rows: Vec<BitSet> = self.nodes.par_iter().map(|s| self.row(time, s)).collect();
                    let l = Arc::new(rows);
                    self.cache.push((maps, l.clone()));
                    l
                }
            };
            self.layers.push(layer);
        }
        self.layers[t].clone()
    }

    fn ensure(&mut self, horizon: usize) {
        if horizon > 0 {
            self.layer(horizon - 1);
        }
    }

    /// `R_L` for `L = 1..=horizon`, given the first-step successors.
    fn forward(&self, first: BitSet, horizon: usize) -> Vec<BitSet> {
        let mut out = Vec::with_capacity(horizon);
        let mut cur = first;
        for t in 1..=horizon {
            let next = if t == 1 {
                cur.clone()
            } else {
                let mut next = BitSet::new(self.nodes.len());
                for u in cur.iter() {
                    next.union_with(&self.layers[t - 1][u]);
                }
                next
            };
            let empty = next.is_empty();
            out.push(next.clone());
            cur = next;
            if empty {
                out.resize(horizon, BitSet::new(self.nodes.len()));
                break;
            }
        }
        out
    }

    /// The lexicographically smallest chain `x, v_1, ..., v_{L-1}, y` whose
    /// intermediate states are nodes, if one exists.
    fn witness(&self, x: &State, first: &BitSet, y: usize, length: usize) -> Option<Chain> {
        // co[t] = nodes at time t from which y is reachable at time `length`.
        let n = self.nodes.len();
        let mut co = vec![BitSet::new(n); length + 1];
        co[length].insert(y);
        for t in (1..length).rev() {
            let (head, tail) = co.split_at_mut(t + 1);
            for u in 0..n {
                if self.layers[t][u].intersects(&tail[0]) {
                    head[t].insert(u);
                }
            }
        }
        let mut states = vec![x.clone()];
        let mut options = first.clone();
        for (t, reach) in co.iter().enumerate().skip(1) {
            options.intersect_with(reach);
            let v = options.iter().next()?;
            states.push(self.nodes[v].clone());
            if t < length {
                options = self.layers[t][v].clone();
            }
        }
        Some(Chain::new(self.sys, states, self.delta.clone(), 0).expect("graph edges are chain steps"))
    }
}

/// A `delta`-chain from `x` to `y` of exactly `length` steps from time 0,
/// with intermediate states taken from `grid`. Among all such chains the
/// lexicographically smallest is returned.
pub fn find_chain(
    sys: &SystemHandle,
    x: &State,
    y: &State,
    delta: &Rational,
    length: usize,
    grid: &[State],
) -> Result<Option<Chain>> {
    if !delta.is_positive() {
        return arg(format!("delta must be positive, got {delta}"));
    }
    if grid.is_empty() {
        return arg("chain search needs a nonempty grid");
    }
    if length == 0 {
        return Ok(None);
    }
    Ok(chains_for_lengths(sys, x, y, delta, &[length], grid).pop().flatten())
}

/// [`find_chain`] for several lengths, sharing one layered graph.
pub(crate) fn chains_for_lengths(
    sys: &SystemHandle,
    x: &State,
    y: &State,
    delta: &Rational,
    lengths: &[usize],
    grid: &[State],
) -> Vec<Option<Chain>> {
    let horizon = lengths.iter().copied().max().unwrap_or(0);
    if horizon == 0 {
        return vec![None; lengths.len()];
    }
    let mut nodes = grid.to_vec();
    nodes.push(y.clone());
    let mut graph = LayerGraph::new(sys, nodes, delta.clone());
    graph.ensure(horizon);
    let y_idx = graph.index_of(y).expect("target is a node");
    let first = graph.row(0, x);
    let reach = graph.forward(first.clone(), horizon);
    lengths
        .iter()
        .map(|&len| {
            if len == 0 || !reach[len - 1].contains(y_idx) {
                None
            } else {
                graph.witness(x, &first, y_idx, len)
            }
        })
        .collect()
}

/// Which chain property to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainProperty {
    Transitive,
    Mixing,
    WeakMixing(usize),
}

/// Grid checks can confirm a property at the tested resolution but never
/// refute it, so there is no counterexample verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    VerifiedAtResolution,
    /// `pair` names a grid pair (or, for weak mixing, a first pair of a
    /// tuple) lacking the required chains.
    Inconclusive { pair: Option<(String, String)> },
}

/// Chain evidence for one ordered pair of grid states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub from: usize,
    pub to: usize,
    /// Shortest chain length found, up to the horizon.
    pub min_length: Option<usize>,
    /// For mixing, the least `N` with chains of every length in `[N, horizon]`.
    pub stable_from: Option<usize>,
    /// A chain of `min_length` steps (of the report's `N` for mixing).
    pub chain: Option<Chain>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub property: ChainProperty,
    pub epsilon: Rational,
    pub grid_size: usize,
    pub horizon: usize,
    pub verdict: Verdict,
    /// For mixing: the least `N` valid for every pair up to the horizon.
    pub mixing_n: Option<usize>,
    pub pairs: Vec<PairWitness>,
    pub note: Option<String>,
}

impl ChainReport {
    pub fn is_verified(&self) -> bool {
        self.verdict == Verdict::VerifiedAtResolution
    }
}

/// Length masks `masks[x][y]`, bit `L` set when an `eps`-chain of `L` steps
/// runs from grid node `x` to node `y`.
fn length_masks(graph: &LayerGraph<'_>, horizon: usize) -> Vec<Vec<BitSet>> {
    let n = graph.nodes.len();
    (0..n)
        .into_par_iter()
        .map(|x| {
            let reach = graph.forward(graph.layers[0][x].clone(), horizon);
            (0..n)
                .map(|y| {
                    let mut mask = BitSet::new(horizon + 1);
                    for (l, r) in reach.iter().enumerate() {
                        if r.contains(y) {
                            mask.insert(l + 1);
                        }
                    }
                    mask
                })
                .collect()
        })
        .collect()
}

fn stable_from(mask: &BitSet, horizon: usize) -> Option<usize> {
    if !mask.contains(horizon) {
        return None;
    }
    let mut n = horizon;
    while n > 1 && mask.contains(n - 1) {
        n -= 1;
    }
    Some(n)
}

/// Whether every `order`-tuple of masks (with repetition) has a common bit.
fn tuples_intersect(masks: &[BitSet], order: usize) -> Option<Vec<usize>> {
    fn rec(masks: &[BitSet], start: usize, left: usize, acc: &BitSet, picked: &mut Vec<usize>) -> Option<Vec<usize>> {
        if acc.is_empty() {
            return Some(picked.clone());
        }
        if left == 0 {
            return None;
        }
        for i in start..masks.len() {
            let mut next = acc.clone();
            next.intersect_with(&masks[i]);
            picked.push(i);
            if let Some(bad) = rec(masks, i, left - 1, &next, picked) {
                return Some(bad);
            }
            picked.pop();
        }
        None
    }
    let full = BitSet(vec![u64::MAX; masks[0].0.len()]);
    rec(masks, 0, order, &full, &mut Vec::new())
}

/// Checks a chain property on every ordered pair of `grid` states with
/// chains of at most `horizon` steps from time 0.
///
/// Transitivity needs some length for every pair. Mixing needs one `N` with
/// chains of every length in `[N, horizon]` for every pair. Weak mixing of
/// order `k` is transitivity of the `k`-fold product, which for grid product
/// states amounts to every `k` pairs sharing a chain length.
pub fn check_chain_property(
    sys: &SystemHandle,
    property: ChainProperty,
    eps: &Rational,
    grid: &[State],
    horizon: usize,
) -> Result<ChainReport> {
    if !eps.is_positive() {
        return arg(format!("epsilon must be positive, got {eps}"));
    }
    if grid.is_empty() {
        return arg("chain checks need a nonempty grid");
    }
    if horizon == 0 {
        return arg("chain checks need a horizon of at least 1");
    }
    if let ChainProperty::WeakMixing(k) = property {
        if k < 2 {
            return arg("weak mixing needs order at least 2");
        }
    }
    let mut graph = LayerGraph::new(sys, grid.to_vec(), eps.clone());
    graph.ensure(horizon);
    let masks = length_masks(&graph, horizon);
    let n = graph.nodes.len();
    let name = |i: usize| graph.nodes[i].to_string();

    let mut pairs = Vec::with_capacity(n * n);
    let mut failing: Option<(usize, usize)> = None;
    for (x, row) in masks.iter().enumerate() {
        for (y, m) in row.iter().enumerate() {
            let min_length = m.iter().next();
            let stable = stable_from(m, horizon);
            let ok = match property {
                ChainProperty::Mixing => stable.is_some(),
                _ => min_length.is_some(),
            };
            if !ok && failing.is_none() {
                failing = Some((x, y));
            }
            pairs.push(PairWitness {
                from: x,
                to: y,
                min_length,
                stable_from: stable,
                chain: None,
            });
        }
    }

    let mut mixing_n = None;
    let mut note = None;
    match property {
        ChainProperty::Transitive => {}
        ChainProperty::Mixing => {
            if failing.is_none() {
                mixing_n = pairs.iter().filter_map(|p| p.stable_from).max();
            }
            note = Some("N is minimal up to the horizon; whether it holds beyond is not tested".into());
        }
        ChainProperty::WeakMixing(k) => {
            if failing.is_none() {
                let mut distinct: Vec<BitSet> = masks.iter().flatten().cloned().collect();
                distinct.sort_by(|a, b| a.0.cmp(&b.0));
                distinct.dedup();
                if let Some(bad) = tuples_intersect(&distinct, k) {
                    let target = &distinct[bad[0]];
                    failing = pairs
                        .iter()
                        .find(|p| &masks[p.from][p.to] == target)
                        .map(|p| (p.from, p.to));
                }
            }
            note = Some("tuple witnesses share a chain length; pair chains shown at their shortest length".into());
        }
    }

    let verdict = match failing {
        None => Verdict::VerifiedAtResolution,
        Some((x, y)) => Verdict::Inconclusive {
            pair: Some((name(x), name(y))),
        },
    };
    if verdict == Verdict::VerifiedAtResolution {
        let chains: Vec<Option<Chain>> = pairs
            .par_iter()
            .map(|p| {
                let len = mixing_n.or(p.min_length)?;
                let x = &graph.nodes[p.from];
                graph.witness(x, &graph.layers[0][p.from], p.to, len)
            })
            .collect();
        for (p, c) in pairs.iter_mut().zip(chains) {
            p.chain = c;
        }
    }
    Ok(ChainReport {
        property,
        epsilon: eps.clone(),
        grid_size: n,
        horizon,
        verdict,
        mixing_n,
        pairs,
        note,
    })
}

/// Builds the fuzzy chain whose level set at `thresholds[i]` is the union
/// of the level chains `i..`, one hyperspace chain per threshold.
///
/// The result is checked as a chain of `sys`, a fuzzy system; its step
/// errors are at most the largest step error among the level chains.
pub fn lift_chain_to_fuzzy(sys: &SystemHandle, chains: &[Chain], thresholds: &[Rational]) -> Result<Chain> {
    if !matches!(sys.kind(), SystemKind::Fuzzy { .. }) {
        return arg("lifted chains live in a fuzzy system");
    }
    let Some(first) = chains.first() else {
        return arg("no level chains to lift");
    };
    if chains.len() != thresholds.len() {
        return arg("one level chain per threshold is needed");
    }
    if chains
        .iter()
        .any(|c| c.states.len() != first.states.len() || c.delta != first.delta || c.start_time != first.start_time)
    {
        return arg("level chains must share length, delta and start time");
    }
    let mut states = Vec::with_capacity(first.states.len());
    for step in 0..first.states.len() {
        let mut sets: Vec<FiniteCompact> = Vec::with_capacity(chains.len());
        for c in chains.iter().rev() {
            let State::Compact(k) = &c.states[step] else {
                return arg("level chains must consist of compact sets");
            };
            let set = match sets.last() {
                Some(upper) => upper.union(k)?,
                None => k.clone(),
            };
            sets.push(set);
        }
        sets.reverse();
        states.push(State::Fuzzy(PCFuzzy::new(thresholds.to_vec(), sets)?));
    }
    Chain::new(sys, states, first.delta.clone(), first.start_time)
}
