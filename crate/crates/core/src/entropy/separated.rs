use std::collections::HashSet;

use rustc_hash::FxHashMap as HashMap;
use std::ops::Deref;
use std::sync::Arc;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{arg, Error, Result};
use crate::rational::Rational;

use super::system::{Features, State, SystemHandle};

type Key = SmallVec<[i64; 4]>;

const CHUNK: usize = 8192;

/// Slack on float comparisons; far above the rounding error of features in
/// `[0, 1]`, far below any scale a scan uses.
const FLOAT_SLACK: f64 = 1e-9;

/// An orbit with its feature values as floats, for cheap rejection before
/// the exact comparison.
struct OrbitData {
    states: Vec<State>,
    approx: Vec<f64>,
    stride: usize,
}

#[derive(Clone)]
struct Orbit(Arc<OrbitData>);

impl Orbit {
    fn new(sys: &SystemHandle, states: Vec<State>) -> Self {
        let mut f = Features::new();
        let mut approx = Vec::new();
        let mut stride = 0;
        for s in &states {
            sys.features(s, &mut f);
            stride = f.len();
            approx.extend(f.iter().map(Rational::to_f64));
        }
        Orbit(Arc::new(OrbitData { states, approx, stride }))
    }

    /// False only when some feature differs by clearly more than `eps`.
    fn maybe_within(&self, other: &Orbit, n: usize, eps: f64, periodic: bool) -> bool {
        let k = self.0.stride;
        if k == 0 {
            return true;
        }
        let (a, b) = (&self.0.approx[..n * k], &other.0.approx[..n * k]);
        let bound = eps + FLOAT_SLACK;
        // The last time separates fastest under expansion.
        let last = (n - 1) * k;
        let far = |i: usize| {
            let d = (a[i] - b[i]).abs();
            let d = if periodic { d.min(1.0 - d) } else { d };
            d > bound
        };
        !((last..last + k).any(far) || (0..last).any(far))
    }
}

impl Deref for Orbit {
    type Target = [State];

    fn deref(&self) -> &[State] {
        &self.0.states
    }
}

/// Buckets orbits by the cells of a few 1-Lipschitz features at the first
/// and last time, so two orbits within `eps` of each other at every time
/// land in neighbouring buckets.
struct Keyer {
    eps: Rational,
    n: usize,
    /// Features used at the first and at the last time; at most three slots
    /// keep the neighbour probe at 27 lookups.
    slots: (usize, usize),
    /// Number of cells around the circle, for periodic features.
    wrap: Option<i64>,
}

impl Keyer {
    fn new(sys: &SystemHandle, sample: &State, n: usize, eps: &Rational) -> Option<Self> {
        let mut f = Features::new();
        sys.features(sample, &mut f);
        if f.is_empty() {
            return None;
        }
        let width = f.len().min(sys.dimension()).min(2);
        let slots = if n == 1 { (width, 0) } else { (1, width) };
        let wrap = sys.periodic_features().then(|| {
            (&Rational::ONE / eps).floor_i64().unwrap_or(i64::MAX).max(1)
        });
        Some(Keyer {
            eps: eps.clone(),
            n,
            slots,
            wrap,
        })
    }

    fn cell(&self, v: &Rational) -> i64 {
        match self.wrap {
            Some(k) => v
                .floor_div(&Rational::ratio(1, k))
                .unwrap_or(0)
                .rem_euclid(k),
            None => v.floor_div(&self.eps).unwrap_or(i64::MAX),
        }
    }

    fn key(&self, sys: &SystemHandle, orbit: &[State]) -> Key {
        let mut key = Key::new();
        let mut f = Features::new();
        for (t, take) in [(0, self.slots.0), (self.n - 1, self.slots.1)] {
            if take > 0 {
                sys.features(&orbit[t], &mut f);
                key.extend(f.iter().take(take).map(|v| self.cell(v)));
            }
        }
        key
    }

    /// Calls `visit` on every key within one cell of `key` in each slot until
    /// it returns true. Keys may repeat when the wrap is tiny.
    fn any_neighbour(&self, key: &Key, mut visit: impl FnMut(&Key) -> bool) -> bool {
        let mut offset: SmallVec<[i64; 8]> = smallvec::smallvec![-1; key.len()];
        let mut probe = key.clone();
        loop {
            for (slot, (&c, &d)) in key.iter().zip(&offset).enumerate() {
                probe[slot] = match self.wrap {
                    Some(w) => (c + d).rem_euclid(w),
                    None => c.saturating_add(d),
                };
            }
            if visit(&probe) {
                return true;
            }
            let mut slot = 0;
            loop {
                if slot == offset.len() {
                    return false;
                }
                if offset[slot] < 1 {
                    offset[slot] += 1;
                    break;
                }
                offset[slot] = -1;
                slot += 1;
            }
        }
    }
}

/// Whether two orbits stay within `eps` at times `0..n`.
fn within(sys: &SystemHandle, a: &[State], b: &[State], n: usize, eps: &Rational) -> bool {
    if !sys.within(&a[n - 1], &b[n - 1], eps) || !sys.within(&a[0], &b[0], eps) {
        return false;
    }
    (1..n.saturating_sub(1)).all(|k| sys.within(&a[k], &b[k], eps))
}

/// [`within`] behind the float filter.
fn close(sys: &SystemHandle, a: &Orbit, b: &Orbit, n: usize, eps: &Rational, eps_f: f64) -> bool {
    a.maybe_within(b, n, eps_f, sys.periodic_features()) && within(sys, a, b, n, eps)
}

/// One `(n, eps)` greedy scan in progress.
struct Row {
    n: usize,
    eps: Rational,
    eps_f: f64,
    limit: usize,
    kept: Vec<Orbit>,
    index: HashMap<Key, Vec<u32>>,
    keyer: Option<Keyer>,
    saturated: bool,
}

impl Row {
    fn offer(&mut self, sys: &SystemHandle, orbit: &Orbit) {
        if self.saturated {
            return;
        }
        if self.keyer.is_none() && self.kept.is_empty() {
            self.keyer = Keyer::new(sys, &orbit[0], self.n, &self.eps);
        }
        let conflict = match &self.keyer {
            Some(keyer) => {
                let key = keyer.key(sys, orbit);
                let hit = keyer.any_neighbour(&key, |k| {
                    self.index.get(k).is_some_and(|ids| {
                        ids.iter()
                            .any(|&j| close(sys, orbit, &self.kept[j as usize], self.n, &self.eps, self.eps_f))
                    })
                });
                if !hit {
                    self.index.entry(key).or_default().push(self.kept.len() as u32);
                }
                hit
            }
            None => self
                .kept
                .iter()
                .any(|k| close(sys, orbit, k, self.n, &self.eps, self.eps_f)),
        };
        if !conflict {
            self.kept.push(orbit.clone());
            if self.kept.len() > self.limit {
                self.saturated = true;
            }
        }
    }
}

/// Outcome of a greedy separated scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanResult {
    pub n: usize,
    pub eps: Rational,
    /// Size of the separated set found; a lower bound when `saturated`.
    pub count: usize,
    /// The scan stopped after exceeding its limit.
    pub saturated: bool,
}

fn check_eps(eps: &Rational) -> Result<()> {
    if !eps.is_positive() {
        return arg(format!("epsilon must be positive, got {eps}"));
    }
    Ok(())
}

/// Runs several greedy separated scans in one pass over the candidates.
/// Each scan stops once its set grows beyond `limit`.
pub fn separated_scan(
    sys: &SystemHandle,
    candidates: &[State],
    rows: &[(usize, Rational)],
    limit: usize,
) -> Result<Vec<ScanResult>> {
    if candidates.is_empty() {
        return arg("separated scan needs candidates");
    }
    for (n, eps) in rows {
        check_eps(eps)?;
        if *n == 0 {
            return arg("orbit length n must be at least 1");
        }
    }
    let mut state: Vec<Row> = rows
        .iter()
        .map(|(n, eps)| Row {
            n: *n,
            eps: eps.clone(),
            eps_f: eps.to_f64(),
            limit,
            kept: Vec::new(),
            index: HashMap::default(),
            keyer: None,
            saturated: false,
        })
        .collect();
    for chunk in candidates.chunks(CHUNK) {
        let horizon = state.iter().filter(|r| !r.saturated).map(|r| r.n).max();
        let Some(horizon) = horizon else { break };
        let orbits: Vec<Orbit> = chunk
            .par_iter()
            .map(|s| Orbit::new(sys, sys.orbit(0, s, horizon)))
            .collect();
        state.par_iter_mut().for_each(|row| {
            for orbit in &orbits {
                row.offer(sys, orbit);
            }
        });
    }
    Ok(state
        .into_iter()
        .map(|r| ScanResult {
            n: r.n,
            eps: r.eps,
            count: r.kept.len(),
            saturated: r.saturated,
        })
        .collect())
}

/// Size of a maximal `(n, eps)`-separated subset of `candidates`, built
/// greedily in the given order: a lower bound for the largest one.
pub fn separated_count(sys: &SystemHandle, n: usize, eps: &Rational, candidates: &[State]) -> Result<usize> {
    let rows = separated_scan(sys, candidates, &[(n, eps.clone())], usize::MAX)?;
    Ok(rows[0].count)
}

/// Size of a greedy `(n, eps)`-spanning subset of `candidates` covering
/// `targets`. Each step takes the first uncovered target and the last
/// candidate (in the given order) that covers it. When the targets are all
/// candidates, a maximal separated subset of the targets also spans them,
/// and the smaller of the two covers is returned.
pub fn spanning_count(
    sys: &SystemHandle,
    n: usize,
    eps: &Rational,
    candidates: &[State],
    targets: &[State],
) -> Result<usize> {
    check_eps(eps)?;
    if n == 0 {
        return arg("orbit length n must be at least 1");
    }
    if candidates.is_empty() || targets.is_empty() {
        return arg("spanning count needs candidates and targets");
    }
    let orbit_all = |states: &[State]| -> Vec<Orbit> {
        states
            .par_iter()
            .map(|s| Orbit::new(sys, sys.orbit(0, s, n)))
            .collect()
    };
    let cand = orbit_all(candidates);
    let targ = orbit_all(targets);
    let keyer = Keyer::new(sys, &candidates[0], n, eps);
    let eps_f = eps.to_f64();
    let build = |orbits: &[Orbit]| -> HashMap<Key, Vec<u32>> {
        let mut index: HashMap<Key, Vec<u32>> = HashMap::default();
        if let Some(k) = &keyer {
            for (i, o) in orbits.iter().enumerate() {
                index.entry(k.key(sys, o)).or_default().push(i as u32);
            }
        }
        index
    };
    let cand_index = build(&cand);
    let targ_index = build(&targ);
    let near = |orbit: &Orbit, pool: &[Orbit], index: &HashMap<Key, Vec<u32>>| -> Vec<usize> {
        let mut hits: Vec<usize> = match &keyer {
            Some(k) => {
                let mut hits = Vec::new();
                k.any_neighbour(&k.key(sys, orbit), |key| {
                    if let Some(ids) = index.get(key) {
                        hits.extend(
                            ids.iter()
                                .map(|&i| i as usize)
                                .filter(|&i| close(sys, orbit, &pool[i], n, eps, eps_f)),
                        );
                    }
                    false
                });
                hits
            }
            None => (0..pool.len())
                .filter(|&i| close(sys, orbit, &pool[i], n, eps, eps_f))
                .collect(),
        };
        hits.sort_unstable();
        hits.dedup();
        hits
    };
    let mut covered = vec![false; targets.len()];
    let mut count = 0;
    for t in 0..targets.len() {
        if covered[t] {
            continue;
        }
        let Some(&c) = near(&targ[t], &cand, &cand_index).last() else {
            return Err(Error::Uncovered {
                index: t,
                state: targets[t].to_string(),
            });
        };
        count += 1;
        for i in near(&cand[c], &targ, &targ_index) {
            covered[i] = true;
        }
        covered[t] = true;
    }
    let pool: HashSet<&State> = candidates.iter().collect();
    if targets.iter().all(|t| pool.contains(t)) {
        count = count.min(separated_count(sys, n, eps, targets)?);
    }
    Ok(count)
}
