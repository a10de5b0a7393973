//! Piecewise-constant normal fuzzy sets and their metrics.

use std::fmt;

use serde::Serialize;

use crate::error::{arg, Result};
use crate::hyperspace::FiniteCompact;
use crate::maps::{PLMap, Space};
use crate::rational::Rational;

/// A fuzzy set taking finitely many values: `[u]_α = C_i` for
/// `α ∈ (α_{i-1}, α_i]`, with `0 = α_0 < α_1 < ... < α_k = 1` and
/// `C_1 ⊇ C_2 ⊇ ... ⊇ C_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PCFuzzy {
    thresholds: Vec<Rational>,
    levels: Vec<FiniteCompact>,
}

impl PCFuzzy {
    pub fn new(thresholds: Vec<Rational>, levels: Vec<FiniteCompact>) -> Result<Self> {
        if thresholds.is_empty() || thresholds.len() != levels.len() {
            return arg("a fuzzy set needs one level per threshold and at least one of each");
        }
        if !thresholds[0].is_positive() {
            return arg("thresholds must be positive");
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return arg("thresholds must be strictly increasing");
        }
        if thresholds[thresholds.len() - 1] != Rational::ONE {
            return arg("the last threshold must be 1");
        }
        let space = levels[0].space();
        if levels.iter().any(|l| l.space() != space) {
            return arg("levels live in different spaces");
        }
        if levels.windows(2).any(|w| !w[1].is_subset_of(&w[0])) {
            return arg("levels must be nested");
        }
        Ok(PCFuzzy { thresholds, levels })
    }

    /// Builds from raw values, as read from a fixture.
    pub fn from_values(space: Space, thresholds: Vec<Rational>, levels: Vec<Vec<Rational>>) -> Result<Self> {
        let levels = levels
            .into_iter()
            .map(|l| FiniteCompact::new(space, l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(thresholds, levels)
    }

    /// Characteristic function of `K`.
    pub fn chi(k: &FiniteCompact) -> Self {
        PCFuzzy {
            thresholds: vec![Rational::ONE],
            levels: vec![k.clone()],
        }
    }

    pub fn thresholds(&self) -> &[Rational] {
        &self.thresholds
    }

    pub fn levels(&self) -> &[FiniteCompact] {
        &self.levels
    }

    pub fn space(&self) -> Space {
        self.levels[0].space()
    }

    /// `[u]_1`.
    pub fn top(&self) -> &FiniteCompact {
        &self.levels[self.levels.len() - 1]
    }

    /// `[u]_α` for the smallest positive α, i.e. the support.
    pub fn support(&self) -> &FiniteCompact {
        &self.levels[0]
    }

    pub fn is_chi(&self) -> bool {
        self.levels.len() == 1
    }

    /// `[u]_α` for `α ∈ (0, 1]`.
    pub fn level_set(&self, alpha: &Rational) -> Result<&FiniteCompact> {
        if !alpha.is_positive() || *alpha > Rational::ONE {
            return arg(format!("level {alpha} outside (0, 1]"));
        }
        let i = self.thresholds.partition_point(|t| t < alpha);
        Ok(&self.levels[i])
    }

    /// Membership grade `u(x)`.
    pub fn membership(&self, x: &Rational) -> Rational {
        let inside = self.levels.partition_point(|l| l.contains(x));
        if inside == 0 {
            Rational::ZERO
        } else {
            self.thresholds[inside - 1].clone()
        }
    }

    /// Zadeh extension, computed level by level.
    pub fn zadeh_extend(&self, f: &PLMap) -> Result<PCFuzzy> {
        if f.space() != self.space() {
            return arg(format!("{} map applied to a {} fuzzy set", f.space(), self.space()));
        }
        Ok(self.zadeh_unchecked(f))
    }

    pub(crate) fn zadeh_unchecked(&self, f: &PLMap) -> PCFuzzy {
        let levels: Vec<FiniteCompact> = self.levels.iter().map(|l| l.image_unchecked(f)).collect();
        assert!(
            levels.windows(2).all(|w| w[1].is_subset_of(&w[0])),
            "images of nested levels must nest"
        );
        PCFuzzy {
            thresholds: self.thresholds.clone(),
            levels,
        }
    }

    /// Drops thresholds whose level equals the next one. Two fuzzy sets are
    /// equal as functions iff their canonical forms are equal.
    pub fn canonical(&self) -> PCFuzzy {
        let mut thresholds = Vec::with_capacity(self.thresholds.len());
        let mut levels: Vec<FiniteCompact> = Vec::with_capacity(self.levels.len());
        for i in 0..self.levels.len() {
            if i + 1 < self.levels.len() && self.levels[i] == self.levels[i + 1] {
                continue;
            }
            thresholds.push(self.thresholds[i].clone());
            levels.push(self.levels[i].clone());
        }
        PCFuzzy { thresholds, levels }
    }

    /// The same fuzzy set on a finer threshold list containing its own.
    fn on_thresholds(&self, grid: &[Rational]) -> PCFuzzy {
        let levels = grid
            .iter()
            .map(|t| self.level_set(t).expect("grid thresholds lie in (0, 1]").clone())
            .collect();
        PCFuzzy {
            thresholds: grid.to_vec(),
            levels,
        }
    }
}

impl fmt::Display for PCFuzzy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (t, l)) in self.thresholds.iter().zip(&self.levels).enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{t}:{l}")?;
        }
        Ok(())
    }
}

pub fn chi(k: &FiniteCompact) -> PCFuzzy {
    PCFuzzy::chi(k)
}

fn merged_thresholds(u: &PCFuzzy, v: &PCFuzzy) -> Vec<Rational> {
    let mut grid: Vec<Rational> = u.thresholds.iter().chain(&v.thresholds).cloned().collect();
    grid.sort();
    grid.dedup();
    grid
}

/// Rewrites both sets on the union of their thresholds.
pub fn refine_common(u: &PCFuzzy, v: &PCFuzzy) -> (PCFuzzy, PCFuzzy) {
    let grid = merged_thresholds(u, v);
    (u.on_thresholds(&grid), v.on_thresholds(&grid))
}

/// Levelwise metric `sup_α D([u]_α, [v]_α)`.
pub fn d_infty(u: &PCFuzzy, v: &PCFuzzy) -> Result<Rational> {
    if u.space() != v.space() {
        return arg("levelwise distance between fuzzy sets in different spaces");
    }
    Ok(d_infty_unchecked(u, v))
}

pub(crate) fn d_infty_unchecked(u: &PCFuzzy, v: &PCFuzzy) -> Rational {
    // Walk the merged threshold list without materializing the refinement.
    let (mut i, mut j) = (0, 0);
    let mut best = Rational::ZERO;
    loop {
        let d = u.levels[i].hausdorff_unchecked(&v.levels[j]);
        if d > best {
            best = d;
        }
        match u.thresholds[i].cmp(&v.thresholds[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
        if i == u.levels.len() || j == v.levels.len() {
            return best;
        }
    }
}

/// Spatial grid `{i / resolution}` used by the endograph distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EndographGrid {
    resolution: usize,
}

impl EndographGrid {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return arg("endograph grid resolution must be at least 2");
        }
        Ok(EndographGrid { resolution })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Distance from `x` to the nearest grid point.
    fn gap(&self, x: &Rational) -> Rational {
        let n = Rational::from_integer(self.resolution as i64);
        let scaled = x * &n;
        let frac = scaled.fract();
        let other = &Rational::ONE - &frac;
        &frac.min(other) / &n
    }
}

/// Endograph distance with `x` ranging over the grid and both supports and
/// `y` over the grid and the support of `v`.
///
/// For `(x, a)` in the endograph of `u`, the nearest point of the endograph
/// of `v` above `y` is `(y, min(a, v(y)))`, so the directed part is
/// `max_x min_y max(d(x, y), (u(x) - v(y))^+)`. Off the support of `u` the
/// grade is zero and contributes nothing; off the support of `v` the best `y`
/// is the grid point nearest `x`. The value is within `1 / (2 resolution)`
/// of the true distance and exact when the supports lie on the grid.
pub fn d_endograph(u: &PCFuzzy, v: &PCFuzzy, grid: &EndographGrid) -> Result<Rational> {
    if u.space() != v.space() {
        return arg("endograph distance between fuzzy sets in different spaces");
    }
    Ok(directed_endograph(u, v, Some(grid)).max(directed_endograph(v, u, Some(grid))))
}

/// Exact endograph distance between piecewise-constant fuzzy sets.
pub fn d_endograph_exact(u: &PCFuzzy, v: &PCFuzzy) -> Result<Rational> {
    if u.space() != v.space() {
        return arg("endograph distance between fuzzy sets in different spaces");
    }
    Ok(d_endograph_exact_unchecked(u, v))
}

pub(crate) fn d_endograph_exact_unchecked(u: &PCFuzzy, v: &PCFuzzy) -> Rational {
    directed_endograph(u, v, None).max(directed_endograph(v, u, None))
}

fn directed_endograph(u: &PCFuzzy, v: &PCFuzzy, grid: Option<&EndographGrid>) -> Rational {
    let space = u.space();
    let v_support: Vec<(Rational, Rational)> = v
        .support()
        .values()
        .iter()
        .map(|y| (y.clone(), v.membership(y)))
        .collect();
    let mut best = Rational::ZERO;
    for x in u.support().values() {
        let ux = u.membership(x);
        let mut inner = match grid {
            Some(g) => g.gap(x).max(ux.clone()),
            None => ux.clone(),
        };
        for (y, vy) in &v_support {
            let lift = (&ux - vy).max(Rational::ZERO);
            let d = space.distance(x, y).max(lift);
            if d < inner {
                inner = d;
            }
        }
        if inner > best {
            best = inner;
        }
    }
    best
}
