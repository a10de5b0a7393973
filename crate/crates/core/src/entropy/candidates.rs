use crate::fuzzy::PCFuzzy;
use crate::hyperspace::{Arc, FiniteCompact};
use crate::maps::{ProductPoint, Space};
use crate::rational::Rational;

use super::system::{State, SystemHandle, SystemKind};

/// Deterministic candidate states: sorted, deduplicated, at most `budget`
/// of them, on the finest uniform grid that fits.
pub fn candidates(sys: &SystemHandle, budget: usize) -> Vec<State> {
    let budget = budget.max(1);
    let space = sys.space();
    let mut out = match sys.kind() {
        SystemKind::Base => space.grid(budget.max(2)).into_iter().map(State::Point).collect(),
        SystemKind::Product(k) => product_candidates(space, k, budget),
        SystemKind::Hyper(m) => {
            let g = largest_axis(|g| subsets_up_to(g, m), budget);
            subsets(&space.grid(g), m)
                .into_iter()
                .map(|s| State::Compact(FiniteCompact::from_normalized(space, s)))
                .collect()
        }
        SystemKind::Fuzzy {
            levels,
            support_cap,
            ..
        } => fuzzy_candidates(space, levels, support_cap, budget),
        SystemKind::Arcs => {
            let g = largest_axis(|g| (g as u128) * (g as u128) + 1, budget);
            let grid = Space::Circle.grid(g);
            let mut out: Vec<State> = Vec::with_capacity(g * g + 1);
            for a in &grid {
                for b in &grid {
                    out.push(State::Arc(Arc::new(a.clone(), b.clone(), false).expect("grid arc")));
                }
            }
            out.push(State::Arc(Arc::full_circle(Rational::ZERO)));
            out
        }
    };
    out.sort();
    out.dedup();
    out
}

/// Largest axis resolution `g >= 2` with `count(g) <= budget`.
fn largest_axis(count: impl Fn(usize) -> u128, budget: usize) -> usize {
    let mut g = 2;
    while count(g + 1) <= budget as u128 {
        g += 1;
    }
    g
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn subsets_up_to(g: usize, m: usize) -> u128 {
    (1..=m).map(|j| binom(g, j)).sum()
}

/// All nonempty subsets of `grid` with at most `m` elements, each sorted.
fn subsets(grid: &[Rational], m: usize) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m);
    fn rec(grid: &[Rational], start: usize, m: usize, current: &mut Vec<Rational>, out: &mut Vec<Vec<Rational>>) {
        for i in start..grid.len() {
            current.push(grid[i].clone());
            out.push(current.clone());
            if current.len() < m {
                rec(grid, i + 1, m, current, out);
            }
            current.pop();
        }
    }
    rec(grid, 0, m, &mut current, &mut out);
    out
}

fn product_candidates(space: Space, k: usize, budget: usize) -> Vec<State> {
    let g = largest_axis(|g| (g as u128).saturating_pow(k as u32), budget);
    let grid = space.grid(g);
    let total = g.pow(k as u32);
    (0..total)
        .map(|mut code| {
            let mut coords = vec![Rational::ZERO; k];
            for slot in (0..k).rev() {
                coords[slot] = grid[code % g].clone();
                code /= g;
            }
            State::Product(ProductPoint::from_normalized(space, coords))
        })
        .collect()
}

fn fuzzy_count(g: usize, levels: usize, cap: usize) -> u128 {
    (1..=cap)
        .map(|j| {
            let l = levels as u128;
            binom(g, j) * (l.pow(j as u32) - (l - 1).pow(j as u32))
        })
        .sum()
}

fn fuzzy_candidates(space: Space, levels: usize, cap: usize, budget: usize) -> Vec<State> {
    let g = largest_axis(|g| fuzzy_count(g, levels, cap), budget);
    let grades: Vec<Rational> = (1..=levels as i64).map(|i| Rational::ratio(i, levels as i64)).collect();
    let mut out = Vec::new();
    for support in subsets(&space.grid(g), cap) {
        let j = support.len();
        for mut code in 0..levels.pow(j as u32) {
            let mut grade = Vec::with_capacity(j);
            for _ in 0..j {
                grade.push(code % levels);
                code /= levels;
            }
            if !grade.contains(&(levels - 1)) {
                continue;
            }
            let mut used: Vec<usize> = grade.clone();
            used.sort();
            used.dedup();
            let thresholds: Vec<Rational> = used.iter().map(|&i| grades[i].clone()).collect();
            let sets: Vec<FiniteCompact> = used
                .iter()
                .map(|&lvl| {
                    let pts = support
                        .iter()
                        .zip(&grade)
                        .filter(|(_, &gr)| gr >= lvl)
                        .map(|(p, _)| p.clone())
                        .collect();
                    FiniteCompact::from_normalized(space, pts)
                })
                .collect();
            out.push(State::Fuzzy(PCFuzzy::new(thresholds, sets).expect("nested by construction")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::system::{arcs_system, fuzzy_system, hyper_system, power_system, FuzzyMetric};
    use crate::maps::{build_rotation_sequence, tent, NdsSpec};
    use crate::rational::q;

    #[test]
    fn sizes_respect_budget() {
        let t = NdsSpec::constant(tent());
        assert_eq!(candidates(&SystemHandle::base(t.clone()), 101).len(), 101);
        assert_eq!(candidates(&power_system(&t, 2).unwrap(), 100).len(), 100);
        let h = candidates(&hyper_system(&t, 2).unwrap(), 60);
        // 10 points give 10 + 45 subsets.
        assert_eq!(h.len(), 55);
        let f = candidates(&fuzzy_system(&t, 2, 2, FuzzyMetric::Levelwise).unwrap(), 50);
        assert!(f.len() <= 50 && !f.is_empty());
        let a = candidates(&arcs_system(&build_rotation_sequence(&[q(1, 3)]).unwrap()).unwrap(), 50);
        assert_eq!(a.len(), 50);
    }

    #[test]
    fn fuzzy_candidates_are_distinct_functions() {
        let t = NdsSpec::constant(tent());
        let f = candidates(&fuzzy_system(&t, 3, 2, FuzzyMetric::Levelwise).unwrap(), 200);
        let mut canon: Vec<String> = f
            .iter()
            .map(|s| match s {
                State::Fuzzy(u) => u.canonical().to_string(),
                _ => unreachable!(),
            })
            .collect();
        let n = canon.len();
        canon.sort();
        canon.dedup();
        assert_eq!(canon.len(), n);
        assert_eq!(fuzzy_count(3, 3, 2), 3 + 3 * 5);
    }
}
