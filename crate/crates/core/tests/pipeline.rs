use ndstk_core::chains::{check_chain_property, ChainProperty};
use ndstk_core::entropy::{entropy_estimate, hyper_system, lap_count_entropy, EstimateConfig, State, SystemHandle};
use ndstk_core::fuzzy::{chi, d_infty};
use ndstk_core::hyperspace::{hausdorff, induced_image, FiniteCompact};
use ndstk_core::maps::{build_transitive_zero_entropy, dyadic_intervals, identity, tent, NdsSpec, Space};
use ndstk_core::sensitivity::{check_multi_f_sensitive, FamilyPredicate, Sampling};
use ndstk_core::shadowing::{decide_finite_shadowing, decide_hyper_shadowing};
use ndstk_core::q;

fn singleton(x: ndstk_core::Rational) -> FiniteCompact {
    FiniteCompact::new(Space::Interval, vec![x]).unwrap()
}

#[test]
fn construction_levels_cover_and_flatten() {
    let t = build_transitive_zero_entropy(3).unwrap();
    assert_eq!(t.boundaries, vec![1, 3, 4]);
    for (k, s) in t.boundaries.iter().enumerate() {
        for j in dyadic_intervals(k as u32 + 1) {
            assert!(t.nds.image(0, *s, &j).is_full(), "level {} interval {:?}", k + 1, j);
        }
    }
    let laps = lap_count_entropy(&t.nds, 4).unwrap();
    assert!(laps.slope > 0.0);
}

#[test]
fn tent_chain_mixing_and_shadowing_agree_on_singletons() {
    let nds = NdsSpec::constant(tent());
    let orbit = [q(2, 5), q(9, 10), q(3, 10)];
    let eps = q(3, 20);
    let base = decide_finite_shadowing(&nds, &orbit, &eps).unwrap();
    let sets: Vec<FiniteCompact> = orbit.iter().cloned().map(singleton).collect();
    let lifted = decide_hyper_shadowing(&nds, &sets, &eps, false).unwrap();
    assert_eq!(base.shadowed, lifted.shadowed);

    let grid: Vec<State> = Space::Interval.grid(21).into_iter().map(State::Point).collect();
    let report = check_chain_property(&SystemHandle::base(nds), ChainProperty::Mixing, &q(1, 10), &grid, 48).unwrap();
    assert!(report.is_verified());
}

#[test]
fn lifts_preserve_distances_of_singletons() {
    let f = tent();
    for (a, b) in [(q(0, 1), q(1, 3)), (q(1, 2), q(7, 8)), (q(1, 5), q(1, 5))] {
        let (x, y) = (singleton(a.clone()), singleton(b.clone()));
        let h = hausdorff(&x, &y).unwrap();
        assert_eq!(h, (&a - &b).abs());
        assert_eq!(d_infty(&chi(&x), &chi(&y)).unwrap(), h);
        let image = induced_image(&f, &x).unwrap();
        assert_eq!(image.values(), &[f.eval_value(&a)]);
    }
}

#[test]
fn entropy_and_sensitivity_separate_tent_from_identity() {
    let cfg = EstimateConfig::new(vec![q(1, 8), q(1, 16), q(1, 32)], 8, 1 << 14);
    let id = NdsSpec::constant(identity(Space::Interval));
    let tent_slope = entropy_estimate(&SystemHandle::base(NdsSpec::constant(tent())), &cfg).unwrap().slope().unwrap();
    let id_slope = entropy_estimate(&SystemHandle::base(id.clone()), &cfg).unwrap().slope().unwrap();
    assert!(tent_slope > 0.5 && id_slope.abs() < 0.05, "{tent_slope} {id_slope}");

    let hyper = hyper_system(&NdsSpec::constant(tent()), 1).unwrap();
    let points = vec![State::Compact(singleton(q(1, 3)))];
    let family = FamilyPredicate::Cofinite { max_missing: 8 };
    let r = check_multi_f_sensitive(&hyper, &points, &q(1, 50), &q(1, 4), &family, 30, &Sampling::grid(16)).unwrap();
    assert!(r.member);
    let r = check_multi_f_sensitive(
        &SystemHandle::base(id),
        &[State::Point(q(1, 3))],
        &q(1, 50),
        &q(1, 50),
        &family,
        30,
        &Sampling::grid(16),
    )
    .unwrap();
    assert!(!r.member);
}
