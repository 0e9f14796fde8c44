use proptest::prelude::*;

use dsym_core::arith::Rational;
use dsym_core::counting::{count_cylinders, count_saddles, predicted_constant, CountKind};
use dsym_core::sl2z::{orbit_enumerate, IntegerMatrix2};
use dsym_core::surface::{build, decompose_direction, trace_decompose, TwistPoint};
use dsym_core::svconstants::{finite_orbit_from_fiber, saddle_orbit_constant};
use dsym_core::fiber::build_fiber_decomposition;

fn word() -> impl Strategy<Value = IntegerMatrix2> {
    proptest::collection::vec(prop_oneof![Just('S'), Just('T')], 0..8)
        .prop_map(|w| IntegerMatrix2::word(&w.into_iter().collect::<String>()).unwrap())
}

fn rational_twist() -> impl Strategy<Value = (i64, i64, i64, u64)> {
    (1u64..=4, 2i64..=7).prop_flat_map(|(d, den)| (0..d as i64 * den, 0..d as i64 * den, Just(den), Just(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn counts_are_rotation_invariant((x, y, den, d) in rational_twist(), k in 0usize..4) {
        let w = TwistPoint::ratio(x, y, den, d).unwrap();
        let s = build(d, w).unwrap();
        prop_assume!(!s.is_degenerate());
        let r = IntegerMatrix2::word(&"S".repeat(k)).unwrap();
        let s2 = build(d, w.act(&r).unwrap()).unwrap();
        for t in [7.5, 20.0] {
            prop_assert_eq!(count_cylinders(&s, t).unwrap(), count_cylinders(&s2, t).unwrap());
            prop_assert_eq!(count_saddles(&s, t, None).unwrap(), count_saddles(&s2, t, None).unwrap());
        }
    }

    #[test]
    fn predictions_are_orbit_invariant((x, y, den, d) in rational_twist(), a in word()) {
        let w = TwistPoint::ratio(x, y, den, d).unwrap();
        let s = build(d, w).unwrap();
        prop_assume!(!s.is_degenerate());
        let s2 = build(d, w.act(&a).unwrap()).unwrap();
        for kind in [CountKind::Cylinders, CountKind::SaddlesAll] {
            prop_assert_eq!(predicted_constant(&s, kind).unwrap(), predicted_constant(&s2, kind).unwrap());
        }
    }

    #[test]
    fn orbit_constants_do_not_depend_on_seed((x, y, den, d) in rational_twist(), a in word()) {
        let w = TwistPoint::ratio(x, y, den, d).unwrap();
        let p = *w.as_torus_point().unwrap();
        prop_assume!(!p.is_lattice());
        let q = *w.act(&a).unwrap().as_torus_point().unwrap();
        let f = build_fiber_decomposition(d).unwrap();
        let (o1, o2) = (orbit_enumerate(&p).unwrap(), orbit_enumerate(&q).unwrap());
        prop_assert_eq!(finite_orbit_from_fiber(&f, &o1).unwrap(), finite_orbit_from_fiber(&f, &o2).unwrap().clone());
        prop_assert_eq!(
            saddle_orbit_constant(d, &o1, None).unwrap().coefficient,
            saddle_orbit_constant(d, &o2, None).unwrap().coefficient
        );
    }

    #[test]
    fn cover_factor((x, y, den) in (0i64..9, 0i64..9, 2i64..9), d in 2u64..=4) {
        let base = build(1, TwistPoint::ratio(x, y, den, 1).unwrap()).unwrap();
        prop_assume!(!base.is_degenerate());
        let cover = build(d, TwistPoint::ratio(x, y, den, d).unwrap()).unwrap();
        prop_assume!(!cover.is_degenerate());
        for t in [3.0, 15.0] {
            prop_assert_eq!(count_saddles(&cover, t, None).unwrap(), d * count_saddles(&base, t, None).unwrap());
        }
    }

    #[test]
    fn formula_and_tracer_agree_on_float_twists(h in 0.0f64..4.0, v in 0.0f64..4.0, d in 1u64..=4, p in -4i64..=4, q in -4i64..=4) {
        prop_assume!(dsym_core::arith::gcd_i64(p, q) == 1);
        let s = build(d, TwistPoint::float(h, v, d).unwrap()).unwrap();
        prop_assume!(!s.is_degenerate());
        let f = decompose_direction(&s, p, q).unwrap();
        if let Ok(t) = trace_decompose(&s, p, q) {
            let key = |c: &dsym_core::CylinderDecomposition| {
                let mut v: Vec<u64> = c.groups.iter().flat_map(|g| std::iter::repeat(g.period).take(g.count as usize)).collect();
                v.sort();
                v
            };
            prop_assert_eq!(key(&f), key(&t));
            prop_assert!((f.total_area() - d as f64).abs() < 1e-9);
        }
    }
}

#[test]
fn predictions_dispatch_on_rationality() {
    let exact = build(2, TwistPoint::exact(&Rational::new(2, 3), &Rational::zero(), 2).unwrap()).unwrap();
    assert_eq!(predicted_constant(&exact, CountKind::Cylinders).unwrap().coefficient, Rational::new(35, 16));
    let float = build(2, TwistPoint::float(0.4142135, 0.7320508, 2).unwrap()).unwrap();
    assert_eq!(predicted_constant(&float, CountKind::Cylinders).unwrap().coefficient, Rational::new(9, 4));
    let c = predicted_constant(&float, CountKind::SaddlesAll).unwrap();
    assert!((c.growth_rate() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn degenerate_surfaces_are_rejected_by_counting() {
    let s = build(3, TwistPoint::ratio(3, 0, 1, 3).unwrap()).unwrap();
    assert!(s.is_degenerate());
    assert!(count_cylinders(&s, 5.0).is_err());
    assert!(count_saddles(&s, 5.0, None).is_err());
}
