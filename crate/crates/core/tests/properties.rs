use breaklab::*;
use proptest::prelude::*;

fn quotients(len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..=5, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_invariants(q in quotients(12)) {
        let cf = ContinuedFraction::<f64>::from_quotients(q.clone()).unwrap();
        prop_assert!(cf.check_invariants());
        prop_assert_eq!(cf.quotients(), &q[..]);
        for n in 1..=12i64 {
            let det = cf.p(n) as i128 * cf.q(n - 1) as i128 - cf.p(n - 1) as i128 * cf.q(n) as i128;
            prop_assert_eq!(det.abs(), 1);
        }
    }

    #[test]
    fn rigid_rotation_reproduces_its_expansion(q in quotients(8)) {
        let cf = ContinuedFraction::<f64>::from_quotients(q.clone()).unwrap();
        let map = BreakMap::new(1.0, 0.0, cf.value()).unwrap();
        let got = rotation_cf(&map, 8).unwrap();
        prop_assert_eq!(got.quotients(), &q[..]);
    }

    #[test]
    fn rotation_number_grows_with_shift(c in 0.3f64..4.0, eps in -2.0f64..2.0, d in 0.0f64..0.9, prefix in quotients(3)) {
        use std::cmp::Ordering::*;
        let lo = BreakMap::new(c, eps, d).unwrap();
        let hi = BreakMap::new(c, eps, d + 0.05).unwrap();
        let (a, b) = (compare_prefix(&lo, &prefix), compare_prefix(&hi, &prefix));
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!(!(a == Greater && b != Greater), "{:?} {:?}", a, b);
            prop_assert!(!(a == Equal && b == Less), "{:?} {:?}", a, b);
        }
    }

    #[test]
    fn distortion_sign_follows_schwarzian(c in 0.3f64..4.0, eps in -3.0f64..3.0, a in 0.0f64..0.9, len in 1e-4f64..0.1) {
        let f = BreakMap::new(c, eps, 0.2).unwrap();
        let j = Interval::new(a, a + len).unwrap();
        let v = xi(&f, &j).unwrap();
        if eps == 0.0 {
            prop_assert_eq!(v, 0.0);
        } else {
            prop_assert!(v < 0.0);
        }
        prop_assert!((v - xi_generic(&f, &j).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn orbit_sum_obeys_composition_law(c in 0.3f64..4.0, eps in -2.0f64..2.0, d in 0.0f64..1.0, a in 0.0f64..0.99) {
        let f = BreakMap::new(c, eps, d).unwrap();
        match xi_orbit(&f, &Interval::new(a, a + 1e-3).unwrap(), 30) {
            Ok(s) => prop_assert!(s.composition_ok(), "{:?}", s),
            Err(LabError::BreakInInterior { .. }) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn mobius_inverse_and_scaling(a in 0.5f64..2.0, b in -1.0f64..1.0, cc in -0.3f64..0.3, k in 0.1f64..10.0, z in -0.9f64..0.9) {
        let m = MobiusMap::new(a, b, cc, 1.0);
        let id = m.compose(&m.inverse());
        prop_assert!(id.projective_distance(&MobiusMap::identity()) < 1e-12);
        prop_assert!(m.projective_distance(&m.scaled(k)) < 1e-12);
        prop_assert!((m.scaled(k).apply(z) - m.apply(z)).abs() < 1e-12);
    }

    #[test]
    fn rigid_step_is_gauss_map(alpha in 0.05f64..0.95) {
        let a = (1.0 / alpha).floor() as u64;
        prop_assume!((1.0 / alpha - a as f64) > 1e-6);
        let next = mobius_renorm_step(&MobiusPairParams::new(alpha, 0.0, 1.0), a).unwrap();
        prop_assert!((next.alpha - (1.0 / alpha - a as f64)).abs() < 1e-9);
    }

    #[test]
    fn ledger_is_symmetric(c in 0.05f64..20.0) {
        prop_assume!((c - 1.0).abs() > 1e-9);
        let a = ledger_for(c, None, None).unwrap();
        let b = ledger_for(1.0 / c, None, None).unwrap();
        prop_assert!((a.c_hat - b.c_hat).abs() < 1e-12 * a.c_hat);
        prop_assert!((a.d - b.d).abs() < 1e-10 * a.d);
        prop_assert!(a.d > a.c_hat.powi(4));
        prop_assert!(a.lambda > 0.0 && a.lambda < 1.0);
    }

    #[test]
    fn nu_formula_stays_in_unit_interval(g in 0.01f64..0.99, r in 0.01f64..0.99) {
        let nu = nu_formula(g, r);
        prop_assert!(nu > 0.0 && nu < 1.0);
    }

    #[test]
    fn target_names_round_trip(q in prop::collection::vec(1u64..50, 1..6)) {
        let spec = TargetSpec::Periodic(q);
        let back: TargetSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(back, spec);
    }
}

#[test]
fn rigid_partitions_have_equal_old_intervals() {
    let cf = ContinuedFraction::<f64>::golden(30);
    let map = BreakMap::new(1.0, 0.0, cf.value()).unwrap();
    for n in 2..=14 {
        let p = dynamical_partition(&map, &cf, n).unwrap();
        let mu = cf.mu(n as i64 - 1);
        for iv in &p.old {
            assert!((iv.length - mu).abs() < 100.0 * f64::EPSILON / 2.0 * cf.q(n as i64) as f64);
        }
    }
}
