use std::f64::consts::E;

use breaklab::*;

fn tuned(c: f64, eps: f64, depth: usize) -> BreakMap64 {
    BreakMap::new(c, eps, tune_delta(c, eps, &RotationTarget::golden(), depth).unwrap()).unwrap()
}

#[test]
fn constants_for_e_and_one_half() {
    let l = ledger_for(E, None, None).unwrap();
    assert!((l.d - 57.328058).abs() < 1e-6);
    assert!((l.lambda - 0.982856).abs() < 1e-6);
    let half = ledger_for(0.5, None, None).unwrap();
    assert!((half.c_hat - 2.0).abs() < 1e-15);
    assert!((half.d - 16.8).abs() < 1e-12);
    assert!((nu_formula(0.8, 0.1) - 0.046216).abs() < 1e-6);
    assert!(matches!(ledger_for(1.0, None, None), Err(LabError::InvalidParameter(_))));
}

#[test]
fn conjugacy_table_between_break_maps() {
    let f = tuned(E, 1.0, 16);
    let g = tuned(E, 0.0, 16);
    let t = build_conjugacy(&f, &g, 14).unwrap();
    let cf = ContinuedFraction::<f64>::golden(20);
    assert_eq!(t.len() as u64, cf.q(14) + cf.q(13));
    assert!(t.is_order_isomorphic());
    assert_eq!(t.f_points[0], 0.0);
    assert_eq!(t.g_points[0], 0.0);
    let mut x = 0.0;
    while x < 1.0 {
        let h = t.h(x);
        assert!((0.0..=1.0).contains(&h));
        x += 0.01;
    }
}

#[test]
fn rigid_rotations_give_identity_table() {
    let cf = ContinuedFraction::<f64>::silver(30);
    let f = BreakMap::new(1.0, 0.0, cf.value()).unwrap();
    let t = build_conjugacy(&f, &f, 8).unwrap();
    assert_eq!(t.f_points, t.g_points);
    let est = holder_estimate(&t, &f, &f, (3, 6)).unwrap();
    assert!(est.no_obstruction);
    assert_eq!(est.alpha_hat, 1.0);
}

#[test]
fn holder_estimate_checks_depth_and_levels() {
    let f = tuned(2.0, 1.0, 14);
    let t = build_conjugacy(&f, &f, 10).unwrap();
    assert!(matches!(holder_estimate(&t, &f, &f, (4, 9)), Err(LabError::InvalidDepth { .. })));
    assert!(matches!(
        holder_estimate(&t, &f, &f, (4, 5)),
        Err(LabError::InsufficientLevels { .. })
    ));
}

#[test]
fn obstruction_is_visible_for_distinct_maps() {
    let f = tuned(2.0, 1.0, 16);
    let g = tuned(2.0, 0.0, 16);
    let t = build_conjugacy(&f, &g, 14).unwrap();
    let est = holder_estimate(&t, &f, &g, (6, 12)).unwrap();
    assert!(!est.no_obstruction);
    assert!(est.alpha_hat < 1.0);
    for l in &est.levels {
        // The comparison map is Möbius on each piece: its side is rounding only.
        assert!(l.xi_g_direct.abs() < 1e-10);
        assert!(l.composition_residual < 1e-10);
        assert!(l.sum_sq_j >= 0.25 * l.sum_sq_whole);
        assert!((l.s_hat - 1.0 / 12.0).abs() < 1e-3);
    }
}

#[test]
fn experiment_rejects_bad_configs() {
    let base = ExperimentConfig::default();
    for bad in [
        ExperimentConfig { c: 1.0, ..base.clone() },
        ExperimentConfig { eps: 0.0, ..base.clone() },
        ExperimentConfig { c: -2.0, ..base.clone() },
        ExperimentConfig { n_min: 8, n_max: 9, ..base.clone() },
        ExperimentConfig { alpha_gate: 1.5, ..base.clone() },
    ] {
        assert!(matches!(rigidity_experiment::<f64>(&bad), Err(LabError::InvalidParameter(_))));
    }
}

#[test]
fn long_subintervals_of_rigid_rotation() {
    let cf = ContinuedFraction::<f64>::golden(30);
    let map = BreakMap::new(1.0, 0.0, cf.value()).unwrap();
    let coarse = dynamical_partition(&map, &cf, 6).unwrap();
    let fine = dynamical_partition(&map, &cf, 7).unwrap();
    // Each old interval splits into pieces of relative size 1/φ and 1/φ².
    let r = long_subinterval_ratio(&coarse, &fine);
    assert!((r - (cf.value())).abs() < 1e-9, "{}", r);
}

#[test]
fn renormalization_of_break_map_approaches_family() {
    let f = tuned(E, 1.0, 18);
    let cf = rotation_cf(&f, 18).unwrap();
    let early = fit_fractional_linear(&renormalize(&f, &cf, 6).unwrap()).unwrap();
    let late = fit_fractional_linear(&renormalize(&f, &cf, 14).unwrap()).unwrap();
    assert!(late.dist_c2 < early.dist_c2 / 10.0);
    assert!(late.in_uc);
    let pair = renormalize(&f, &cf, 14).unwrap();
    assert!((pair.c_n - E).abs() < 1e-15);
    assert!((pair.f(0.0) - pair.alpha).abs() < 1e-12);
    assert!((pair.g(0.0) + 1.0).abs() < 1e-12);
}

#[test]
fn high_precision_tuning_agrees_with_binary64() {
    let c = Qd::from(E);
    let hp = tune_delta(c, Qd::from(1.0), &RotationTarget::golden(), 14).unwrap();
    let lo = tune_delta(E, 1.0, &RotationTarget::golden(), 14).unwrap();
    assert!((hp.as_f64() - lo).abs() < 1e-9);
}
