use uscm_core::analytic::rabi::{strategy_displaced, strategy_normal_mode, strategy_synergy, RabiParams};
use uscm_core::strategy::*;

#[test]
fn full_comparison_grid_agrees_with_oracle() {
    let grid = ComparisonGrid::new(vec![0.0, 0.5, 0.9, 0.99], default_time_grid(1.0), 1.0, Some(-0.5)).unwrap();
    let rows = run_comparison(&grid).unwrap();
    assert_eq!(rows.len(), 4 * 400);
    let worst = rows.iter().map(|r| r.oracle_deviation).fold(0.0, f64::max);
    assert!(worst <= DEFAULT_ORACLE_TOL, "worst deviation {worst:e}");
    assert!(rows.iter().all(|r| !r.flagged));

    // g-major ordering and the t² envelope bound
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.g_over_gc, grid.g_over_gc[i / 400]);
        assert_eq!(r.t, grid.time_grid[i % 400]);
        let p = RabiParams::at_ratio(1.0, DISPERSIVE_PROXY, r.g_over_gc).unwrap();
        let t2 = r.t * r.t * (1.0 + 1e-12);
        assert!(r.snr_displaced <= strategy_displaced(&p, 1.0).unwrap().envelope * t2);
        assert!(r.snr_normal_mode <= strategy_normal_mode(&p, 1.0).unwrap().envelope * t2);
        assert!(r.snr_synergy.unwrap() <= strategy_synergy(&p, 1.0, -0.5).unwrap().envelope * t2);
    }
}

#[test]
fn comparison_is_deterministic() {
    let grid = ComparisonGrid::new(vec![0.3, 0.95], default_time_grid(1.0), 2.0, None).unwrap();
    let a = run_comparison(&grid).unwrap();
    let b = run_comparison(&grid).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|r| r.snr_synergy.is_none()));
}

#[test]
fn envelope_ordering_flips() {
    let env = |x: f64| {
        let p = RabiParams::at_ratio(1.0, DISPERSIVE_PROXY, x.sqrt()).unwrap();
        (
            strategy_displaced(&p, 1.0).unwrap().envelope,
            strategy_normal_mode(&p, 1.0).unwrap().envelope,
        )
    };
    let (d, n) = env(0.81);
    assert!(d > n);
    let (d, n) = env(0.9801);
    assert!(n > d);
}
