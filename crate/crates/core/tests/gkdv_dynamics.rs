use kdvlab_core::dynamics::*;
use kdvlab_core::spectral::*;
use kdvlab_core::Error;

fn grid(l: f64, n: usize) -> TorusGrid<f64> {
    TorusGrid::new(l, n).unwrap()
}

fn k(v: f64) -> KappaParam<f64> {
    KappaParam::new(v).unwrap()
}

fn bump(g: &TorusGrid<f64>, amp: f64) -> RealField<f64> {
    RealField::from_fn(g, move |x| amp * (-x * x).exp())
}

fn soliton_error(dt: f64) -> f64 {
    let g = grid(40.0, 256);
    let u0 = soliton(&g, 1.0, -5.0, 0.0);
    let traj = solve(&u0, 1.0, dt, &CoefficientSet::zero(&g), usize::MAX).unwrap();
    let exact = soliton(&g, 1.0, -5.0, 1.0);
    (traj.last() - &exact).l2_norm() / exact.l2_norm()
}

#[test]
fn soliton_travels() {
    let err = soliton_error(1e-3);
    assert!(err <= 1e-4, "{err}");
}

#[test]
fn fourth_order_in_time() {
    let dts = [2e-3, 1e-3, 5e-4, 2.5e-4, 1.25e-4];
    let errs: Vec<f64> = dts.iter().map(|&dt| soliton_error(dt)).collect();
    for w in errs.windows(2) {
        let rate = (w[0] / w[1]).log2();
        assert!(rate > 3.6 && rate < 4.4, "{errs:?}");
    }
}

#[test]
fn zero_duration_keeps_initial_state() {
    let g = grid(40.0, 64);
    let u0 = bump(&g, 0.3);
    let traj = solve(&u0, 0.0, 1e-3, &CoefficientSet::zero(&g), 1).unwrap();
    assert_eq!(traj.len(), 1);
    assert_eq!(traj.snapshots()[0].samples(), u0.samples());
}

#[test]
fn mass_is_preserved() {
    let g = grid(40.0, 256);
    let u0 = RealField::from_fn(&g, |x| 0.6 * (-x * x / 2.0).exp() * (1.0 + 0.4 * x));
    let traj = solve(&u0, 1.0, 2e-3, &CoefficientSet::zero(&g), 50).unwrap();
    let m0 = u0.integral();
    for r in traj.records() {
        assert!((r.mass - m0).abs() <= 1e-10 * m0.abs(), "{} {}", r.mass, m0);
    }
}

#[test]
fn l2_balance_pure_kdv() {
    let g = grid(40.0, 256);
    let u0 = bump(&g, 0.5);
    let traj = solve(&u0, 0.2, 1e-3, &CoefficientSet::zero(&g), 10).unwrap();
    let res = l2_identity_residual(&traj, &CoefficientSet::zero(&g)).unwrap();
    assert_eq!(res.len(), traj.len() - 2);
    assert!(res.iter().all(|&(_, r)| r <= 1e-8), "{res:?}");
}

#[test]
fn l2_balance_with_linear_growth() {
    let g = grid(40.0, 256);
    let coeffs = CoefficientSet::from_static(&g, [None, None, None, Some(RealField::constant(&g, 1.0))]).unwrap();
    let u0 = bump(&g, 0.05);
    let mut worst = Vec::new();
    for save in [1e-3, 5e-4] {
        let traj = solve(&u0, 0.1, 1e-4, &coeffs, (save / 1e-4f64).round() as usize).unwrap();
        let res = l2_identity_residual(&traj, &coeffs).unwrap();
        worst.push(res.iter().map(|r| r.1).fold(0.0, f64::max));
    }
    assert!(worst[0] <= 1e-4, "{worst:?}");
    let order = (worst[0] / worst[1]).log2();
    assert!(order > 1.7, "{worst:?}");
}

#[test]
fn l2_balance_with_all_coefficients() {
    let g = grid(40.0, 256);
    let a = |s: f64, w: f64| Some(RealField::from_fn(&g, move |x| s * (-x * x / w).exp()));
    let coeffs = CoefficientSet::from_static(&g, [a(0.1, 4.0), a(0.3, 2.0), a(0.2, 3.0), a(-0.2, 5.0)]).unwrap();
    let traj = solve(&bump(&g, 0.3), 0.05, 1e-4, &coeffs, 5).unwrap();
    let res = l2_identity_residual(&traj, &coeffs).unwrap();
    assert!(res.iter().all(|&(_, r)| r <= 1e-5), "{res:?}");
}

#[test]
fn l2_residual_needs_three_snapshots() {
    let g = grid(40.0, 64);
    let traj = solve(&bump(&g, 0.1), 1e-3, 1e-3, &CoefficientSet::zero(&g), 1).unwrap();
    assert_eq!(traj.len(), 2);
    assert!(matches!(
        l2_identity_residual(&traj, &CoefficientSet::zero(&g)),
        Err(Error::TooFewSnapshots { .. })
    ));
}

#[test]
fn nonuniform_snapshots_rejected() {
    let g = grid(40.0, 64);
    let u = bump(&g, 0.1);
    let traj = Trajectory::from_snapshots(vec![0.0, 0.1, 0.3], vec![u.clone(), u.clone(), u], vec![], 0.1).unwrap();
    assert!(matches!(
        l2_identity_residual(&traj, &CoefficientSet::zero(&g)),
        Err(Error::NonuniformSaveInterval)
    ));
}

#[test]
fn alpha_conserved_by_kdv() {
    let g = grid(50.0, 512);
    let u0 = bump(&g, 0.5);
    let dt = default_dt(&g);
    let traj = solve(&u0, 0.1, dt, &CoefficientSet::zero(&g), 2000).unwrap();
    let drift = alpha_drift(&traj, k(3.0)).unwrap();
    let worst = drift.iter().cloned().fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn alpha_drift_of_zero_solution() {
    let g = grid(50.0, 128);
    let traj = solve(&RealField::zeros(&g), 0.01, 1e-3, &CoefficientSet::zero(&g), 5).unwrap();
    assert!(alpha_drift(&traj, k(2.0)).unwrap().iter().all(|&d| d == 0.0));
}

#[test]
fn alpha_drift_needs_admissible_kappa() {
    let g = grid(50.0, 128);
    let traj = solve(&bump(&g, 3.0), 0.002, 1e-3, &CoefficientSet::zero(&g), 1).unwrap();
    match alpha_drift(&traj, k(1.0)) {
        Err(Error::KappaTooSmall { t, required, .. }) => {
            assert_eq!(t, 0.0);
            assert!(required > 1.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn alpha_change_matches_integrated_microlaw() {
    let g = grid(50.0, 512);
    let a = |s: f64, w: f64| Some(RealField::from_fn(&g, move |x| s * (-(x - 0.5).powi(2) / w).exp()));
    let coeffs = CoefficientSet::from_static(&g, [a(0.05, 4.0), a(0.2, 2.0), a(0.1, 3.0), a(0.3, 5.0)]).unwrap();
    let u0 = bump(&g, 0.5);
    // 8400 steps sit just under the default step and split into 10 save intervals
    let dt = 0.1 / 8400.0;
    assert!(dt <= default_dt(&g));
    let traj = solve(&u0, 0.1, dt, &coeffs, 840).unwrap();
    assert_eq!(traj.len(), 11);
    let alpha = alpha_series(&traj, k(3.0)).unwrap();
    let change = alpha[10] - alpha[0];
    let budget = integrated_microlaw(&traj, &coeffs, k(3.0)).unwrap();
    assert!(change.abs() > 1e-4 * alpha[0], "coefficients should move alpha: {change}");
    assert!((change - budget).abs() <= 1e-4 * alpha[0].max(1e-10), "{change} {budget}");
}

#[test]
fn time_reversal_returns_to_start() {
    let g = grid(40.0, 256);
    let u0 = RealField::from_fn(&g, |x| 0.8 * (-x * x / 2.0).exp());
    let zero = CoefficientSet::zero(&g);
    let fwd = solve(&u0, 0.5, 1e-3, &zero, usize::MAX).unwrap();
    let opts = SolveOptions { t0: 0.5, ..SolveOptions::default() };
    let back = solve_with(&GkdvEquation::new(zero), fwd.last(), -0.5, -1e-3, &opts).unwrap();
    assert!(back.times()[1] < back.times()[0]);
    let err = (back.last() - &u0).l2_norm();
    assert!(err <= 1e-6, "{err}");
}

#[test]
fn refinement_reduces_alpha_drift() {
    let mut drifts = Vec::new();
    for (n, dt) in [(256usize, 4e-4), (512, 1e-4)] {
        let g = grid(50.0, n);
        let u0 = RealField::from_fn(&g, |x| 0.8 * (-x * x).exp());
        let traj = solve(&u0, 0.1, dt, &CoefficientSet::zero(&g), usize::MAX).unwrap();
        drifts.push(*alpha_drift(&traj, k(3.0)).unwrap().last().unwrap());
    }
    assert!(drifts[1] < drifts[0], "{drifts:?}");
}

#[test]
fn blow_up_halts_with_marked_record() {
    let g = grid(20.0, 128);
    let u0 = RealField::from_fn(&g, |x| -30.0 * (-x * x * 4.0).exp());
    let traj = solve(&u0, 1.0, 0.05, &CoefficientSet::zero(&g), 1).unwrap();
    assert!(traj.halted_at().is_some());
    let last = traj.records().last().unwrap();
    assert!(last.diverged);
    assert!(traj.records()[..traj.len() - 1].iter().all(|r| !r.diverged));
}

#[test]
fn single_step_reports_divergence() {
    let g = grid(20.0, 128);
    let mut u = RealField::zeros(&g);
    u.samples_mut()[5] = f64::NAN;
    assert!(matches!(step(&u, 0.0, 1e-3, &CoefficientSet::zero(&g)), Err(Error::Diverged { .. })));
}

#[test]
fn records_track_alpha_when_requested() {
    let g = grid(50.0, 256);
    let u0 = bump(&g, 0.3);
    let opts = SolveOptions { save_every: 10, kappas: vec![2.0, 0.5], ..SolveOptions::default() };
    let traj = solve_with(&GkdvEquation::new(CoefficientSet::zero(&g)), &u0, 0.02, 1e-3, &opts).unwrap();
    let r = &traj.records()[0];
    assert_eq!(r.alpha.len(), 2);
    assert!(r.alpha[0].unwrap() > 0.0);
    assert!(r.alpha[1].is_none());
    assert!((r.h1k_norm - sobolev_kappa_norm(&u0, -1.0, k(2.0))).abs() < 1e-14);
}

mod quadrature {
    use kdvlab_core::dynamics::*;

    #[test]
    fn simpson_and_trapezoid() {
        let xs: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let cubic: Vec<f64> = xs.iter().map(|x| x * x * x).collect();
        assert!((integrate_uniform(&cubic, 0.1) - 0.25).abs() < 1e-14);
        let lin: Vec<f64> = xs[..4].iter().map(|x| 2.0 * x).collect();
        assert!((integrate_uniform(&lin, 0.1) - 0.09).abs() < 1e-14);
    }
}

mod coefficient_sets {
    use kdvlab_core::dynamics::*;
    use kdvlab_core::spectral::*;
    use kdvlab_core::Error;
    use std::sync::Arc;

    #[test]
    fn translation_is_exact_for_band_limited_data() {
        let g = TorusGrid::<f64>::new(2.0 * std::f64::consts::PI, 32).unwrap();
        let f = RealField::from_fn(&g, |x| (2.0 * x).sin() + (5.0 * x).cos());
        let s = translate(&f, 0.3);
        let exact = RealField::from_fn(&g, |x| (2.0 * (x + 0.3)).sin() + (5.0 * (x + 0.3)).cos());
        assert!(s.distance_sup(&exact) < 1e-13);
    }

    #[test]
    fn dynamic_sampler() {
        let g = TorusGrid::<f64>::new(10.0, 16).unwrap();
        let g2 = g.clone();
        let s: Sampler<f64> = Arc::new(move |t| RealField::constant(&g2, t));
        let set = CoefficientSet::new(
            &g,
            [Coefficient::Zero, Coefficient::Zero, Coefficient::Zero, Coefficient::Dynamic(s)],
            CoefficientMeta::default(),
        )
        .unwrap();
        assert!(set.sample(1, 0.5).unwrap().is_none());
        assert_eq!(set.sample(4, 0.5).unwrap().unwrap().samples()[0], 0.5);
    }

    #[test]
    fn foreign_grid_rejected() {
        let g = TorusGrid::<f64>::new(10.0, 16).unwrap();
        let other = TorusGrid::<f64>::new(11.0, 16).unwrap();
        let r = CoefficientSet::from_static(&g, [Some(RealField::zeros(&other)), None, None, None]);
        assert!(matches!(r, Err(Error::GridMismatch)));
    }
}

mod rhs {
    use kdvlab_core::dynamics::*;
    use kdvlab_core::spectral::*;
    use kdvlab_core::Error;
    use std::f64::consts::PI;

    fn circle() -> TorusGrid<f64> {
        TorusGrid::new(2.0 * PI, 32).unwrap()
    }

    #[test]
    fn zero_state_has_zero_rhs() {
        let g = circle();
        let c = CoefficientSet::from_static(&g, [None, None, None, Some(RealField::constant(&g, 2.0))]).unwrap();
        assert!(gkdv_rhs(&RealField::zeros(&g), 0.0, &c).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn cosine_rhs() {
        let g = circle();
        let u = RealField::from_fn(&g, f64::cos);
        let r = gkdv_rhs(&u, 0.0, &CoefficientSet::zero(&g)).unwrap();
        let exact = RealField::from_fn(&g, |x| -x.sin() - 3.0 * (2.0 * x).sin());
        assert!(r.distance_sup(&exact) < 1e-12);
        let c = CoefficientSet::from_static(&g, [None, None, Some(RealField::constant(&g, 1.0)), None]).unwrap();
        let r3 = gkdv_rhs(&u, 0.0, &c).unwrap();
        let exact3 = RealField::from_fn(&g, |x| -2.0 * x.sin() - 3.0 * (2.0 * x).sin());
        assert!(r3.distance_sup(&exact3) < 1e-12);
    }

    #[test]
    fn all_terms() {
        let g = circle();
        let u = RealField::from_fn(&g, f64::cos);
        let a1 = RealField::from_fn(&g, |x| 0.5 * x.sin());
        let a2 = RealField::constant(&g, 0.25);
        let a4 = RealField::from_fn(&g, |x| (2.0 * x).cos());
        let c = CoefficientSet::from_static(&g, [Some(a1), Some(a2), None, Some(a4)]).unwrap();
        let r = gkdv_rhs(&u, 0.0, &c).unwrap();
        // (0.5 sin x * -sin x)' = -0.5 sin 2x ; 0.25 cos^2 ; cos 2x cos x
        let exact = RealField::from_fn(&g, |x| {
            -x.sin() - 3.0 * (2.0 * x).sin() - 0.5 * (2.0 * x).sin()
                + 0.25 * x.cos().powi(2)
                + (2.0 * x).cos() * x.cos()
        });
        assert!(r.distance_sup(&exact) < 1e-12);
    }

    #[test]
    fn non_finite_is_divergence() {
        let g = circle();
        let mut u = RealField::zeros(&g);
        u.samples_mut()[0] = f64::INFINITY;
        assert!(matches!(gkdv_rhs(&u, 0.5, &CoefficientSet::zero(&g)), Err(Error::Diverged { .. })));
    }
}
