use kdvlab_core::bottom::*;
use kdvlab_core::dynamics::{gkdv_rhs, solve_with, CoefficientSet, GkdvEquation, SolveOptions};
use kdvlab_core::smoothing::{hypothesis_check, HypothesisMode, WeightFamily};
use kdvlab_core::spectral::{dealiased_product, derivative, RealField, TorusGrid, TrigInterpolant};
use kdvlab_core::Error;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn grid(l: f64, n: usize) -> TorusGrid<f64> {
    TorusGrid::new(l, n).unwrap()
}

fn sech2(g: &TorusGrid<f64>, amplitude: f64, width: f64) -> RealField<f64> {
    BottomSource::Sech2 { amplitude, width }.elevation(g).unwrap()
}

fn profile(c: &RealField<f64>) -> BottomProfile<f64> {
    build_profile(c, DEFAULT_DEPTH_MARGIN).unwrap()
}

/// Random real field with modes `1..=max_mode` only.
fn band_limited(g: &TorusGrid<f64>, max_mode: usize, seed: u64) -> RealField<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.points();
    let mut spec = vec![Complex::new(0.0, 0.0); n];
    for k in 1..=max_mode {
        let c = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (n as f64 / k as f64);
        spec[k] = c;
        spec[n - k] = c.conj();
    }
    RealField::from_spectrum(g, spec)
}

fn rel_l2(a: &RealField<f64>, b: &RealField<f64>) -> f64 {
    (a - b).l2_norm() / b.l2_norm()
}

#[test]
fn flat_bottom_is_the_identity_map() {
    let g = grid(40.0, 128);
    let p = profile(&RealField::zeros(&g));
    assert!(p.depth().distance_sup(&RealField::constant(&g, 1.0)) == 0.0);
    assert!((p.stretch() - 1.0).abs() < 1e-15);
    for (y, x) in p.y_samples().iter().zip(g.coordinates()) {
        assert!((y - x).abs() < 1e-12);
    }
    assert!((p.y_grid().length() - 40.0).abs() < 1e-12);
}

#[test]
fn constant_bottom_rescales_the_coordinate() {
    let g = grid(40.0, 128);
    let p = profile(&RealField::constant(&g, 0.19));
    assert!(p.depth().distance_sup(&RealField::constant(&g, 0.9)) < 1e-15);
    let s = 0.9f64.powf(-5.0 / 3.0);
    for (y, x) in p.y_samples().iter().zip(g.coordinates()) {
        assert!((y - x * s).abs() < 1e-12 * (1.0 + x.abs()));
    }
}

#[test]
fn bumpy_bottom_map_and_inverse() {
    let g = grid(50.0, 512);
    let c = sech2(&g, 0.1, 3.0);
    let p = profile(&c);
    assert!(p.y_samples().windows(2).all(|w| w[1] > w[0]));
    let worst = g
        .coordinates()
        .iter()
        .zip(c.samples())
        .map(|(&x, &cv)| (p.y_prime(x) - (1.0 - cv).powf(-5.0 / 6.0)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
    for k in 0..200 {
        let x = -25.0 + 0.2503 * k as f64;
        assert!((p.y_inverse(p.y(x)) - x).abs() < 1e-8);
    }
    assert!(p.y(0.0).abs() < 1e-14);
}

#[test]
fn shallow_bottom_is_rejected() {
    let g = grid(40.0, 128);
    let c = sech2(&g, 0.95, 3.0);
    assert!(matches!(build_profile(&c, 0.1), Err(Error::BottomTooShallow { .. })));
    assert!(build_profile(&sech2(&g, 0.85, 3.0), 0.1).is_ok());
}

#[test]
fn flat_and_constant_bottoms_give_trivial_coefficients() {
    let g = grid(40.0, 128);
    let flat = synth_coefficients(&profile(&RealField::zeros(&g))).unwrap();
    for j in 1..=4 {
        let a = flat.sample(j, 0.3).unwrap();
        assert!(a.map_or(0.0, |a| a.max_abs()) < 1e-14, "a{j}");
    }
    let c0 = 0.19;
    let set = synth_coefficients(&profile(&RealField::constant(&g, c0))).unwrap();
    let yg = set.grid().clone();
    assert!(set.sample(2, 0.0).unwrap().unwrap().max_abs() < 1e-14);
    assert!(set.sample(4, 0.0).unwrap().unwrap().max_abs() < 1e-14);
    let a3 = set.sample(3, 0.0).unwrap().unwrap();
    let expected = 4.0 * (1.0 - (1.0 - c0).powf(-1.0 / 3.0));
    assert!(a3.distance_sup(&RealField::constant(&yg, expected)) < 1e-12);
    let rep = hypothesis_check(&set, HypothesisMode::Pointwise, &[0.0], &WeightFamily::with_default_stride(&yg)).unwrap();
    assert!(rep.coefficients[2].non_decaying);
}

#[test]
fn small_bumps_give_small_coefficients() {
    let delta = |eta: f64| {
        let g = grid(64.0, 512);
        let set = synth_coefficients(&profile(&sech2(&g, eta, 3.0))).unwrap();
        let w = WeightFamily::with_default_stride(set.grid());
        let rep = hypothesis_check(&set, HypothesisMode::Pointwise, &[0.0], &w).unwrap();
        let c = &rep.coefficients;
        assert!(!c[1].non_decaying && !c[2].non_decaying && !c[3].non_decaying, "{rep:?}");
        (c[1].value.unwrap(), c[2].value.unwrap(), c[3].value.unwrap())
    };
    let (a2, a3, a4) = delta(0.01);
    // delta = O(eta); the constant reflects the (1+x^2) weight across the width-3 bump
    assert!(a2 <= 25.0 * 0.01 && a3 <= 25.0 * 0.01, "{a2} {a3}");
    assert!(a4.is_finite());
    let (b2, b3, _) = delta(0.02);
    assert!((b2 / a2 - 2.0).abs() < 0.05 && (b3 / a3 - 2.0).abs() < 0.05);
}

#[test]
fn a3_vanishes_at_the_box_edge() {
    let g = grid(64.0, 512);
    let set = synth_coefficients(&profile(&sech2(&g, 0.1, 3.0))).unwrap();
    let a3 = set.sample(3, 0.0).unwrap().unwrap();
    let n = a3.len();
    let edge = [0, 1, n - 2, n - 1].iter().map(|&i| a3.samples()[i].abs()).fold(0.0, f64::max);
    assert!(edge <= 1e-8, "{edge}");
}

#[test]
fn flat_transform_is_a_shift() {
    let g = grid(16.0 * PI, 256);
    let p = profile(&RealField::zeros(&g));
    let v = band_limited(&g, 20, 1);
    let u = transform_forward(&v, 0.0, &p).unwrap();
    assert!(u.field.distance_sup(&v) < 1e-12 * v.max_abs());
    let u = transform_forward(&v, 1.0, &p).unwrap();
    let interp = TrigInterpolant::new(&v);
    let shifted = RealField::from_fn(&g, |x| interp.eval(x - 4.0));
    assert!(u.field.distance_sup(&shifted) < 1e-8, "{}", u.field.distance_sup(&shifted));
    assert!(!u.aliased());
}

#[test]
fn round_trip_is_the_identity() {
    let g = grid(50.0, 256);
    let p = profile(&(&sech2(&g, 0.1, 3.0) - &sech2(&g, 0.05, 1.5)));
    for (seed, t) in [(3, 0.0), (4, 0.37)] {
        let v = band_limited(p.y_grid(), 16, seed);
        let u = transform_forward(&v, t, &p).unwrap();
        let back = transform_backward(&u.field, t, &p).unwrap();
        assert!(rel_l2(&back.field, &v) <= 1e-8, "{}", rel_l2(&back.field, &v));
    }
}

#[test]
fn composition_preserves_norms_up_to_the_jacobian() {
    let g = grid(50.0, 256);
    let p = profile(&sech2(&g, 0.3, 2.0));
    let (lo, hi) = p.jacobian_bounds();
    for seed in 5..8 {
        let f = band_limited(p.y_grid(), 12, seed);
        let ratio = p.compose(&f).unwrap().l2_norm() / f.l2_norm();
        assert!(ratio >= hi.powf(-0.5) * (1.0 - 1e-9) && ratio <= lo.powf(-0.5) * (1.0 + 1e-9), "{ratio} {lo} {hi}");
    }
}

#[test]
fn aliasing_is_reported() {
    let g = grid(50.0, 128);
    let p = profile(&sech2(&g, 0.3, 2.0));
    let v = band_limited(p.y_grid(), 60, 9);
    assert!(transform_forward(&v, 0.0, &p).unwrap().aliased());
}

/// `u_t` for the variable-bottom model, evaluated directly in physical space.
fn bottom_rhs(u: &RealField<f64>, p: &BottomProfile<f64>) -> RealField<f64> {
    let b = p.depth();
    let d1 = derivative(u, 1).unwrap();
    let d3 = derivative(u, 3).unwrap();
    let b5 = b.map(|v| v.powi(5));
    let disp = dealiased_product(&b5, &d3);
    let nl = dealiased_product(u, &d1).scale(6.0);
    let drift = dealiased_product(b, &d1).scale(4.0);
    let pot = dealiased_product(p.depth_derivative(1), u).scale(6.0);
    &(&(&nl - &disp) - &drift) - &pot
}

#[test]
fn change_of_variables_maps_the_equations() {
    // u_t(x) = b^{5/3}(x) [v_t - 4 v'](y(x)) when u = b^{5/3} v(y(x)) at t = 0
    let g = grid(40.0, 512);
    let p = profile(&sech2(&g, 0.1, 3.0));
    let v = RealField::from_fn(p.y_grid(), |y| 0.5 * (-(y - 1.0) * (y - 1.0)).exp());
    let u = transform_forward(&v, 0.0, &p).unwrap().field;
    let direct = bottom_rhs(&u, &p);
    let check = |set: &CoefficientSet<f64>| {
        let vt = gkdv_rhs(&v, 0.0, set).unwrap();
        let moving = &vt - &derivative(&v, 1).unwrap().scale(4.0);
        let mapped = transform_forward(&moving, 0.0, &p).unwrap().field;
        rel_l2(&mapped, &direct)
    };
    let set = synth_coefficients(&p).unwrap();
    let good = check(&set);
    assert!(good < 1e-8, "{good}");
    // the printed 10/3 in front of b^2 (b')^3 breaks the identity
    let b = p.depth();
    let b1 = p.depth_derivative(1);
    let extra = b.zip_map(b1, |b, b1| (10.0 / 3.0 - 10.0 / 27.0) * b * b * b1 * b1 * b1);
    let [a2, a3, a4] = coefficient_fields(&p);
    let wrong_a4 = &a4 + &extra;
    let compose = |f: &RealField<f64>| Some(p.compose_inverse(f).unwrap());
    let wrong = CoefficientSet::from_static(
        p.y_grid(),
        [None, compose(&a2), compose(&a3), compose(&wrong_a4)],
    )
    .unwrap();
    let bad = check(&wrong);
    assert!(bad > 100.0 * good, "{bad} vs {good}");
}

#[test]
fn direct_and_transformed_dynamics_agree() {
    let g = grid(40.0, 256);
    let p = profile(&sech2(&g, 0.1, 3.0));
    let u0 = RealField::from_fn(&g, |x| 0.5 * (-x * x).exp());
    let v0 = transform_backward(&u0, 0.0, &p).unwrap().field;
    let horizon = 0.1;
    let dt = 2e-5;
    let opts = SolveOptions { save_every: 1_000_000, ..SolveOptions::default() };
    let direct = solve_with(&VariableBottomEquation::new(&p), &u0, horizon, dt, &opts).unwrap();
    let set = synth_coefficients(&p).unwrap();
    let moved = solve_with(&GkdvEquation::new(set), &v0, horizon, dt, &opts).unwrap();
    assert!(direct.halted_at().is_none() && moved.halted_at().is_none());
    let mapped = transform_forward(moved.last(), horizon, &p).unwrap().field;
    let err = rel_l2(&mapped, direct.last());
    assert!(err <= 1e-4, "{err}");
}

#[test]
fn profile_sources_and_exports() {
    let g = grid(20.0, 64);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bottom.txt");
    let c = sech2(&g, 0.2, 2.0);
    let text: String =
        g.coordinates().iter().zip(c.samples()).map(|(x, v)| format!("{x:.17e} {v:.17e}\n")).collect();
    std::fs::write(&path, format!("# x c\n{text}")).unwrap();
    let src = BottomSource::File { path: path.display().to_string() };
    assert_eq!(src.elevation(&g).unwrap().samples(), c.samples());
    std::fs::write(&path, "0.0 0.1\n").unwrap();
    assert!(matches!(src.elevation(&g), Err(Error::Parse(_))));
    let json = r#"{"kind":"sech2","amplitude":0.2,"width":2.0}"#;
    let parsed: BottomSource = serde_json::from_str(json).unwrap();
    assert_eq!(parsed, BottomSource::Sech2 { amplitude: 0.2, width: 2.0 });
    let set = synth_coefficients(&profile(&c)).unwrap();
    let mut csv = Vec::new();
    write_coefficients_csv(&set, &mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert!(csv.starts_with("y,a2,a3,a4\n"));
    assert_eq!(csv.lines().count(), 65);
    assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 4));
}
