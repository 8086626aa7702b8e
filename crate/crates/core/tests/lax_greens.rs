use kdvlab_core::dynamics::{Coefficient, CoefficientMeta, CoefficientSet};
use kdvlab_core::lax::*;
use kdvlab_core::spectral::*;
use kdvlab_core::Error;

fn grid(l: f64, n: usize) -> TorusGrid<f64> {
    TorusGrid::new(l, n).unwrap()
}

fn k(v: f64) -> KappaParam<f64> {
    KappaParam::new(v).unwrap()
}

fn sech2(g: &TorusGrid<f64>, amp: f64) -> RealField<f64> {
    RealField::from_fn(g, |x| amp / x.cosh().powi(2))
}

#[test]
fn free_resolvent_kernel_is_wrapped_exponential() {
    let g = grid(50.0, 256);
    let op = build_lax_resolvent(&RealField::zeros(&g), k(1.0)).unwrap();
    let mut worst: f64 = 0.0;
    for i in (0..256).step_by(5) {
        for j in 0..256 {
            let d = g.periodic_offset(g.x(i), g.x(j)).abs();
            let line = (-d).exp() / 2.0 + (-(50.0 - d)).exp() / 2.0;
            worst = worst.max((op.kernel().get(i, j) - line).abs());
        }
    }
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn constant_potential_diagonal() {
    let g = grid(50.0, 256);
    let op = build_lax_resolvent(&RealField::constant(&g, 3.0), k(1.0)).unwrap();
    assert!(op.diagonal().samples().iter().all(|&v| (v - 0.25).abs() <= 1e-6));
    assert!(op.relative_asymmetry() <= 1e-8);
}

#[test]
fn near_singular_operator_detected() {
    // xi = +-1 are grid modes on a 2 pi box, so -d^2 + kappa^2 - kappa^2 - 1 has a null space
    let g = grid(2.0 * std::f64::consts::PI, 64);
    let r = build_lax_resolvent(&RealField::constant(&g, -5.0), k(2.0));
    assert!(matches!(r, Err(Error::NearSingularOperator { .. })), "{r:?}");
}

#[test]
fn direct_greens_examples() {
    let g = grid(50.0, 256);
    let g0 = greens_diagonal_direct(&RealField::zeros(&g), k(2.0)).unwrap();
    assert!(g0.samples().iter().all(|&v| (v - 0.25).abs() <= 1e-8));
    let exact = 1.0 / (2.0 * 5f64.sqrt());
    for n in [256, 512] {
        let g1 = greens_diagonal_direct(&RealField::constant(&grid(50.0, n), 1.0), k(2.0)).unwrap();
        assert!(g1.samples().iter().all(|&v| (v - exact).abs() <= 1e-6));
    }
}

#[test]
fn direct_and_series_agree_on_soliton_profile() {
    let g = grid(50.0, 512);
    let u = sech2(&g, -2.0);
    assert!(contraction_ratio(&u, k(3.0)) <= 0.5);
    let d = greens_diagonal_direct(&u, k(3.0)).unwrap();
    let (s, used) = greens_diagonal_series(&u, k(3.0), 40, 1e-12).unwrap();
    assert!(used > 3);
    assert!(d.distance_sup(&s) <= 1e-8, "{}", d.distance_sup(&s));
}

#[test]
fn collocation_first_term_tracks_closed_form_h1() {
    // the dense l = 1 diagonal differs from the multiplier form only by a
    // truncation tail of size (1/3pi) xi_max^{-3} ||u_hat||_1-ish; it shrinks ~8x per doubling
    let mut errs = Vec::new();
    for n in [256usize, 512] {
        let g = grid(50.0, n);
        let u = colored_field(&g, k(2.0), 0.5, 4);
        let dense = &collocation_series_terms(&u, k(2.0), 1)[0];
        let exact = h1_field(&u, k(2.0));
        let tail = u.max_abs() / (3.0 * std::f64::consts::PI * g.xi_max().powi(3));
        let err = dense.distance_sup(&exact);
        assert!(err <= 2.0 * tail, "{err} vs {tail}");
        errs.push(err);
    }
    assert!(errs[1] < errs[0] / 5.0, "{errs:?}");
}

#[test]
fn density_examples() {
    let g = grid(50.0, 512);
    let zero = rho_alpha(&RealField::zeros(&g), k(2.0), GreensMethod::Direct).unwrap();
    assert!(zero.rho.max_abs() <= 1e-12 && zero.alpha.abs() <= 1e-10);
    assert!(zero.j.max_abs() <= 1e-10);
    let one = rho_alpha(&RealField::constant(&g, 1.0), k(2.0), GreensMethod::Direct).unwrap();
    let rho = 2.25 - 5f64.sqrt();
    assert!((rho - 0.0139320).abs() < 1e-7);
    assert!(one.rho.samples().iter().all(|&v| (v - rho).abs() <= 1e-7));
    assert!((one.alpha - 50.0 * rho).abs() <= 50.0 * 1e-7);
    let jc = 32.0 - 7.0 * 2.0 * 5f64.sqrt() - 0.75;
    assert!((jc + 0.05495).abs() < 1e-5);
    assert!(one.j.samples().iter().all(|&v| (v - jc).abs() <= 1e-6));
    assert!(one.one_over_g.pointwise(&one.g).samples().iter().all(|&v| (v - 1.0).abs() <= 1e-10));
}

#[test]
fn series_method_populates_terms() {
    let g = grid(50.0, 512);
    let data = rho_alpha(&RealField::constant(&g, 1.0), k(2.0), GreensMethod::series()).unwrap();
    assert!(data.series_terms_used > 5);
    assert!((data.alpha - 50.0 * (2.25 - 5f64.sqrt())).abs() <= 1e-5);
    assert_eq!(data.summary().method, "series");
    let mut buf = Vec::new();
    data.write_columns(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 513);
}

#[test]
fn current_decays_for_soliton() {
    let g = grid(50.0, 512);
    let u = sech2(&g, -2.0);
    let d = rho_alpha(&u, k(3.0), GreensMethod::Direct).unwrap();
    assert!(d.j.samples()[0].abs() <= 1e-8, "{}", d.j.samples()[0]);
    assert!(d.rho.min() >= DENSITY_FLOOR);
}

#[test]
fn dg_examples_and_finite_differences() {
    let g = grid(50.0, 256);
    let one = RealField::constant(&g, 1.0);
    let dg = dg_directional(&RealField::zeros(&g), k(1.0), &one).unwrap();
    assert!(dg.samples().iter().all(|&v| (v + 0.25).abs() <= 1e-12));
    let u = RealField::from_fn(&g, |x| 0.4 * (-x * x / 2.0).exp());
    assert!(dg_directional(&u, k(2.0), &RealField::zeros(&g)).unwrap().max_abs() == 0.0);

    let f = RealField::from_fn(&g, |x| (-(x - 1.0).powi(2)).exp() * (1.0 + 0.3 * x));
    let s = 1e-5;
    let plus = greens_diagonal_direct(&(&u + &f.scale(s)), k(2.0)).unwrap();
    let minus = greens_diagonal_direct(&(&u - &f.scale(s)), k(2.0)).unwrap();
    let fd = (&plus - &minus).scale(0.5 / s);
    let an = dg_directional(&u, k(2.0), &f).unwrap();
    assert!((&fd - &an).l2_norm() <= 1e-6 * an.l2_norm(), "{}", (&fd - &an).l2_norm() / an.l2_norm());

    let rp = rho_alpha(&(&u + &f.scale(s)), k(2.0), GreensMethod::Direct).unwrap().rho;
    let rm = rho_alpha(&(&u - &f.scale(s)), k(2.0), GreensMethod::Direct).unwrap().rho;
    let fdr = (&rp - &rm).scale(0.5 / s);
    let anr = drho_directional(&u, k(2.0), &f).unwrap();
    assert!((&fdr - &anr).l2_norm() <= 1e-6 * anr.l2_norm(), "{}", (&fdr - &anr).l2_norm() / anr.l2_norm());
}

#[test]
fn drho_vanishes_at_zero_and_is_linear() {
    let g = grid(50.0, 256);
    let f1 = colored_field(&g, k(1.0), 0.5, 1);
    let f2 = colored_field(&g, k(1.0), 0.5, 2);
    assert!(drho_directional(&RealField::zeros(&g), k(2.0), &f1).unwrap().max_abs() <= 1e-9);
    let u = RealField::from_fn(&g, |x| 0.3 * (-x * x).exp());
    let res = LaxResolvent::new(&u, k(2.0)).unwrap();
    let sum = res.drho(&(&f1 + &f2));
    let parts = &res.drho(&f1) + &res.drho(&f2);
    assert!(sum.distance_sup(&parts) <= 1e-12 * sum.max_abs().max(1.0));
}

#[test]
fn resolvent_identity_and_symmetry() {
    let g = grid(40.0, 256);
    let u = RealField::from_fn(&g, |x| 0.5 * (-x * x / 3.0).exp() * (1.0 + 0.5 * x.sin()));
    let res = LaxResolvent::new(&u, k(1.5)).unwrap();
    let (p0, pu) = res.collocation_pair();
    let lhs = pu.zip_map(&p0, |a, b| a - b);
    let rhs = p0.scale_columns(u.samples()).matmul(&pu).map(|v| -v);
    let rel = lhs.zip_map(&rhs, |a, b| a - b).frobenius() / lhs.frobenius();
    assert!(rel <= 1e-8, "{rel}");
    assert!(pu.symmetry_defect() <= 1e-8 * pu.max_abs());
    assert!(res.operator().relative_asymmetry() <= 1e-8);
}

#[test]
fn greens_square_identity() {
    // \int G(x,y) G(y,x) / (2 g(y)^2) dy = g(x), i.e. -dg(1/(2g^2)) = g
    let g = grid(50.0, 1024);
    let u = RealField::from_fn(&g, |x| 0.5 * (-x * x).exp());
    let res = LaxResolvent::new(&u, k(3.0)).unwrap();
    let w = res.greens().map(|v| 0.5 / (v * v));
    let back = res.dg(&w).scale(-1.0);
    let rel = back.distance_sup(res.greens()) / res.greens().max_abs();
    assert!(rel <= 1e-7, "{rel}");
}

#[test]
fn second_order_identity() {
    let g = grid(40.0, 512);
    let kappa = k(2.0);
    let kv = 2.0;
    let u = RealField::from_fn(&g, |x| 0.3 * (-x * x).exp() * (1.0 + 0.5 * (2.0 * x).sin()));
    let h2 = &collocation_series_terms(&u, kappa, 2)[1];
    let h1 = h1_field(&u, kappa);
    let d = |f: &RealField<f64>, n| derivative(f, n).unwrap();
    let sq = |f: &RealField<f64>| dealiased_product(f, f);
    let h1p2 = sq(&d(&h1, 1));
    let h1sq2 = d(&sq(&h1), 2);
    let inner = &h1p2 + &h1sq2.scale(2.0);
    let smooth = d(&apply_free_resolvent(&inner, kappa.doubled()), 2);
    let rhs = &(&(&sq(&u).scale(3.0) - &sq(&d(&h1, 2)).scale(3.0 * kv * kv))
        - &(&h1p2 - &h1sq2).scale(20.0 * kv.powi(4)))
        + &smooth.scale(4.0 * kv.powi(4));
    let resid = (&h2.scale(16.0 * kv.powi(5)) - &rhs).l2_norm();
    let scale = u.l2_norm_sq();
    assert!(resid <= 1e-6 * scale, "{resid} vs {scale}");
    // first-order companion identity, exact for the multiplier form
    let lhs = &h1.scale(16.0 * kv.powi(5)) + &u.scale(4.0 * kv * kv);
    assert!(lhs.distance_sup(&d(&h1, 2).scale(4.0 * kv.powi(3))) <= 1e-12);
}

#[test]
fn microlaw_residual_examples() {
    let g = grid(50.0, 512);
    let zero = CoefficientSet::zero(&g);
    assert_eq!(microlaw_residual(&RealField::zeros(&g), k(3.0), &zero, 0.0).unwrap(), 0.0);
    let u = RealField::from_fn(&g, |x| 0.5 * (-x * x).exp());
    let r0 = microlaw_residual(&u, k(3.0), &zero, 0.0).unwrap();
    assert!(r0 <= 1e-6, "{r0}");
    let a = |s: f64| Coefficient::Static(RealField::from_fn(&g, move |x| s / (1.0 + x * x)));
    let coeffs = CoefficientSet::new(&g, [a(0.1), a(0.2), a(-0.1), a(0.05)], CoefficientMeta::default()).unwrap();
    let r1 = microlaw_residual(&u, k(3.0), &coeffs, 0.0).unwrap();
    assert!((r1 - r0).abs() <= 1e-12, "{r0} {r1}");
}

#[test]
fn microlaw_residual_refines() {
    let mut res = Vec::new();
    for n in [256usize, 512] {
        let g = grid(50.0, n);
        let u = RealField::from_fn(&g, |x| 0.5 * (-x * x).exp());
        res.push(microlaw_residual(&u, k(3.0), &CoefficientSet::zero(&g), 0.0).unwrap());
    }
    assert!(res[1] < res[0] / 4.0, "{res:?}");
}

#[test]
fn alpha_is_comparable_to_h_minus_one_norm() {
    use rand::{Rng, SeedableRng};
    let g = grid(20.0, 256);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for seed in 0..100u64 {
        let r: f64 = rng.gen_range(0.1..=1.0);
        let kappa = k(1.0 + 10.0 * r * r);
        let u = colored_field(&g, kappa, r, seed);
        let norm_sq = sobolev_kappa_norm_sq(&u, -1.0, kappa);
        let alpha = rho_alpha(&u, kappa, GreensMethod::Direct).unwrap().alpha;
        let (lo, hi) = (norm_sq / (4.0 * kappa.get()), norm_sq / kappa.get());
        assert!(alpha >= lo - 1e-9 && alpha <= hi + 1e-9, "seed {seed}: {lo} <= {alpha} <= {hi}");
    }
}

mod series {
    use kdvlab_core::lax::*;
    use kdvlab_core::spectral::*;
    use kdvlab_core::Error;

    #[test]
    fn zero_potential_stops_after_first_term() {
        let g = TorusGrid::<f64>::new(50.0, 128).unwrap();
        let k = KappaParam::new(2.0).unwrap();
        let (gr, used) = greens_diagonal_series(&RealField::zeros(&g), k, 40, 1e-10).unwrap();
        assert_eq!(used, 1);
        assert!(gr.samples().iter().all(|&v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn constant_potential_matches_closed_form() {
        let g = TorusGrid::<f64>::new(50.0, 512).unwrap();
        let k = KappaParam::new(2.0).unwrap();
        let (gr, used) = greens_diagonal_series(&RealField::constant(&g, 1.0), k, 40, 1e-10).unwrap();
        let exact = 1.0 / (2.0 * 5f64.sqrt());
        assert!(gr.samples().iter().all(|&v| (v - exact).abs() < 1e-8), "{}", gr.samples()[0]);
        assert!(used > 5);
    }

    #[test]
    fn large_potential_is_rejected() {
        let g = TorusGrid::<f64>::new(50.0, 256).unwrap();
        let k = KappaParam::new(1.0).unwrap();
        let bump = RealField::from_fn(&g, |x| (-x * x * 4.0).exp());
        let norm = sobolev_kappa_norm(&bump, -1.0, k);
        let u = bump.scale(0.9 / norm);
        assert!((sobolev_kappa_norm(&u, -1.0, k) - 0.9).abs() < 1e-12);
        assert!(matches!(
            greens_diagonal_series(&u, k, 40, 1e-10),
            Err(Error::SeriesNotContracting { .. })
        ));
    }

    #[test]
    fn hits_term_cap() {
        let g = TorusGrid::<f64>::new(50.0, 64).unwrap();
        let k = KappaParam::new(2.0).unwrap();
        let u = RealField::constant(&g, 1.0);
        assert!(matches!(
            greens_diagonal_series(&u, k, 3, 1e-12),
            Err(Error::NoConvergence { terms: 3, .. })
        ));
    }
}

mod free_kernel {
    use kdvlab_core::lax::*;
    use kdvlab_core::spectral::*;
    use std::f64::consts::PI;

    #[test]
    fn h1_examples() {
        let g = TorusGrid::<f64>::new(2.0 * PI, 16).unwrap();
        let k = KappaParam::new(1.0).unwrap();
        let h = h1_field(&RealField::constant(&g, 1.0), k);
        assert!(h.samples().iter().all(|&v| (v + 0.25).abs() < 1e-14));
        let c = RealField::from_fn(&g, f64::cos);
        assert!(h1_field(&c, k).distance_sup(&c.scale(-0.2)) < 1e-14);
    }

    #[test]
    fn free_kernel_matches_line_kernel_in_the_bulk() {
        let g = TorusGrid::<f64>::new(50.0, 64).unwrap();
        let k = KappaParam::new(1.0).unwrap();
        for &x in &[0.0, 0.5, 3.0, -7.0] {
            let line = (-(x as f64).abs()).exp() / 2.0;
            assert!((periodic_free_kernel(&g, k, x) - line).abs() < 1e-10);
        }
        // wrapped: symmetric about L/2
        assert!((periodic_free_kernel(&g, k, 24.0) - periodic_free_kernel(&g, k, 26.0)).abs() < 1e-15);
    }

    #[test]
    fn circulant_column_realizes_multiplier() {
        let g = TorusGrid::<f64>::new(20.0, 64).unwrap();
        let col = circulant_column(&g, |xi| 1.0 / (xi * xi + 4.0));
        let f = RealField::from_fn(&g, |x| (-x * x).exp());
        let a = circular_convolve(&g, &col, &f);
        let b = kdvlab_core::spectral::apply_free_resolvent(&f, KappaParam::new(2.0).unwrap());
        assert!(a.distance_sup(&b) < 1e-14);
    }
}

mod admissibility {
    use kdvlab_core::lax::*;
    use kdvlab_core::spectral::*;

    #[test]
    fn minimal_kappa_sits_on_the_boundary() {
        let g = TorusGrid::<f64>::new(50.0, 128).unwrap();
        let u = colored_field(&g, KappaParam::new(1.0).unwrap(), 0.8, 9);
        let k = minimal_admissible_kappa(&u, 10.0).unwrap();
        let m = admissibility_margin(&u, k, 10.0);
        assert!(m >= 0.0 && m < 1e-10);
        assert!(is_admissible(&u, k, 10.0));
        assert!(!is_admissible(&u, KappaParam::new(k.get() * 0.99).unwrap(), 10.0));
    }

    #[test]
    fn zero_field_is_admissible_at_one() {
        let g = TorusGrid::<f64>::new(50.0, 64).unwrap();
        let k = minimal_admissible_kappa(&RealField::zeros(&g), 10.0).unwrap();
        assert_eq!(k.get(), 1.0);
    }
}
