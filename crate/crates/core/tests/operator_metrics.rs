use kdvlab_core::lax::{circulant_column, DenseOperator};
use kdvlab_core::linalg::DenseMatrix;
use kdvlab_core::metrics::*;
use kdvlab_core::spectral::{FourierMultiplier, KappaParam, RealField, TorusGrid};
use kdvlab_core::Error;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn grid(l: f64, n: usize) -> TorusGrid<f64> {
    TorusGrid::new(l, n).unwrap()
}

fn kappa(k: f64) -> KappaParam<f64> {
    KappaParam::new(k).unwrap()
}

fn random_operator(g: &TorusGrid<f64>, rng: &mut ChaCha8Rng) -> DenseOperator<f64> {
    let n = g.points();
    let data = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    DenseOperator::new(g, DenseMatrix::from_rows(n, data).unwrap())
}

fn resolvent_operator(g: &TorusGrid<f64>, k: f64) -> DenseOperator<f64> {
    let col: Vec<f64> = circulant_column(g, |xi| 1.0 / (xi * xi + k * k)).iter().map(|v| v / g.dx()).collect();
    DenseOperator::new(g, DenseMatrix::circulant(&col))
}

#[test]
fn hs_norm_of_zero_is_zero() {
    let g = grid(10.0, 32);
    assert_eq!(hs_norm(&DenseOperator::new(&g, DenseMatrix::zeros(32))), 0.0);
}

#[test]
fn hs_norm_matches_gaussian_kernel_quadrature() {
    // periodic e^{-(x-y)^2}: the double integral of its square is L sqrt(pi/2)
    let l = 50.0;
    let g = grid(l, 512);
    let kernel = DenseMatrix::from_fn(512, |i, j| {
        let d = g.periodic_offset(g.x(i), g.x(j));
        (-d * d).exp()
    });
    let hs = hs_norm(&DenseOperator::new(&g, kernel));
    let exact = (l * (PI / 2.0).sqrt()).sqrt();
    assert!((hs - exact).abs() / exact < 1e-8, "{hs} vs {exact}");
}

#[test]
fn trace_product_obeys_cauchy_schwarz() {
    let g = grid(20.0, 64);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let a = random_operator(&g, &mut rng);
        let b = random_operator(&g, &mut rng);
        assert!(trace_product(&a, &b).abs() <= hs_norm(&a) * hs_norm(&b) * (1.0 + 1e-12));
    }
    // tr(A A^T) is the squared HS norm
    let a = random_operator(&g, &mut rng);
    let at = DenseOperator::new(&g, a.kernel().transpose());
    let t = trace_product(&a, &at);
    assert!((t - hs_norm(&a).powi(2)).abs() < 1e-10 * t);
}

#[test]
fn hs_norm_is_invariant_under_fourier_conjugation() {
    let g = grid(20.0, 64);
    let n = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_operator(&g, &mut rng);
    let scale = 1.0 / n as f64;
    let rows: Vec<Vec<Complex<f64>>> = (0..n).map(|i| g.forward(a.kernel().row(i))).collect();
    let mut total = 0.0;
    for k in 0..n {
        let mut col: Vec<Complex<f64>> = rows.iter().map(|r| r[k].conj()).collect();
        g.forward_in_place(&mut col);
        total += col.iter().map(|c| c.norm_sqr()).sum::<f64>();
    }
    let conj = (total * scale * scale).sqrt() * a.kernel().frobenius().recip();
    assert!((conj - 1.0).abs() < 1e-9, "{conj}");
}

#[test]
fn hs_identity_for_gaussian_bump() {
    let k = kappa(2.0);
    let coarse = verify_hs_identity(&RealField::from_fn(&grid(50.0, 512), |x| (-x * x).exp()), k).unwrap();
    let fine = verify_hs_identity(&RealField::from_fn(&grid(50.0, 1024), |x| (-x * x).exp()), k).unwrap();
    assert!(coarse <= 1e-3, "{coarse}");
    assert!(fine <= coarse / 2.0, "{coarse} -> {fine}");
}

#[test]
fn hs_norm_of_cosine_matches_two_mode_sum() {
    let (n, k) = (256, 2.0);
    let g = grid(16.0 * PI, n);
    let shift = 8;
    let f = RealField::from_fn(&g, f64::cos);
    let hs = hs_norm(&sandwiched_potential(&f, kappa(k)));
    let r: Vec<f64> = g.wavenumbers().iter().map(|xi| 1.0 / (xi * xi + k * k)).collect();
    let sum: f64 = (0..n).map(|j| r[j] * (r[(j + n - shift) % n] + r[(j + shift) % n])).sum::<f64>() / 4.0;
    assert!((hs - sum.sqrt()).abs() < 1e-12 * hs, "{hs} vs {}", sum.sqrt());
    let err = verify_hs_identity(&f, kappa(k)).unwrap();
    assert!(err.is_finite());
}

#[test]
fn hs_identity_rejects_zero_potential() {
    let g = grid(10.0, 64);
    assert!(matches!(verify_hs_identity(&RealField::zeros(&g), kappa(1.0)), Err(Error::DivisionByZeroNorm)));
}

#[test]
fn weighted_norm_of_identity() {
    let g = grid(20.0, 128);
    let id = DenseOperator::new(&g, DenseMatrix::identity(128).map(|v| v / g.dx()));
    let s = WeightedSpace::new(1.0, kappa(2.0));
    assert!((weighted_op_norm(&id, s, s) - 1.0).abs() < 1e-9);
}

#[test]
fn weighted_norm_of_free_resolvent() {
    let g = grid(50.0, 256);
    let k = kappa(1.0);
    let dense = resolvent_operator(&g, 1.0);
    let multiplier = FourierMultiplier::free_resolvent(&g, k);
    let smoothing = weighted_op_norm(&dense, WeightedSpace::new(-1.0, k), WeightedSpace::new(1.0, k));
    assert!((smoothing - 4.0).abs() < 1e-6, "{smoothing}");
    let via_multiplier = weighted_op_norm(&multiplier, WeightedSpace::new(-1.0, k), WeightedSpace::new(1.0, k));
    assert!((via_multiplier - 4.0).abs() < 1e-6, "{via_multiplier}");
    let k = kappa(3.0);
    let l2 = weighted_op_norm(&resolvent_operator(&g, 3.0), WeightedSpace::new(0.0, k), WeightedSpace::new(0.0, k));
    assert!((l2 - 1.0 / 9.0).abs() < 1e-9, "{l2}");
}

#[test]
fn operator_norm_is_below_hs_norm() {
    let g = grid(30.0, 128);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let l2 = WeightedSpace::new(0.0, kappa(1.0));
    let ops = [
        random_operator(&g, &mut rng),
        resolvent_operator(&g, 2.0),
        sandwiched_potential(&RealField::from_fn(&g, |x| (-x * x).exp()), kappa(2.0)),
    ];
    for op in &ops {
        assert!(weighted_op_norm(op, l2, l2) <= hs_norm(op) * (1.0 + 1e-9));
    }
}

#[test]
fn psi_weight_is_admissible() {
    let g = grid(100.0, 1024);
    let check = weight_admissibility(&g, 1).unwrap();
    assert!(check.derivative_ratio <= 1.0, "{check:?}");
    for p in 1..=3 {
        let check = weight_admissibility(&g, p).unwrap();
        assert!(check.growth_rate <= 0.5 + 1e-9, "power {p}: {check:?}");
    }
}

#[test]
fn power_law_fit_recovers_exponent() {
    let ks = [2.0, 4.0, 8.0, 16.0];
    let ys: Vec<f64> = ks.iter().map(|k: &f64| 0.3 * k.powf(-2.0) * (1.0 + 0.01 / k)).collect();
    let fit = fit_power_law(&ks, &ys).unwrap();
    assert!((fit.slope + 2.0).abs() < 0.01 && fit.ci_width < 0.05);
}

const KAPPAS: [f64; 4] = [2.0, 4.0, 8.0, 16.0];

fn audit(power: u32, variant: CommutatorVariant) -> ScalingReport {
    let report = commutator_scaling_audit(&grid(100.0, 4096), power, variant, &KAPPAS, false).unwrap();
    assert!(report.norms.iter().all(|&v| v > 0.0 && v.is_finite()));
    report
}

#[test]
fn plain_commutator_decays_like_kappa_minus_two() {
    for power in 1..=3 {
        let r = audit(power, CommutatorVariant::Plain);
        assert!((r.slope + 2.0).abs() <= 0.15 && r.ci <= 0.3, "{r:?}");
        assert!(r.passes());
    }
}

#[test]
fn derivative_commutator_decays_like_kappa_minus_one() {
    let r = audit(1, CommutatorVariant::WithDerivative);
    assert!((r.slope + 1.0).abs() <= 0.15 && r.ci <= 0.3, "{r:?}");
}

#[test]
fn smoothing_commutator_is_uniformly_bounded() {
    let r = audit(1, CommutatorVariant::PlainSobolev);
    assert!(r.slope <= 0.15 && r.ci <= 0.3, "{r:?}");
}

#[test]
fn double_commutators_meet_their_bounds() {
    let r = audit(1, CommutatorVariant::Double);
    assert!(r.slope <= -2.0 + 0.15 && r.ci <= 0.3, "{r:?}");
    let r = audit(1, CommutatorVariant::DoubleDerivative);
    assert!(r.slope <= 0.15 && r.ci <= 0.3, "{r:?}");
}

#[test]
fn schur_norms_follow_the_same_rates() {
    let g = grid(100.0, 4096);
    let plain: Vec<(f64, f64)> = KAPPAS
        .iter()
        .map(|&k| schur_norms(&g, CommutatorVariant::Plain, 1, kappa(k)).unwrap())
        .collect();
    for norms in [plain.iter().map(|p| p.0).collect::<Vec<_>>(), plain.iter().map(|p| p.1).collect()] {
        let fit = fit_power_law(&KAPPAS, &norms).unwrap();
        assert!((fit.slope + 2.0).abs() <= 0.15, "{norms:?}");
    }
    let deriv: Vec<f64> = KAPPAS
        .iter()
        .map(|&k| schur_norms(&g, CommutatorVariant::WithDerivative, 1, kappa(k)).unwrap().1)
        .collect();
    let fit = fit_power_law(&KAPPAS, &deriv).unwrap();
    assert!((fit.slope + 1.0).abs() <= 0.15, "{deriv:?}");
    assert!(schur_norms(&g, CommutatorVariant::Double, 1, kappa(2.0)).is_none());
}

#[test]
fn audit_rejects_unresolved_kappa() {
    let g = grid(100.0, 4096);
    let res = commutator_scaling_audit(&g, 1, CommutatorVariant::Plain, &[4.0, 8.0, 16.0, 32.0], false);
    assert!(matches!(res, Err(Error::UnresolvedKernel { .. })));
    assert!(commutator_scaling_audit(&g, 1, CommutatorVariant::Plain, &[2.0, 4.0, 8.0], false).is_err());
    assert!(commutator_scaling_audit(&g, 4, CommutatorVariant::Plain, &KAPPAS, false).is_err());
}

#[test]
fn report_serializes_to_json() {
    let g = grid(100.0, 1024);
    let r = commutator_scaling_audit(&g, 1, CommutatorVariant::Plain, &[1.0, 2.0, 3.0, 4.0], true).unwrap();
    assert!(r.schur_l1.is_some() && r.schur_linf.is_some());
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"variant\":\"plain\""));
    let back: ScalingReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}

mod power_law_fit {
    use kdvlab_core::metrics::*;

    #[test]
    fn exact_power_law() {
        let xs = [2.0, 4.0, 8.0, 16.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        let f = fit_power_law(&xs, &ys).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.ci_width < 1e-10);
    }

    #[test]
    fn noisy_fit_has_finite_width() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [1.0, 2.3, 2.7, 4.4, 4.6];
        let f = fit_power_law(&xs, &ys).unwrap();
        assert!(f.ci_width > 0.0 && f.ci_width.is_finite());
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_power_law(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_power_law(&[1.0, 2.0, 3.0], &[1.0, -2.0, 3.0]).is_err());
    }
}
