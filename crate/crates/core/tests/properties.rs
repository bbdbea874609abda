use std::f64::consts::PI;

use fuzzyds_core::cs::{self, Angles, Dependence, FnObservable, Point};
use fuzzyds_core::ds2::{self, Ds2Params, GridOptions};
use fuzzyds_core::ds4::{self, Ds4Params, S3Point};
use fuzzyds_core::expr::parse;
use fuzzyds_core::numerics::ComplexMatrix;
use fuzzyds_core::Complex64;
use proptest::prelude::*;

fn theta_of(x: &Point) -> f64 {
    match x.angles {
        Angles::Circle { theta } => theta,
        Angles::Sphere3 { .. } => unreachable!(),
    }
}

fn small_params() -> Ds2Params {
    Ds2Params::new(0.5, 2.0, 0.3, 6).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quantize_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -1.0f64..1.0) {
        let p = small_params();
        let basis = ds2::basis(&p);
        let grid = p.default_grid().unwrap();
        let f = |x: &Point| Complex64::new(x.tau * theta_of(x).cos(), 0.0);
        let g = |x: &Point| Complex64::new((2.0 * theta_of(x)).sin(), x.tau * x.tau * 0.1);
        let coef = Complex64::new(b, c);
        let combo = FnObservable::new(|x: &Point| f(x) * a + g(x) * coef);
        let lhs = cs::quantize(&basis, &combo, &grid).unwrap();
        let qf = cs::quantize(&basis, &FnObservable::new(f), &grid).unwrap();
        let qg = cs::quantize(&basis, &FnObservable::new(g), &grid).unwrap();
        let rhs = qf.scale_real(a).add(&qg.scale(coef)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
    }

    #[test]
    fn conjugate_observable_gives_adjoint(k in 1i32..4, s in 0.1f64..2.0) {
        let p = small_params();
        let basis = ds2::basis(&p);
        let grid = p.default_grid().unwrap();
        let f = move |x: &Point| Complex64::new(s * x.tau * theta_of(x).cos(), (k as f64 * theta_of(x)).sin() + x.tau);
        let a = cs::quantize(&basis, &FnObservable::new(f), &grid).unwrap();
        let b = cs::quantize(&basis, &FnObservable::new(move |x: &Point| f(x).conj()), &grid).unwrap();
        prop_assert!(b.max_abs_diff(&a.adjoint()).unwrap() <= 1e-12);
    }

    #[test]
    fn embedded_points_lie_on_hyperboloid(tau in -1e3f64..1e3, theta in 0.0f64..(2.0 * PI), r in 1e-3f64..10.0, rho in 1e-2f64..1e2) {
        let p = Ds2Params::new(r, rho, 0.1, 3).unwrap();
        let h = p.h_inv();
        let x = ds2::embed(&p, tau, theta);
        let scale = h * h + (r * tau).powi(2);
        prop_assert!((x.minkowski_norm() + h * h).abs() <= 1e-12 * scale);
    }

    #[test]
    fn commutators_hold_for_random_parameters(r in 1e-3f64..5.0, rho in 1e-2f64..50.0, eps in 1e-4f64..3.0, m in 3usize..25) {
        let p = Ds2Params::new(r, rho, eps, m).unwrap();
        let rep = ds2::verify_commutators(&p).unwrap();
        // Products of entries of size s round at s²·1e−16.
        let (x0, x1, x2) = ds2::analytic_operators(&p);
        let s = [x0.max_abs(), x1.max_abs(), x2.max_abs()].into_iter().fold(1.0f64, f64::max);
        prop_assert!(rep.quantized.max() <= 1e-12 * s * s, "{:?}", rep);
    }

    #[test]
    fn vector_states_normalized(tau in -5.0f64..5.0, chi in 0.0f64..PI, theta in 0.0f64..PI, phi in 0.0f64..(2.0 * PI)) {
        let p = Ds4Params::reference();
        let provider = ds4::model_provider(&p, 2);
        let pt = S3Point::new(chi, theta, phi);
        let state = ds4::vector_cs(&provider, p.epsilon(), tau, &pt).unwrap();
        prop_assert!((state.norm() - 1.0).abs() <= 1e-12);
        prop_assert!(state.norm_factor > 0.0);
    }
}

#[test]
fn nonnegative_observables_quantize_to_positive_operators() {
    let p = small_params();
    let basis = ds2::basis(&p);
    let grid = p.default_grid().unwrap();
    let f = FnObservable::new(|x: &Point| {
        Complex64::new((x.tau - 1.0).powi(2) * (1.0 + theta_of(x).cos()), 0.0)
    });
    let a = cs::quantize(&basis, &f, &grid).unwrap();
    let min = a.hermitian_eigenvalues()[0];
    assert!(min >= -1e-10, "smallest eigenvalue {min}");
    let g = FnObservable::new(|x: &Point| Complex64::new((3.0 * theta_of(x)).sin().powi(2), 0.0))
        .with_dependence(Dependence::CompactOnly);
    let b = cs::quantize(&basis, &g, &grid).unwrap();
    assert!(b.hermitian_eigenvalues()[0] >= -1e-10);
}

#[test]
fn identity_defect_shrinks_as_grids_refine() {
    let p = Ds2Params::new(0.5, 2.0, 2.0, 6).unwrap();
    let basis = ds2::basis(&p);
    let mut defects = Vec::new();
    for nodes in [1usize, 2, 4, 8] {
        let grid = p
            .grid(GridOptions {
                nodes_per_unit: Some(nodes),
                theta_count: None,
            })
            .unwrap();
        defects.push(cs::identity_resolution_defect(&basis, &grid).unwrap());
    }
    for w in defects.windows(2) {
        assert!(w[1] <= w[0] || w[1] <= 1e-14, "{defects:?}");
    }
    assert!(defects[0] > 1e-6, "{defects:?}");
    assert!(*defects.last().unwrap() <= 1e-12, "{defects:?}");

    let mut coarse_theta = Vec::new();
    for theta in [3usize, 6, 12, 24, 29] {
        let grid = p
            .grid(GridOptions {
                nodes_per_unit: None,
                theta_count: Some(theta),
            })
            .unwrap();
        coarse_theta.push(cs::identity_resolution_defect(&basis, &grid).unwrap());
    }
    for w in coarse_theta.windows(2) {
        assert!(w[1] <= w[0] || w[1] <= 1e-14, "{coarse_theta:?}");
    }
}

#[test]
fn identity_defect_invariant_under_unitary_mixing() {
    // Rotating two basis elements by a real rotation leaves ∫|x⟩⟨x|N μ unchanged.
    struct Mixed(ds2::GaussianFourierBasis, f64);
    impl cs::BasisSet for Mixed {
        fn len(&self) -> usize {
            self.0.len()
        }
        fn time_label(&self, n: usize) -> f64 {
            self.0.time_label(n)
        }
        fn evaluate(&self, x: &Point, out: &mut [Complex64]) {
            self.0.evaluate(x, out);
            let (s, c) = self.1.sin_cos();
            let (a, b) = (out[0], out[1]);
            out[0] = a * c - b * s;
            out[1] = a * s + b * c;
        }
    }
    let p = Ds2Params::new(0.5, 2.0, 0.5, 4).unwrap();
    let grid = p.default_grid().unwrap();
    let plain = cs::identity_resolution_defect(&ds2::basis(&p), &grid).unwrap();
    let mixed = cs::identity_resolution_defect(&Mixed(ds2::basis(&p), 0.7), &grid).unwrap();
    assert!(plain <= 1e-12 && mixed <= 1e-12, "{plain} {mixed}");
}

#[test]
fn casimir_vanishes_linearly_in_epsilon() {
    let mut ratios = Vec::new();
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let p = Ds2Params::new(0.5, 2.0, eps, 10).unwrap();
        let rep = ds2::casimir_report_for(&p, &ds2::casimir_ambient(&p)).unwrap();
        assert!(rep.formula_defect <= 1e-12);
        ratios.push(rep.target_deviation / eps);
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(max.is_finite() && max / min < 1.1, "{ratios:?}");
}

#[test]
fn ds4_grid_observable_is_self_adjoint() {
    let p = Ds4Params::reference();
    let provider = ds4::model_provider(&p, 1);
    let grid = ds4::default_grid(
        &provider,
        p.epsilon(),
        ds4::GridOptions {
            nodes_per_unit: Some(8),
            s3_counts: Some([12, 12, 12]),
        },
    )
    .unwrap();
    let f = parse("r*tau*cos(chi) + Hinv*sin(chi)*sin(theta)*cos(phi)").unwrap();
    let a = ds4::quantize4(&provider, &p, &f, None, &grid).unwrap();
    assert!(a.self_adjoint_defect() <= 1e-12);
    let id = ComplexMatrix::identity(provider.labels().len(), 0).unwrap();
    assert!(a.max_abs_diff(&id).unwrap() > 0.1);
}
