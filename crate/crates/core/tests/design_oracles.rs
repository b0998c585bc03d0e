mod common;

use arma_core::design::{
    chebyshev_prefit, check_stability_rational, design_fir, evaluate_response, l2_error,
    relative_max_error, to_parallel, to_periodic, Branch, FrequencyResponse, ParallelForm,
    RationalDesign,
};
use arma_core::spectrum::apply_filter_exact;
use arma_core::{
    build_shift_operator, design_arma, eigendecompose, Complex64, DesignConfig, DesiredResponse,
    Graph, GraphSignal, OperatorVariant, SpectralInterval,
};
use common::*;
use nalgebra::{DMatrix, DVector};

fn unit() -> SpectralInterval {
    SpectralInterval::new(0.0, 2.0).unwrap()
}

fn trapezoid(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (hi - lo) / (n - 1) as f64;
    let pts = (0..n).map(|i| lo + h * i as f64).collect();
    let mut w = vec![h; n];
    w[0] /= 2.0;
    w[n - 1] /= 2.0;
    (pts, w)
}

/// Weighted polynomial least squares through the normal equations, in the
/// centered variable `x − shift`. Returns the weighted residual norm.
fn normal_equations_residual(
    pts: &[f64],
    w: &[f64],
    target: &[f64],
    degree: usize,
    shift: f64,
) -> f64 {
    let n = pts.len();
    let v = DMatrix::from_fn(n, degree + 1, |i, k| (pts[i] - shift).powi(k as i32));
    let wm = DMatrix::from_diagonal(&DVector::from_column_slice(w));
    let gram = v.transpose() * &wm * &v;
    let rhs = v.transpose() * &wm * DVector::from_column_slice(target);
    let coef = gram.cholesky().unwrap().solve(&rhs);
    let fit = v * coef;
    (0..n)
        .map(|i| w[i] * (fit[i] - target[i]).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[test]
fn fir_residual_matches_normal_equations() {
    let resp = DesiredResponse::step(unit());
    let fir = design_fir(&resp, 10, 1000).unwrap();
    let (pts, w) = trapezoid(0.0, 2.0, 1000);
    let target: Vec<f64> = pts.iter().map(|&l| resp.eval_lambda(l)).collect();
    let oracle = normal_equations_residual(&pts, &w, &target, 10, 1.0);
    let own: f64 = (0..1000)
        .map(|i| w[i] * (fir.eval_lambda(pts[i]) - target[i]).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!((own - oracle).abs() < 1e-8, "{own} vs {oracle}");
    assert!((l2_error(&fir, &resp, 1000).unwrap() - oracle).abs() < 1e-8);
}

#[test]
fn prefit_residual_matches_monomial_least_squares() {
    let resp = DesiredResponse::step(unit());
    let g = |mu: f64| resp.eval_mu(mu);
    let coef = chebyshev_prefit(g, (-1.0, 1.0), 6, 1000).unwrap();
    let (pts, w) = trapezoid(-1.0, 1.0, 1000);
    let target: Vec<f64> = pts.iter().map(|&m| g(m)).collect();
    let oracle = normal_equations_residual(&pts, &w, &target, 6, 0.0);
    let own: f64 = (0..1000)
        .map(|i| {
            let v: f64 = coef.iter().rev().fold(0.0, |acc, c| acc * pts[i] + c);
            w[i] * (v - target[i]).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    assert!((own - oracle).abs() < 1e-6);
}

#[test]
fn single_pole_stability_margin() {
    let d = RationalDesign::from_real(&[1.0], &[-0.4], unit()).unwrap();
    let report = check_stability_rational(&d, 1e-6);
    assert!(report.stable);
    assert_eq!(report.roots.len(), 1);
    assert!((report.roots[0] - Complex64::new(2.5, 0.0)).norm() < 1e-12);
    assert!((report.margins[0] - 1.5).abs() < 1e-12);
}

#[test]
fn pole_inside_the_disk_fails() {
    let d = RationalDesign::from_real(&[1.0], &[-2.0], unit()).unwrap();
    let report = check_stability_rational(&d, 1e-6);
    assert!(!report.stable);
    assert!(report.min_margin().unwrap() < 0.0);
}

#[test]
fn symbolic_partial_fractions() {
    // 2μ/(μ² − 4) = 1/(μ − 2) + 1/(μ + 2)
    let d = RationalDesign::from_real(
        &[0.0, -0.5],
        &[0.0, -0.25],
        SpectralInterval::new(0.0, 3.0).unwrap(),
    )
    .unwrap();
    let form = to_parallel(&d).unwrap();
    let mut pr: Vec<(f64, f64)> = form
        .branches
        .iter()
        .map(|b| (b.pole().re, b.residue().re))
        .collect();
    pr.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!((pr[0].0 + 2.0).abs() < 1e-10 && (pr[0].1 - 1.0).abs() < 1e-10);
    assert!((pr[1].0 - 2.0).abs() < 1e-10 && (pr[1].1 - 1.0).abs() < 1e-10);
}

#[test]
fn first_order_branch_recovers_pole_and_residue() {
    let (psi, phi) = (0.4, 0.7);
    let d = RationalDesign::from_real(&[phi], &[-psi], unit()).unwrap();
    let form = to_parallel(&d).unwrap();
    assert_eq!(form.order(), 1);
    let b = form.branches[0];
    assert!((b.psi.re - psi).abs() < 1e-12 && (b.phi.re - phi).abs() < 1e-12);
    assert!((b.pole().re - 1.0 / psi).abs() < 1e-10);
    assert!((b.residue().re + phi / psi).abs() < 1e-10);
}

#[test]
fn single_branch_values() {
    let form = ParallelForm {
        branches: vec![Branch::from_pole_residue(
            Complex64::new(2.0, 0.0),
            Complex64::new(-2.0, 0.0),
        )],
        interval: unit(),
    };
    assert!((form.response_at(1.0).re - 2.0).abs() < 1e-12);
    assert!((form.response_at(-1.0).re - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn realizations_agree_with_the_rational_response() {
    for resp in [
        DesiredResponse::step(unit()),
        DesiredResponse::window(unit()),
    ] {
        for k in [3, 5, 8] {
            let d = design_arma(&resp, &DesignConfig::with_order(k)).unwrap();
            let grid: Vec<f64> = (0..1000).map(|i| -1.0 + 2.0 * i as f64 / 999.0).collect();
            let rational = evaluate_response(&d.rational, &grid);
            let periodic = d.periodic.as_ref().unwrap();
            let parallel = d.parallel.as_ref().unwrap();
            assert!(relative_max_error(&evaluate_response(periodic, &grid), &rational) < 1e-6);
            assert!(relative_max_error(&evaluate_response(parallel, &grid), &rational) < 1e-6);
        }
    }
}

#[test]
fn step_design_periodic_product_contracts() {
    let d = design_arma(&DesiredResponse::step(unit()), &DesignConfig::with_order(5)).unwrap();
    let p = d.periodic.unwrap();
    for i in 0..=400 {
        let mu = -1.0 + i as f64 / 200.0;
        let prod: Complex64 = (0..p.period).map(|t| p.theta[t] + p.psi[t] * mu).product();
        assert!(prod.norm() < 1.0);
    }
}

#[test]
fn emitted_coefficients_are_real_and_branches_conjugate_closed() {
    for k in [2, 5, 10] {
        let d = design_arma(
            &DesiredResponse::window(unit()),
            &DesignConfig::with_order(k),
        )
        .unwrap();
        assert!(d
            .rational
            .b
            .iter()
            .chain(&d.rational.a)
            .all(|c| c.im == 0.0));
        let branches = &d.parallel.unwrap().branches;
        for b in branches {
            let partner = branches.iter().any(|o| {
                (o.psi - b.psi.conj()).norm() < 1e-9 && (o.phi - b.phi.conj()).norm() < 1e-9
            });
            assert!(partner);
        }
    }
}

#[test]
fn error_does_not_grow_with_order() {
    let resp = DesiredResponse::step(unit());
    let errs: Vec<f64> = [1, 5, 10]
        .iter()
        .map(|&k| {
            design_arma(&resp, &DesignConfig::with_order(k))
                .unwrap()
                .report
                .l2_error
        })
        .collect();
    assert!(errs[0] >= errs[1] && errs[1] >= errs[2], "{errs:?}");
}

fn recovery_error(g: impl Fn(f64) -> f64, order: usize, k_hat: usize) -> f64 {
    let iv = unit();
    let points: Vec<[f64; 2]> = (0..=40000)
        .map(|i| {
            let l = 2.0 * i as f64 / 40000.0;
            [l, g(iv.lambda_to_mu(l))]
        })
        .collect();
    let resp = DesiredResponse::sampled(iv, points).unwrap();
    let cfg = DesignConfig {
        k_hat: Some(k_hat),
        ..DesignConfig::with_order(order)
    };
    let d = design_arma(&resp, &cfg).unwrap();
    let grid: Vec<f64> = (0..1000).map(|i| -1.0 + 2.0 * i as f64 / 999.0).collect();
    let want: Vec<Complex64> = grid.iter().map(|&m| Complex64::new(g(m), 0.0)).collect();
    relative_max_error(&evaluate_response(&d.rational, &grid), &want)
}

#[test]
fn stable_rational_targets_are_recovered() {
    type Target = (usize, &'static [usize], fn(f64) -> f64);
    let targets: [Target; 5] = [
        // poles 5 ± 5i
        (2, &[4, 6, 8], |mu| {
            (1.0 + 0.2 * mu) / (1.0 - 0.2 * mu + 0.02 * mu * mu)
        }),
        // poles 1.5 ± 2.78i
        (2, &[8, 10, 12], |mu| {
            (1.0 + 0.2 * mu) / (1.0 - 0.3 * mu + 0.1 * mu * mu)
        }),
        (1, &[6, 8, 10], |mu| 0.5 / (1.0 - 0.25 * mu)),
        (1, &[6, 8], |mu| 0.5 / (1.0 - 0.5 * mu)),
        (3, &[6, 8, 10], |mu| {
            (1.0 - 0.1 * mu + 0.05 * mu * mu)
                / ((1.0 - 0.25 * mu) * (1.0 + 0.2 * mu + 0.04 * mu * mu))
        }),
    ];
    for (i, (order, k_hats, g)) in targets.iter().enumerate() {
        for &k_hat in *k_hats {
            let e = recovery_error(g, *order, k_hat);
            assert!(e < 1e-4, "target {i}, K̂ = {k_hat}: {e:e}");
        }
    }
}

#[test]
fn periodic_conversion_of_known_denominator() {
    let d = RationalDesign::from_real(&[1.0, 0.1], &[-0.2, 0.05], unit()).unwrap();
    let p = to_periodic(&d).unwrap();
    for mu in [-1.0, -0.3, 0.0, 0.6, 1.0] {
        let want = (1.0 + 0.1 * mu) / (1.0 - 0.2 * mu + 0.05 * mu * mu);
        let a = p.state_gain(mu);
        let got = p.input_gain(mu) / (1.0 - a);
        assert!((got.re - want).abs() < 1e-10 && got.im.abs() < 1e-10);
        assert!((1.0 - a - (1.0 - 0.2 * mu + 0.05 * mu * mu)).norm() < 1e-12);
    }
}

#[test]
fn exact_filter_matches_dense_resolvent() {
    let mut rng = rng(2);
    let g = random_graph(25, &mut rng);
    let x = random_signal(25, &mut rng);
    let op = build_shift_operator(&g, OperatorVariant::NormalizedLaplacian, Some(unit())).unwrap();
    let spectrum = eigendecompose(&op).unwrap();
    let (r, p) = (-2.0, 2.0);
    let got =
        apply_filter_exact(&GraphSignal::new(x.clone()), &spectrum, |mu| r / (mu - p)).unwrap();
    let m = op.shifted();
    let lhs = m - DMatrix::identity(25, 25) * p;
    let want = lhs.lu().solve(&DVector::from_column_slice(&x)).unwrap() * r;
    assert!(rel(&got.values, want.as_slice()) < 1e-9);
}

#[test]
fn two_node_filter_example() {
    let g = Graph::path(2).unwrap();
    let op = build_shift_operator(&g, OperatorVariant::DiscreteLaplacian, Some(unit())).unwrap();
    let spectrum = eigendecompose(&op).unwrap();
    let y = apply_filter_exact(&GraphSignal::new(vec![1.0, 0.0]), &spectrum, |mu| {
        -2.0 / (mu - 2.0)
    })
    .unwrap();
    assert!((y.values[0] - 4.0 / 3.0).abs() < 1e-12 && (y.values[1] - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn triangle_normalized_spectrum() {
    let g = Graph::complete(3).unwrap();
    let op = build_shift_operator(&g, OperatorVariant::NormalizedLaplacian, None).unwrap();
    let s = eigendecompose(&op).unwrap();
    for (got, want) in s.eigenvalues_lambda.iter().zip([0.0, 1.5, 1.5]) {
        assert!((got - want).abs() < 1e-12);
    }
}
