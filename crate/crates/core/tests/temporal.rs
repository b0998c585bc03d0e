mod common;

use std::f64::consts::PI;

use arma_core::design::{Branch, FrequencyResponse, ParallelForm};
use arma_core::temporal::{
    arma1_transfer, expected_gain, measure_temporal_gain, parallel_transfer, GainOptions,
    JointResponse,
};
use arma_core::{
    build_shift_operator, design_arma, eigendecompose, Complex64, DesignConfig, DesiredResponse,
    FilterSpec, Graph, OperatorVariant, SimulationConfig, SpectralInterval,
};
use common::*;
use nalgebra::DMatrix;
use rand::Rng;

fn unit() -> SpectralInterval {
    SpectralInterval::new(0.0, 2.0).unwrap()
}

#[test]
fn unit_z_gives_the_graph_response() {
    let d = design_arma(
        &DesiredResponse::window(unit()),
        &DesignConfig::with_order(4),
    )
    .unwrap();
    let arma1 = JointResponse::Arma1 {
        psi: Complex64::new(0.6, 0.0),
        phi: Complex64::new(0.8, 0.0),
    };
    let one = Complex64::new(1.0, 0.0);
    for i in 0..200 {
        let mu = -1.0 + 2.0 * i as f64 / 199.0;
        let par = JointResponse::Parallel(d.parallel.clone().unwrap());
        let per = JointResponse::Periodic(d.periodic.clone().unwrap());
        let g = d.rational.response_at(mu);
        assert!(
            (par.eval(one, mu).unwrap() - d.parallel.as_ref().unwrap().response_at(mu)).norm()
                < 1e-12
        );
        assert!(
            (per.eval(one, mu).unwrap() - d.periodic.as_ref().unwrap().response_at(mu)).norm()
                < 1e-12
        );
        assert!((per.eval(one, mu).unwrap() - g).norm() < 1e-6);
        assert!((arma1.eval(one, mu).unwrap().re - 0.8 / (1.0 - 0.6 * mu)).abs() < 1e-12);
    }
}

#[test]
fn parallel_transfer_matches_state_space() {
    let mut rng = rng(17);
    for case in 0..4 {
        let n = 8 + 4 * case;
        let k = 1 + case % 3;
        let g = random_graph(n, &mut rng);
        let op =
            build_shift_operator(&g, OperatorVariant::NormalizedLaplacian, Some(unit())).unwrap();
        let spectrum = eigendecompose(&op).unwrap();
        let form = ParallelForm {
            branches: (0..k)
                .map(|_| Branch {
                    psi: Complex64::new(rng.random_range(-0.9..0.9), 0.0),
                    phi: Complex64::new(rng.random_range(-1.0..1.0), 0.0),
                })
                .collect(),
            interval: unit(),
        };
        // y_{t+1} = A y_t + B x_t, output C y; A = blockdiag(ψ_k M), B = [φ_k I], C = [I … I]
        let kn = k * n;
        let m = op.shifted().map(|v| Complex64::new(v, 0.0));
        let mut a = DMatrix::<Complex64>::zeros(kn, kn);
        let mut b = DMatrix::<Complex64>::zeros(kn, n);
        let mut c = DMatrix::<Complex64>::zeros(n, kn);
        for (j, br) in form.branches.iter().enumerate() {
            a.view_mut((j * n, j * n), (n, n)).copy_from(&(&m * br.psi));
            b.view_mut((j * n, 0), (n, n))
                .copy_from(&(DMatrix::identity(n, n) * br.phi));
            c.view_mut((0, j * n), (n, n))
                .copy_from(&DMatrix::identity(n, n));
        }
        let z = Complex64::from_polar(1.0, rng.random_range(0.0..PI));
        let resolvent = (DMatrix::identity(kn, kn) * z - &a).try_inverse().unwrap();
        let h = &c * resolvent * &b;
        for idx in 0..n {
            let v = spectrum.eigenvector(idx);
            let vc = nalgebra::DVector::from_iterator(n, v.iter().map(|&x| Complex64::new(x, 0.0)));
            let proj = (vc.transpose() * &h * &vc)[(0, 0)];
            let want = parallel_transfer(&form, z, spectrum.eigenvalues_mu[idx]).unwrap();
            assert!((proj - want).norm() < 1e-10 * want.norm().max(1.0));
        }
    }
}

#[test]
fn arma1_gain_at_quarter_pi() {
    let g = Graph::path(2).unwrap();
    let op = build_shift_operator(&g, OperatorVariant::DiscreteLaplacian, Some(unit())).unwrap();
    let spectrum = eigendecompose(&op).unwrap();
    let n = spectrum
        .eigenvalues_mu
        .iter()
        .position(|&mu| (mu - 1.0).abs() < 1e-12)
        .unwrap();
    let omega = PI / 4.0;
    let cfg = SimulationConfig::new(
        FilterSpec::arma1(0.5, 1.0, unit()),
        OperatorVariant::DiscreteLaplacian,
        0,
    );
    let got =
        measure_temporal_gain(&cfg, &g, &spectrum, n, omega, &GainOptions::default()).unwrap();
    let want = 1.0 / (Complex64::from_polar(1.0, omega) - 0.5);
    assert!((got.amplitude / want.norm() - 1.0).abs() < 0.01);
    let h = arma1_transfer(
        Complex64::new(0.5, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::from_polar(1.0, omega),
        1.0,
    )
    .unwrap();
    assert!((h - want).norm() < 1e-12);
}

#[test]
fn driven_two_branch_and_periodic_gains() {
    let mut rng = rng(23);
    let g = random_graph(12, &mut rng);
    let op = build_shift_operator(&g, OperatorVariant::NormalizedLaplacian, Some(unit())).unwrap();
    let spectrum = eigendecompose(&op).unwrap();
    let form = ParallelForm {
        branches: vec![
            Branch {
                psi: Complex64::new(0.6, 0.0),
                phi: Complex64::new(0.5, 0.0),
            },
            Branch {
                psi: Complex64::new(-0.4, 0.0),
                phi: Complex64::new(1.0, 0.0),
            },
        ],
        interval: unit(),
    };
    let d = design_arma(&DesiredResponse::step(unit()), &DesignConfig::with_order(3)).unwrap();
    let cases = [
        (FilterSpec::Parallel(form), PI / 3.0),
        (FilterSpec::Periodic(d.periodic.unwrap()), PI / 5.0),
    ];
    for (filter, omega) in cases {
        let joint = JointResponse::from_filter(&filter).unwrap();
        let cfg = SimulationConfig::new(filter, OperatorVariant::NormalizedLaplacian, 0);
        for n in [0, 5, 11] {
            let got = measure_temporal_gain(&cfg, &g, &spectrum, n, omega, &GainOptions::default())
                .unwrap();
            let want = expected_gain(&joint, omega, spectrum.eigenvalues_mu[n]).unwrap();
            assert!(
                (got.amplitude / want.norm() - 1.0).abs() < 0.01,
                "{} n={n}",
                joint.family()
            );
        }
    }
}

#[test]
fn interior_points_need_opt_in() {
    let joint = JointResponse::Arma1 {
        psi: Complex64::new(0.5, 0.0),
        phi: Complex64::new(1.0, 0.0),
    };
    let z = Complex64::new(0.3, 0.0);
    assert!(joint.eval(z, 0.2).is_err());
    assert!(joint.eval_with(z, 0.2, true).is_ok());
}

#[test]
fn fir_has_no_transfer_function() {
    let fir = arma_core::design::design_fir(&DesiredResponse::step(unit()), 3, 200).unwrap();
    assert!(JointResponse::from_filter(&FilterSpec::Fir(fir)).is_err());
}
