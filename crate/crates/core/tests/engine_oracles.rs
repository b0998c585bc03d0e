mod common;

use arma_core::design::{Branch, FirDesign, ParallelForm, PeriodicForm};
use arma_core::engine::{simulate, InitialCondition, SignalSource};
use arma_core::spectrum::apply_filter_exact;
use arma_core::{
    build_shift_operator, design_arma, eigendecompose, Complex64, DesignConfig, DesiredResponse,
    Engine, FilterSpec, Graph, GraphSignal, OperatorVariant, SimulationConfig, SpectralInterval,
};
use common::*;
use nalgebra::DVector;
use rand::Rng;

const NORM: OperatorVariant = OperatorVariant::NormalizedLaplacian;

fn unit() -> SpectralInterval {
    SpectralInterval::new(0.0, 2.0).unwrap()
}

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn random_parallel(k: usize, rng: &mut rand_chacha::ChaCha8Rng) -> ParallelForm {
    let branches = (0..k)
        .map(|_| {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            Branch {
                psi: c(sign * rng.random_range(0.1..0.9)),
                phi: c(rng.random_range(-1.0..1.0)),
            }
        })
        .collect();
    ParallelForm {
        branches,
        interval: unit(),
    }
}

fn random_periodic(k: usize, rng: &mut rand_chacha::ChaCha8Rng) -> PeriodicForm {
    let psi = (0..k)
        .map(|t| {
            c(if t == 0 {
                rng.random_range(-0.5..0.5)
            } else {
                rng.random_range(-0.3..0.3)
            })
        })
        .collect();
    let phi = (0..k).map(|_| c(rng.random_range(-1.0..1.0))).collect();
    PeriodicForm::new(PeriodicForm::standard_theta(k), psi, phi, unit()).unwrap()
}

#[test]
fn every_family_follows_its_dense_recursion() {
    let mut rng = rng(11);
    for case in 0..6 {
        let n = [8, 15, 20][case % 3];
        let g = random_graph(n, &mut rng);
        let x = random_signal(n, &mut rng);
        let m = shifted(&build_shift_operator(&g, NORM, Some(unit())).unwrap());
        let rounds = 30;

        let psi = rng.random_range(-0.9..0.9);
        let phi = rng.random_range(-1.0..1.0);
        let trace = simulate(
            &SimulationConfig::new(FilterSpec::arma1(psi, phi, unit()), NORM, rounds),
            &g,
            &x,
        )
        .unwrap();
        let oracle = dense_arma1(&m, c(psi), c(phi), &x, rounds);
        for t in 1..=rounds {
            assert!(rel(&trace.outputs[t], &oracle[t]) < 1e-10, "arma1 t={t}");
        }

        let par = random_parallel(1 + case % 3, &mut rng);
        let trace = simulate(
            &SimulationConfig::new(FilterSpec::Parallel(par.clone()), NORM, rounds),
            &g,
            &x,
        )
        .unwrap();
        let oracle = dense_parallel(&m, &par, &x, rounds);
        for t in 1..=rounds {
            assert!(rel(&trace.outputs[t], &oracle[t]) < 1e-10, "parallel t={t}");
        }

        let per = random_periodic(2 + case % 3, &mut rng);
        let trace = simulate(
            &SimulationConfig::new(FilterSpec::Periodic(per.clone()), NORM, rounds),
            &g,
            &x,
        )
        .unwrap();
        let oracle = dense_periodic(&m, &per, &x, rounds);
        for t in (per.period..=rounds).step_by(per.period) {
            assert!(trace.valid[t]);
            assert!(rel(&trace.outputs[t], &oracle[t]) < 1e-10, "periodic t={t}");
        }
    }
}

#[test]
fn periodic_boundaries_match_gamma_products() {
    let mut rng = rng(3);
    let g = random_graph(20, &mut rng);
    let x = random_signal(20, &mut rng);
    let form = random_periodic(3, &mut rng);
    let m = shifted(&build_shift_operator(&g, NORM, Some(unit())).unwrap());
    let (gamma, xi) = gamma_xi(&m, &form);
    let xv = DVector::from_iterator(20, x.iter().map(|&v| c(v)));
    let trace = simulate(
        &SimulationConfig::new(FilterSpec::Periodic(form), NORM, 30),
        &g,
        &x,
    )
    .unwrap();
    let mut y = DVector::<Complex64>::zeros(20);
    for i in 1..=10 {
        y = &gamma * y + &xi * &xv;
        let re: Vec<f64> = y.iter().map(|v| v.re).collect();
        assert!(rel(&trace.outputs[3 * i], &re) < 1e-10, "period {i}");
    }
}

#[test]
fn restarted_fir_matches_horner() {
    let mut rng = rng(5);
    let g = random_graph(50, &mut rng);
    let x = random_signal(50, &mut rng);
    let h: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
    let fir = FirDesign::new(h.clone(), unit()).unwrap();
    let op = build_shift_operator(&g, NORM, Some(unit())).unwrap();
    let want = dense_fir(op.laplacian(), &h, &x);
    let trace = simulate(
        &SimulationConfig::new(FilterSpec::Fir(fir), NORM, 15),
        &g,
        &x,
    )
    .unwrap();
    for t in [5, 10, 15] {
        assert!(trace.valid[t]);
        assert!(rel(&trace.outputs[t], &want) < 1e-9);
    }
    assert!(!trace.valid[3]);
}

#[test]
fn fir_order_zero_scales_immediately() {
    let g = Graph::path(3).unwrap();
    let fir = FirDesign::new(vec![2.5], unit()).unwrap();
    let trace = simulate(
        &SimulationConfig::new(FilterSpec::Fir(fir), NORM, 2),
        &g,
        &[1.0, 2.0, 3.0],
    )
    .unwrap();
    assert_eq!(trace.outputs[0], vec![2.5, 5.0, 7.5]);
    assert!(trace.accounting.iter().all(|a| a.scalars == 0));
}

#[test]
fn designed_filters_reach_the_exact_output() {
    let mut rng = rng(8);
    let g = random_graph(100, &mut rng);
    let x = random_signal(100, &mut rng);
    let design = design_arma(&DesiredResponse::step(unit()), &DesignConfig::with_order(5)).unwrap();
    let op = build_shift_operator(&g, NORM, Some(unit())).unwrap();
    let spectrum = eigendecompose(&op).unwrap();
    let signal = GraphSignal::new(x.clone());

    let par = FilterSpec::Parallel(design.parallel.clone().unwrap());
    let want = apply_filter_exact(&signal, &spectrum, |mu| par.response_at(mu).re).unwrap();
    let trace = simulate(&SimulationConfig::new(par, NORM, 100), &g, &x).unwrap();
    assert!(rel(trace.last().unwrap(), &want.values) < 1e-4);

    let per = FilterSpec::Periodic(design.periodic.clone().unwrap());
    let gamma = per.contraction_per_round_on(&spectrum.eigenvalues_mu);
    let rounds = ((1e-6f64).ln() / gamma.ln()).ceil() as usize;
    let rounds = rounds.div_ceil(5) * 5;
    let want = apply_filter_exact(&signal, &spectrum, |mu| per.response_at(mu).re).unwrap();
    let trace = simulate(&SimulationConfig::new(per, NORM, rounds), &g, &x).unwrap();
    let (_, y) = trace.last_valid().unwrap();
    assert!(rel(y, &want.values) < 1e-5);
}

#[test]
fn switched_input_tracks_the_new_fixed_point() {
    let mut rng = rng(21);
    let g = random_graph(20, &mut rng);
    let xa = random_signal(20, &mut rng);
    let xb = random_signal(20, &mut rng);
    let (psi, phi) = (0.7, 1.0);
    let m = shifted(&build_shift_operator(&g, NORM, Some(unit())).unwrap());
    let lhs = nalgebra::DMatrix::identity(20, 20) - &m * psi;
    let want = lhs
        .lu()
        .solve(&(DVector::from_column_slice(&xb) * phi))
        .unwrap();
    let source = SignalSource::Switch {
        at: 200,
        before: xa,
        after: xb,
    };
    let cfg = SimulationConfig::new(FilterSpec::arma1(psi, phi, unit()), NORM, 400);
    let trace = arma_core::engine::run_with_source(&cfg, &g, &source).unwrap();
    assert!(rel(&trace.outputs[400], want.as_slice()) < 1e-6);
}

#[test]
fn initial_conditions_are_forgotten_geometrically() {
    let mut rng = rng(4);
    for _ in 0..5 {
        let g = random_graph(15, &mut rng);
        let x = random_signal(15, &mut rng);
        let psi = rng.random_range(-0.9..0.9);
        let y0: Vec<f64> = random_signal(15, &mut rng);
        let filter = FilterSpec::arma1(psi, 1.0, unit());
        let a = simulate(&SimulationConfig::new(filter.clone(), NORM, 40), &g, &x).unwrap();
        let mut cfg = SimulationConfig::new(filter, NORM, 40);
        cfg.initial_condition = InitialCondition::Given(y0.clone());
        let b = simulate(&cfg, &g, &x).unwrap();
        let spectrum =
            eigendecompose(&build_shift_operator(&g, NORM, Some(unit())).unwrap()).unwrap();
        let gamma = psi.abs() * spectrum.mu_spectral_radius();
        let d0 = y0.iter().map(|v| v * v).sum::<f64>().sqrt();
        for t in 0..=40 {
            let dt: f64 = a.outputs[t]
                .iter()
                .zip(&b.outputs[t])
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            assert!(
                dt <= gamma.powi(t as i32) * d0 * (1.0 + 1e-9) + 1e-14,
                "t={t}"
            );
        }
    }
}

#[test]
fn messages_only_follow_edges() {
    let mut rng = rng(9);
    let g = random_graph(30, &mut rng);
    let x = random_signal(30, &mut rng);
    let par = random_parallel(3, &mut rng);
    let trace = simulate(
        &SimulationConfig::new(FilterSpec::Parallel(par), NORM, 5),
        &g,
        &x,
    )
    .unwrap();
    let directed_edges: usize = (0..30).map(|i| g.degree(i)).sum();
    for round in &trace.accounting {
        assert_eq!(round.messages, directed_edges);
        for i in 0..30 {
            assert_eq!(round.sent_per_node[i], 3 * g.degree(i));
        }
    }
}

#[test]
fn graph_switch_changes_the_operator_from_the_next_round() {
    let a = Graph::path(4).unwrap();
    let b = Graph::cycle(4).unwrap();
    let x = [1.0, 0.0, 0.0, 0.0];
    let filter = FilterSpec::arma1(0.5, 1.0, unit());
    let mut engine = Engine::new(&SimulationConfig::new(filter, NORM, 0), &a, &x).unwrap();
    engine.step().unwrap();
    engine.step_time_varying(None, Some(&b)).unwrap();
    let ma = shifted(&build_shift_operator(&a, NORM, Some(unit())).unwrap());
    let mb = shifted(&build_shift_operator(&b, NORM, Some(unit())).unwrap());
    let xv = DVector::from_column_slice(&x);
    let y1 = &xv * 1.0;
    let y2 = &mb * &y1 * 0.5 + &xv;
    assert!(rel(&engine.output(), y2.as_slice()) < 1e-12);
    let wrong = &ma * &y1 * 0.5 + &xv;
    assert!(rel(&engine.output(), wrong.as_slice()) > 1e-3);
}
