#![allow(dead_code)]

use arma_core::design::{ParallelForm, PeriodicForm};
use arma_core::{Complex64, Graph, ShiftOperator};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let r = 1.4 * Graph::connectivity_radius(n);
    let g = Graph::connected_random_geometric(n, r, 500, rng).unwrap();
    assert!(g.is_connected());
    g
}

pub fn random_signal(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn rel(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let n: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    d / n.max(1e-300)
}

fn cmat(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

fn cvec(x: &[f64]) -> DVector<Complex64> {
    DVector::from_iterator(x.len(), x.iter().map(|&v| Complex64::new(v, 0.0)))
}

/// Dense `y_{t+1} = ψ M y_t + φ x`, `y_0 = 0`; returns `Re y_t` for `t = 0..=rounds`.
pub fn dense_arma1(
    m: &DMatrix<f64>,
    psi: Complex64,
    phi: Complex64,
    x: &[f64],
    rounds: usize,
) -> Vec<Vec<f64>> {
    let mc = cmat(m);
    let xv = cvec(x);
    let mut y = DVector::zeros(x.len());
    let mut out = vec![y.iter().map(|c: &Complex64| c.re).collect()];
    for _ in 0..rounds {
        y = (&mc * &y) * psi + &xv * phi;
        out.push(y.iter().map(|c| c.re).collect());
    }
    out
}

/// Sum of independent dense first-order recursions.
pub fn dense_parallel(
    m: &DMatrix<f64>,
    form: &ParallelForm,
    x: &[f64],
    rounds: usize,
) -> Vec<Vec<f64>> {
    let mut total = vec![vec![0.0; x.len()]; rounds + 1];
    for br in &form.branches {
        let part = dense_arma1(m, br.psi, br.phi, x, rounds);
        for (t, row) in part.iter().enumerate() {
            for (acc, v) in total[t].iter_mut().zip(row) {
                *acc += v;
            }
        }
    }
    total
}

/// Dense periodic recursion `y_{t+1} = (θ_τ I + ψ_τ M) y_t + φ_τ x`, `τ = t mod K`.
pub fn dense_periodic(
    m: &DMatrix<f64>,
    form: &PeriodicForm,
    x: &[f64],
    rounds: usize,
) -> Vec<Vec<f64>> {
    let mc = cmat(m);
    let xv = cvec(x);
    let mut y = DVector::zeros(x.len());
    let mut out = vec![vec![0.0; x.len()]];
    for t in 0..rounds {
        let k = t % form.period;
        y = &y * Complex64::new(form.theta[k], 0.0) + (&mc * &y) * form.psi[k] + &xv * form.phi[k];
        out.push(y.iter().map(|c| c.re).collect());
    }
    out
}

/// Per-period maps: `y_{K(i+1)} = Γ y_{Ki} + Ξ x` with
/// `Γ = ∏_τ (θ_τ I + ψ_τ M)` (later factors on the left).
pub fn gamma_xi(m: &DMatrix<f64>, form: &PeriodicForm) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let n = m.nrows();
    let mc = cmat(m);
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut gamma = id.clone();
    let mut xi = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..form.period {
        let step = &id * Complex64::new(form.theta[k], 0.0) + &mc * form.psi[k];
        gamma = &step * gamma;
        xi = &step * xi + &id * form.phi[k];
    }
    (gamma, xi)
}

/// `Σ_k h_k L^k x` evaluated by Horner's rule.
pub fn dense_fir(l: &DMatrix<f64>, h: &[f64], x: &[f64]) -> Vec<f64> {
    let xv = DVector::from_column_slice(x);
    let mut acc = DVector::zeros(x.len());
    for &c in h.iter().rev() {
        acc = l * acc + &xv * c;
    }
    acc.iter().copied().collect()
}

pub fn shifted(op: &ShiftOperator) -> DMatrix<f64> {
    op.shifted().clone()
}
