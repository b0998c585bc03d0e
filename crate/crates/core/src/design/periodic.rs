use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{relative_max_error, Grid, DEFAULT_GRID_SIZE};
use super::parallel::DEFAULT_RECONSTRUCTION_TOL;
use super::poly;
use super::rational::{evaluate_response, FrequencyResponse, RationalDesign};
use crate::error::{Error, Result};
use crate::operator::SpectralInterval;

/// Single recursion `y_{t+1} = (θ_t I + ψ_t M) y_t + φ_t x` whose
/// coefficients cycle with period `K`. The output is read at multiples of `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicForm {
    pub period: usize,
    pub theta: Vec<f64>,
    pub psi: Vec<Complex64>,
    pub phi: Vec<Complex64>,
    pub interval: SpectralInterval,
}

impl PeriodicForm {
    pub fn new(
        theta: Vec<f64>,
        psi: Vec<Complex64>,
        phi: Vec<Complex64>,
        interval: SpectralInterval,
    ) -> Result<Self> {
        let period = theta.len();
        if period == 0 || psi.len() != period || phi.len() != period {
            return Err(Error::InvalidOrder(format!(
                "periodic schedule lengths differ or are empty: θ {}, ψ {}, φ {}",
                theta.len(),
                psi.len(),
                phi.len()
            )));
        }
        Ok(Self {
            period,
            theta,
            psi,
            phi,
            interval,
        })
    }

    /// `θ = (0, 1, …, 1)`
    pub fn standard_theta(period: usize) -> Vec<f64> {
        (0..period)
            .map(|t| if t == 0 { 0.0 } else { 1.0 })
            .collect()
    }

    fn factor(&self, t: usize, mu: f64) -> Complex64 {
        self.theta[t] + self.psi[t] * mu
    }

    /// `A(μ) = Π_τ (θ_τ + ψ_τ μ)`, the per-period state gain.
    pub fn state_gain(&self, mu: f64) -> Complex64 {
        (0..self.period).map(|t| self.factor(t, mu)).product()
    }

    /// `B(μ) = Σ_τ Π_{σ=K−τ}^{K−1} (θ_σ + ψ_σ μ) φ_{K−τ−1}`, the per-period
    /// input gain.
    pub fn input_gain(&self, mu: f64) -> Complex64 {
        let k = self.period;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut prod = Complex64::new(1.0, 0.0);
        for tau in 0..k {
            if tau > 0 {
                prod *= self.factor(k - tau, mu);
            }
            acc += prod * self.phi[k - tau - 1];
        }
        acc
    }

    /// `sup |A(μ)|` over a uniform grid of the `μ` range.
    pub fn contraction(&self, grid_size: usize) -> f64 {
        let (lo, hi) = self.interval.mu_range();
        let n = grid_size.max(2);
        (0..n)
            .map(|i| {
                self.state_gain(lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_stable(&self) -> bool {
        self.contraction(DEFAULT_GRID_SIZE) < 1.0
    }
}

impl FrequencyResponse for PeriodicForm {
    fn response_at(&self, mu: f64) -> Complex64 {
        self.input_gain(mu) / (1.0 - self.state_gain(mu))
    }
}

pub fn to_periodic(design: &RationalDesign) -> Result<PeriodicForm> {
    to_periodic_with(design, DEFAULT_RECONSTRUCTION_TOL, DEFAULT_GRID_SIZE)
}

/// Factors `−Σ a_k μ^k = ψ_0 μ Π_{τ≥1}(1 + ψ_τ μ)` and solves the
/// triangular system for `φ`, then checks the result against the rational
/// response on a uniform grid.
pub fn to_periodic_with(
    design: &RationalDesign,
    tol: f64,
    grid_size: usize,
) -> Result<PeriodicForm> {
    let k = design.order;
    if k == 0 {
        return Err(Error::InvalidOrder("periodic form needs order ≥ 1".into()));
    }
    let a = &design.a;
    if a[k - 1].norm() == 0.0 {
        return Err(Error::DegenerateFactorization(format!(
            "a_{k} = 0; use a lower order"
        )));
    }
    if a[0].norm() == 0.0 {
        return Err(Error::DegenerateFactorization(
            "a_1 = 0 leaves ψ_0 = 0; the denominator cannot be factored".into(),
        ));
    }
    // q(μ) = −Σ_{k=1}^K a_k μ^{k−1}
    let q: Vec<Complex64> = a.iter().map(|&c| -c).collect();
    let mut roots = poly::roots(&q)?;
    if design.is_real() {
        poly::conjugate_close(&mut roots);
    }
    roots.sort_by(|x, y| {
        y.norm()
            .total_cmp(&x.norm())
            .then(x.arg().total_cmp(&y.arg()))
    });

    let mut psi = Vec::with_capacity(k);
    psi.push(q[0]);
    psi.extend(roots.iter().map(|&r| -1.0 / r));
    let theta = PeriodicForm::standard_theta(k);

    // basis P_τ(μ) = Π_{σ=K−τ}^{K−1} (1 + ψ_σ μ), degree τ, multiplies φ_{K−τ−1}
    let mut system = DMatrix::<Complex64>::zeros(k, k);
    let mut basis = vec![Complex64::new(1.0, 0.0)];
    for tau in 0..k {
        if tau > 0 {
            basis = poly::mul(&basis, &[Complex64::new(1.0, 0.0), psi[k - tau]]);
        }
        for (row, &c) in basis.iter().enumerate() {
            system[(row, k - tau - 1)] = c;
        }
    }
    let rhs = DVector::from_column_slice(&design.b[..k]);
    let phi = system.lu().solve(&rhs).ok_or(Error::SingularSystem {
        stage: "periodic φ",
        hint: "triangular numerator system is singular".into(),
    })?;
    let form = PeriodicForm::new(theta, psi, phi.iter().copied().collect(), design.interval)?;

    let (lo, hi) = design.mu_range();
    let grid = Grid::uniform(lo, hi, grid_size)?;
    let error = relative_max_error(
        &evaluate_response(&form, &grid.points),
        &evaluate_response(design, &grid.points),
    );
    if !(error <= tol) {
        return Err(Error::Reconstruction {
            form: "periodic",
            error,
        });
    }
    Ok(form)
}
