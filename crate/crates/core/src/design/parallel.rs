use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{relative_max_error, Grid, DEFAULT_GRID_SIZE};
use super::poly;
use super::rational::{evaluate_response, FrequencyResponse, RationalDesign};
use crate::error::{Error, Result};
use crate::operator::SpectralInterval;

pub const DEFAULT_EPS_SEP: f64 = 1e-8;
pub const DEFAULT_RECONSTRUCTION_TOL: f64 = 1e-6;

/// One first-order recursion `y' = ψ M y + φ x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub psi: Complex64,
    pub phi: Complex64,
}

impl Branch {
    pub fn from_pole_residue(pole: Complex64, residue: Complex64) -> Self {
        let psi = 1.0 / pole;
        Self {
            psi,
            phi: -residue * psi,
        }
    }

    /// `p = 1/ψ`
    pub fn pole(&self) -> Complex64 {
        1.0 / self.psi
    }

    /// `r = −φ/ψ`
    pub fn residue(&self) -> Complex64 {
        -self.phi / self.psi
    }

    /// `r/(μ − p)`, written as `φ/(1 − ψμ)`.
    pub fn response_at(&self, mu: f64) -> Complex64 {
        self.phi / (1.0 - self.psi * mu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelForm {
    pub branches: Vec<Branch>,
    pub interval: SpectralInterval,
}

impl ParallelForm {
    pub fn order(&self) -> usize {
        self.branches.len()
    }

    /// `max_k |ψ_k| · R`, the contraction of the slowest branch.
    pub fn contraction(&self) -> f64 {
        let r = self.interval.mu_radius();
        self.branches
            .iter()
            .map(|b| b.psi.norm() * r)
            .fold(0.0, f64::max)
    }

    pub fn is_stable(&self) -> bool {
        self.contraction() < 1.0
    }
}

impl FrequencyResponse for ParallelForm {
    fn response_at(&self, mu: f64) -> Complex64 {
        self.branches.iter().map(|b| b.response_at(mu)).sum()
    }
}

pub fn to_parallel(design: &RationalDesign) -> Result<ParallelForm> {
    to_parallel_with(
        design,
        DEFAULT_EPS_SEP,
        DEFAULT_RECONSTRUCTION_TOL,
        DEFAULT_GRID_SIZE,
    )
}

/// Partial fractions `Σ r_k/(μ − p_k)` of `p_b/p_a`, checked against the
/// rational response on a uniform grid of the `μ` range.
pub fn to_parallel_with(
    design: &RationalDesign,
    eps_sep: f64,
    tol: f64,
    grid_size: usize,
) -> Result<ParallelForm> {
    let den = design.denominator();
    let den_deg = poly::degree(&den).unwrap_or(0);
    if let Some(num_deg) = poly::degree(&design.b) {
        if num_deg >= den_deg {
            return Err(Error::NumeratorDegree {
                numerator: num_deg,
                denominator: den_deg,
            });
        }
    }
    let poles = design.poles()?;
    for i in 0..poles.len() {
        for j in i + 1..poles.len() {
            let sep = (poles[i] - poles[j]).norm();
            if sep <= eps_sep * poles[i].norm().max(poles[j].norm()) {
                return Err(Error::RepeatedPoles { separation: sep });
            }
        }
    }
    let dden = poly::derivative(&den);
    let mut residues: Vec<Complex64> = poles
        .iter()
        .map(|&p| poly::eval_complex(&design.b, p) / poly::eval_complex(&dden, p))
        .collect();
    let real = design.is_real();
    if real {
        close_residues(&poles, &mut residues);
    }

    let (lo, hi) = design.mu_range();
    let grid = Grid::uniform(lo, hi, grid_size)?;
    let reference = evaluate_response(design, &grid.points);
    let build = |residues: &[Complex64]| ParallelForm {
        branches: poles
            .iter()
            .zip(residues)
            .map(|(&p, &r)| Branch::from_pole_residue(p, r))
            .collect(),
        interval: design.interval,
    };

    let form = build(&residues);
    let mut error = relative_max_error(&evaluate_response(&form, &grid.points), &reference);
    if error <= tol {
        return Ok(form);
    }
    // residues from the formula lose accuracy when poles cluster; refit them
    if !poles.is_empty() {
        let mut a = DMatrix::<Complex64>::zeros(grid.len(), poles.len());
        for (i, &mu) in grid.points.iter().enumerate() {
            for (k, &p) in poles.iter().enumerate() {
                a[(i, k)] = 1.0 / (Complex64::new(mu, 0.0) - p);
            }
        }
        let rhs = DVector::from_column_slice(&reference);
        if let Ok(x) = poly::lstsq_complex(&a, &rhs) {
            let mut refit: Vec<Complex64> = x.iter().copied().collect();
            if real {
                close_residues(&poles, &mut refit);
            }
            let candidate = build(&refit);
            let e = relative_max_error(&evaluate_response(&candidate, &grid.points), &reference);
            if e <= tol {
                return Ok(candidate);
            }
            error = error.min(e);
        }
    }
    Err(Error::Reconstruction {
        form: "parallel",
        error,
    })
}

fn close_residues(poles: &[Complex64], residues: &mut [Complex64]) {
    for i in 0..poles.len() {
        if poles[i].im == 0.0 {
            residues[i].im = 0.0;
        } else if poles[i].im > 0.0 {
            if let Some(j) = poles.iter().position(|&q| q == poles[i].conj()) {
                let r = 0.5 * (residues[i] + residues[j].conj());
                residues[i] = r;
                residues[j] = r.conj();
            }
        }
    }
}
