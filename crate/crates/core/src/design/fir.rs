use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::poly;
use super::rational::FrequencyResponse;
use super::response::DesiredResponse;
use crate::error::{Error, Result};
use crate::operator::SpectralInterval;

/// `F_K = Σ_{k=0}^K h_k L^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirDesign {
    pub order: usize,
    pub h: Vec<f64>,
    pub interval: SpectralInterval,
}

impl FirDesign {
    pub fn new(h: Vec<f64>, interval: SpectralInterval) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::InvalidOrder(
                "FIR needs at least one coefficient".into(),
            ));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("non-finite FIR coefficient".into()));
        }
        Ok(Self {
            order: h.len() - 1,
            h,
            interval,
        })
    }

    pub fn eval_lambda(&self, lambda: f64) -> f64 {
        poly::eval_real(&self.h, lambda)
    }
}

impl FrequencyResponse for FirDesign {
    fn response_at(&self, mu: f64) -> Complex64 {
        Complex64::new(self.eval_lambda(self.interval.mu_to_lambda(mu)), 0.0)
    }
}

/// Trapezoid-weighted least-squares fit of `h*` by a degree-`K` polynomial
/// in `λ` on a uniform grid of the response interval.
pub fn design_fir(resp: &DesiredResponse, order: usize, grid_size: usize) -> Result<FirDesign> {
    if grid_size < order + 1 {
        return Err(Error::SingularSystem {
            stage: "fir",
            hint: format!(
                "grid of {grid_size} points cannot determine {} coefficients",
                order + 1
            ),
        });
    }
    let iv = resp.interval;
    let grid = Grid::uniform(iv.min, iv.max, grid_size)?;
    let target: Vec<f64> = grid.points.iter().map(|&l| resp.eval_lambda(l)).collect();
    let cheb = chebyshev_lstsq(&grid, &target, (iv.min, iv.max), order + 1, "fir")?;
    let h = to_monomial(&cheb, (iv.min, iv.max));
    FirDesign::new(h, iv)
}

/// Weighted LS coefficients in the Chebyshev basis of `range`.
pub(crate) fn chebyshev_lstsq(
    grid: &Grid,
    target: &[f64],
    range: (f64, f64),
    terms: usize,
    stage: &'static str,
) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    let rows: Vec<f64> = grid
        .points
        .iter()
        .flat_map(|&x| poly::chebyshev_row((2.0 * x - lo - hi) / (hi - lo), terms))
        .collect();
    let a = DMatrix::from_row_slice(grid.len(), terms, &rows);
    let sw = grid.sqrt_weights();
    let mut aw = a.clone();
    for (i, &w) in sw.iter().enumerate() {
        aw.row_mut(i).scale_mut(w);
    }
    if poly::rank(&aw, 1e-12) < terms {
        return Err(Error::SingularSystem {
            stage,
            hint: "basis matrix is rank deficient; use a larger grid".into(),
        });
    }
    if target.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem {
            stage,
            hint: "target response is not finite on the grid".into(),
        });
    }
    let x = poly::weighted_lstsq(&a, &DVector::from_column_slice(target), &sw)?;
    Ok(x.iter().copied().collect())
}

/// Converts Chebyshev coefficients on `range` to monomials in the original
/// variable.
pub(crate) fn to_monomial(cheb: &[f64], range: (f64, f64)) -> Vec<f64> {
    let (lo, hi) = range;
    let t = poly::chebyshev_to_monomial(cheb);
    poly::compose_affine(&t, 2.0 / (hi - lo), -(lo + hi) / (hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv() -> SpectralInterval {
        SpectralInterval::new(0.0, 2.0).unwrap()
    }

    #[test]
    fn identity_response_is_exact() {
        let r = DesiredResponse::sampled(iv(), vec![[0.0, 0.0], [2.0, 2.0]]).unwrap();
        let f = design_fir(&r, 1, 100).unwrap();
        assert!(f.h[0].abs() < 1e-12 && (f.h[1] - 1.0).abs() < 1e-12);
        assert!((f.response_at(iv().lambda_to_mu(1.5)).re - 1.5).abs() < 1e-12);
    }

    #[test]
    fn constant_response_order_zero() {
        let r = DesiredResponse::sampled(iv(), vec![[0.0, 0.3]]).unwrap();
        let f = design_fir(&r, 0, 10).unwrap();
        assert_eq!(f.h.len(), 1);
        assert!((f.h[0] - 0.3).abs() < 1e-14);
    }

    #[test]
    fn grid_too_small() {
        let r = DesiredResponse::step(iv());
        assert!(matches!(
            design_fir(&r, 5, 5),
            Err(Error::SingularSystem { .. })
        ));
    }
}
