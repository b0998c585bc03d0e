//! Two-step rational fit: a polynomial prefit fixes the denominator, then a
//! linear least-squares problem fixes the numerator.

use nalgebra::{DMatrix, DVector};

use super::fir::{chebyshev_lstsq, to_monomial};
use super::grid::Grid;
use super::poly;
use crate::error::{Error, Result};

/// Least-squares polynomial of degree `k_hat` fitted to `g_star` on a uniform
/// grid of `range`, solved in the Chebyshev basis and returned as monomial
/// coefficients.
pub fn chebyshev_prefit<F>(
    g_star: F,
    range: (f64, f64),
    k_hat: usize,
    grid_size: usize,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    let grid = Grid::uniform(range.0, range.1, grid_size)?;
    let target: Vec<f64> = grid.points.iter().map(|&x| g_star(x)).collect();
    let cheb = chebyshev_lstsq(&grid, &target, range, k_hat + 1, "chebyshev prefit")?;
    Ok(to_monomial(&cheb, range))
}

/// Denominator `a_1..a_K` from the coefficient-wise system `p_a ĝ = p_b`.
///
/// Coefficients of `p_a ĝ` of degree `K..=K̂` must vanish because `p_b` has
/// degree `K − 1`. The system is solved for the minimum-norm least-squares
/// solution.
pub fn shank_step1_denominator(g_hat: &[f64], order: usize) -> Result<Vec<f64>> {
    if g_hat.is_empty() || g_hat.len() - 1 < order {
        return Err(Error::InvalidOrder(format!(
            "prefit degree {} is below the design order {order}; increase K̂",
            g_hat.len().saturating_sub(1)
        )));
    }
    if order == 0 {
        return Ok(Vec::new());
    }
    let k_hat = g_hat.len() - 1;
    let rows = k_hat - order + 1;
    let mut m = DMatrix::zeros(rows, order);
    let mut rhs = DVector::zeros(rows);
    for (r, deg) in (order..=k_hat).enumerate() {
        for k in 1..=order {
            m[(r, k - 1)] = g_hat[deg - k];
        }
        rhs[r] = -g_hat[deg];
    }
    let a = poly::lstsq(&m, &rhs).map_err(|_| Error::SingularSystem {
        stage: "denominator",
        hint: "the coefficient system could not be solved; try a larger K̂ or a different grid"
            .into(),
    })?;
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem {
            stage: "denominator",
            hint: "non-finite denominator; try a larger K̂ or a different grid".into(),
        });
    }
    Ok(a.iter().copied().collect())
}

/// Numerator `b_0..b_{K−1}` minimizing the grid-discretized
/// `∫ |p_b/p_a − g*|²` with `a` held fixed.
pub fn shank_step2_numerator<F>(
    g_star: F,
    a: &[f64],
    order: usize,
    range: (f64, f64),
    grid_size: usize,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    if order == 0 {
        return Ok(Vec::new());
    }
    let grid = Grid::uniform(range.0, range.1, grid_size)?;
    if grid.len() < order {
        return Err(Error::SingularSystem {
            stage: "numerator",
            hint: "grid smaller than the numerator size".into(),
        });
    }
    let (lo, hi) = range;
    let mut den = vec![1.0];
    den.extend_from_slice(a);
    let mut basis = DMatrix::zeros(grid.len(), order);
    let mut target = DVector::zeros(grid.len());
    for (i, &x) in grid.points.iter().enumerate() {
        let pa = poly::eval_real(&den, x);
        if !(pa.is_finite() && pa != 0.0) {
            return Err(Error::NonFiniteResponse { mu: x });
        }
        let row = poly::chebyshev_row((2.0 * x - lo - hi) / (hi - lo), order);
        for (k, t) in row.into_iter().enumerate() {
            basis[(i, k)] = t / pa;
        }
        target[i] = g_star(x);
    }
    let cheb = poly::weighted_lstsq(&basis, &target, &grid.sqrt_weights())?;
    let cheb: Vec<f64> = cheb.iter().copied().collect();
    Ok(to_monomial(&cheb, range))
}
