use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 1000;

/// Uniform grid with trapezoid quadrature weights.
#[derive(Debug, Clone)]
pub struct Grid {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid {
    pub fn uniform(lo: f64, hi: f64, size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::Config(format!(
                "grid needs at least 2 points, got {size}"
            )));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInterval { min: lo, max: hi });
        }
        let step = (hi - lo) / (size - 1) as f64;
        let points = (0..size)
            .map(|i| {
                if i + 1 == size {
                    hi
                } else {
                    lo + step * i as f64
                }
            })
            .collect();
        let mut weights = vec![step; size];
        weights[0] *= 0.5;
        weights[size - 1] *= 0.5;
        Ok(Self { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn sqrt_weights(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.sqrt()).collect()
    }

    /// `(Σ w |a − b|²)^{1/2}`.
    pub fn l2_distance(&self, a: &[Complex64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.weights)
            .map(|((x, y), w)| w * (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `max |a − b| / max |b|` (plain max difference if `b` vanishes).
pub fn relative_max_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let scale = b.iter().map(|y| y.norm()).fold(0.0, f64::max);
    if diff.is_nan() {
        return f64::INFINITY;
    }
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}
