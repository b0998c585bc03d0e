use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly;
use crate::error::{Error, Result};
use crate::operator::SpectralInterval;

/// Closed-form frequency response as a function of `μ`.
pub trait FrequencyResponse {
    fn response_at(&self, mu: f64) -> Complex64;
}

/// Pointwise evaluation; entries at poles come back non-finite.
pub fn evaluate_response(filter: &dyn FrequencyResponse, mu_grid: &[f64]) -> Vec<Complex64> {
    mu_grid.iter().map(|&mu| filter.response_at(mu)).collect()
}

/// Indices of non-finite entries in an evaluated response.
pub fn non_finite(values: &[Complex64]) -> Vec<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| !(v.re.is_finite() && v.im.is_finite()))
        .map(|(i, _)| i)
        .collect()
}

/// `g(μ) = Σ_{k<K} b_k μ^k / (1 + Σ_{k=1}^K a_k μ^k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalDesign {
    pub order: usize,
    /// `b_0 .. b_{K−1}`
    pub b: Vec<Complex64>,
    /// `a_1 .. a_K`
    pub a: Vec<Complex64>,
    pub interval: SpectralInterval,
}

impl RationalDesign {
    pub fn new(b: Vec<Complex64>, a: Vec<Complex64>, interval: SpectralInterval) -> Result<Self> {
        let order = a.len();
        if b.len() > order.max(1) {
            return Err(Error::NumeratorDegree {
                numerator: b.len().saturating_sub(1),
                denominator: order,
            });
        }
        let mut b = b;
        b.resize(order.max(b.len()), Complex64::new(0.0, 0.0));
        Ok(Self {
            order,
            b,
            a,
            interval,
        })
    }

    pub fn from_real(b: &[f64], a: &[f64], interval: SpectralInterval) -> Result<Self> {
        Self::new(
            b.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            interval,
        )
    }

    /// `[1, a_1, …, a_K]`
    pub fn denominator(&self) -> Vec<Complex64> {
        std::iter::once(Complex64::new(1.0, 0.0))
            .chain(self.a.iter().copied())
            .collect()
    }

    pub fn numerator(&self) -> &[Complex64] {
        &self.b
    }

    pub fn mu_range(&self) -> (f64, f64) {
        self.interval.mu_range()
    }

    /// Radius of the disk the poles must avoid.
    pub fn stability_radius(&self) -> f64 {
        self.interval.mu_radius()
    }

    pub fn is_real(&self) -> bool {
        self.a.iter().chain(&self.b).all(|c| c.im == 0.0)
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        let mut r = poly::roots(&self.denominator())?;
        if self.is_real() {
            poly::conjugate_close(&mut r);
        }
        Ok(r)
    }
}

impl FrequencyResponse for RationalDesign {
    fn response_at(&self, mu: f64) -> Complex64 {
        let x = Complex64::new(mu, 0.0);
        poly::eval_complex(&self.b, x) / poly::eval_complex(&self.denominator(), x)
    }
}

impl<T: FrequencyResponse + ?Sized> FrequencyResponse for &T {
    fn response_at(&self, mu: f64) -> Complex64 {
        (**self).response_at(mu)
    }
}
