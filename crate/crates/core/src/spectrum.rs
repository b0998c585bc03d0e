//! Dense spectral decomposition, the graph Fourier transform and exact
//! spectral filtering. Everything here is an oracle for the distributed
//! recursions in [`crate::engine`].

use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::operator::{ShiftOperator, SpectralInterval};
use crate::signal::GraphSignal;

pub const DEFAULT_DENSE_CAP: usize = 5000;

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues of `L`, ascending.
    pub eigenvalues_lambda: Vec<f64>,
    /// Matching eigenvalues of `M`.
    pub eigenvalues_mu: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub basis: DMatrix<f64>,
    pub interval: SpectralInterval,
    /// Set when an eigenvalue falls outside the supplied interval. The
    /// spectrum is still usable; [`Spectrum::ensure_within_interval`] turns
    /// the warning into an error.
    pub interval_violation: Option<f64>,
}

pub fn eigendecompose(op: &ShiftOperator) -> Result<Spectrum> {
    eigendecompose_with_cap(op, DEFAULT_DENSE_CAP)
}

pub fn eigendecompose_with_cap(op: &ShiftOperator, cap: usize) -> Result<Spectrum> {
    let n = op.node_count();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let eig = SymmetricEigen::try_new(op.laplacian().clone(), 1e-15, 10_000)
        .ok_or(Error::NoConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut basis = DMatrix::zeros(n, n);
    let mut lambda = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).clone_owned();
        // sign convention: first non-negligible entry positive
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                v.neg_mut();
            }
        }
        basis.set_column(col, &v);
        lambda.push(eig.eigenvalues[src]);
    }

    let interval = op.interval();
    let scale = op.laplacian().amax().max(1.0);
    let interval_violation = lambda
        .iter()
        .copied()
        .find(|&l| !interval.contains(l, 1e-9 * scale));
    if let Some(value) = interval_violation {
        log::warn!(
            "eigenvalue {value} outside the spectral interval [{}, {}]",
            interval.min,
            interval.max
        );
    }
    let mu = lambda.iter().map(|&l| interval.lambda_to_mu(l)).collect();
    Ok(Spectrum {
        eigenvalues_lambda: lambda,
        eigenvalues_mu: mu,
        basis,
        interval,
        interval_violation,
    })
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues_lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues_lambda.is_empty()
    }

    pub fn ensure_within_interval(&self) -> Result<()> {
        match self.interval_violation {
            Some(value) => Err(Error::IntervalViolation {
                value,
                min: self.interval.min,
                max: self.interval.max,
            }),
            None => Ok(()),
        }
    }

    /// Spectral radius of `M` on this graph.
    pub fn mu_spectral_radius(&self) -> f64 {
        self.eigenvalues_mu
            .iter()
            .fold(0.0, |acc, m| acc.max(m.abs()))
    }

    pub fn eigenvector(&self, n: usize) -> Vec<f64> {
        self.basis.column(n).iter().copied().collect()
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }

    /// `x̂_n = ⟨x, φ_n⟩`.
    pub fn forward(&self, values: &[f64]) -> Result<Vec<f64>> {
        self.check_len(values.len())?;
        let x = DVector::from_column_slice(values);
        Ok(self.basis.tr_mul(&x).iter().copied().collect())
    }

    /// `x = Σ x̂_n φ_n`.
    pub fn inverse(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_len(coeffs.len())?;
        let c = DVector::from_column_slice(coeffs);
        Ok((&self.basis * c).iter().copied().collect())
    }

    /// Writes `n,lambda,mu` rows (1-based `n`).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["n", "lambda", "mu"])?;
        for (i, (l, m)) in self
            .eigenvalues_lambda
            .iter()
            .zip(&self.eigenvalues_mu)
            .enumerate()
        {
            wtr.write_record([(i + 1).to_string(), format!("{l:?}"), format!("{m:?}")])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub fn gft_forward(signal: &GraphSignal, spectrum: &Spectrum) -> Result<Vec<f64>> {
    spectrum.forward(&signal.values)
}

pub fn gft_inverse(coeffs: &[f64], spectrum: &Spectrum) -> Result<GraphSignal> {
    Ok(GraphSignal::new(spectrum.inverse(coeffs)?))
}

/// `Σ_n g(μ_n) x̂_n φ_n` for a response given as a function of `μ`.
pub fn apply_filter_exact<F>(
    signal: &GraphSignal,
    spectrum: &Spectrum,
    response: F,
) -> Result<GraphSignal>
where
    F: Fn(f64) -> f64,
{
    let coeffs = gft_forward(signal, spectrum)?;
    let mut filtered = Vec::with_capacity(coeffs.len());
    for (c, &mu) in coeffs.iter().zip(&spectrum.eigenvalues_mu) {
        let g = response(mu);
        if !g.is_finite() {
            return Err(Error::NonFiniteResponse { mu });
        }
        filtered.push(g * c);
    }
    let mut out = gft_inverse(&filtered, spectrum)?;
    out.timestamp = signal.timestamp;
    Ok(out)
}

/// Same as [`apply_filter_exact`] with the response written in `λ`.
pub fn apply_filter_exact_lambda<F>(
    signal: &GraphSignal,
    spectrum: &Spectrum,
    response: F,
) -> Result<GraphSignal>
where
    F: Fn(f64) -> f64,
{
    let iv = spectrum.interval;
    apply_filter_exact(signal, spectrum, |mu| response(iv.mu_to_lambda(mu)))
}

/// Empirical per-frequency gain `⟨Fx, φ_n⟩ / ⟨x, φ_n⟩`. Frequencies where
/// the input has (numerically) no energy are `None`.
pub fn measure_response(
    output: &GraphSignal,
    input: &GraphSignal,
    spectrum: &Spectrum,
) -> Result<Vec<Option<f64>>> {
    let x = gft_forward(input, spectrum)?;
    let y = gft_forward(output, spectrum)?;
    let tol = 1e-10 * input.norm().max(f64::MIN_POSITIVE);
    Ok(x.iter()
        .zip(&y)
        .map(|(&xn, &yn)| (xn.abs() > tol).then(|| yn / xn))
        .collect())
}
