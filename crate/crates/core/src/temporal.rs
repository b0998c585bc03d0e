//! Joint graph/time transfer functions `H(z, μ)` and their empirical
//! measurement from sinusoid-driven simulations.
//!
//! For periodic filters `z` is the per-period variable: one step of `z`
//! spans `K` rounds and the input is held over each period.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::design::{poly, ParallelForm, PeriodicForm};
use crate::engine::{Engine, FilterSpec, SimulationConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectrum::Spectrum;

fn check_z(z: Complex64, allow_interior: bool) -> Result<()> {
    if !allow_interior && z.norm() < 1.0 - 1e-12 {
        return Err(Error::Config(format!(
            "|z| = {} lies inside the unit circle; enable interior evaluation explicitly",
            z.norm()
        )));
    }
    Ok(())
}

fn finite(v: Complex64, mu: f64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteResponse { mu })
    }
}

/// `φ/(z − ψμ)`
pub fn arma1_transfer(psi: Complex64, phi: Complex64, z: Complex64, mu: f64) -> Result<Complex64> {
    check_z(z, false)?;
    finite(phi / (z - psi * mu), mu)
}

/// `Σ_k φ_k/(z − ψ_k μ)`
pub fn parallel_transfer(form: &ParallelForm, z: Complex64, mu: f64) -> Result<Complex64> {
    check_z(z, false)?;
    finite(parallel_raw(form, z, mu), mu)
}

/// `B(μ)/(z − A(μ))` with `A`, `B` the per-period gains.
pub fn periodic_transfer(form: &PeriodicForm, z: Complex64, mu: f64) -> Result<Complex64> {
    check_z(z, false)?;
    finite(periodic_raw(form, z, mu), mu)
}

fn parallel_raw(form: &ParallelForm, z: Complex64, mu: f64) -> Complex64 {
    form.branches.iter().map(|b| b.phi / (z - b.psi * mu)).sum()
}

fn periodic_raw(form: &PeriodicForm, z: Complex64, mu: f64) -> Complex64 {
    form.input_gain(mu) / (z - form.state_gain(mu))
}

#[derive(Debug, Clone, PartialEq)]
pub enum JointResponse {
    Arma1 { psi: Complex64, phi: Complex64 },
    Parallel(ParallelForm),
    Periodic(PeriodicForm),
}

impl JointResponse {
    pub fn from_filter(filter: &FilterSpec) -> Result<Self> {
        match filter {
            FilterSpec::Arma1 { psi, phi, .. } => Ok(Self::Arma1 {
                psi: *psi,
                phi: *phi,
            }),
            FilterSpec::Parallel(p) => Ok(Self::Parallel(p.clone())),
            FilterSpec::Periodic(p) => Ok(Self::Periodic(p.clone())),
            FilterSpec::Fir(_) => Err(Error::Config(
                "FIR filters have no recursive transfer function".into(),
            )),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Arma1 { .. } => "arma1",
            Self::Parallel(_) => "parallel",
            Self::Periodic(_) => "periodic",
        }
    }

    pub fn eval(&self, z: Complex64, mu: f64) -> Result<Complex64> {
        self.eval_with(z, mu, false)
    }

    /// Like [`JointResponse::eval`]; `allow_interior` permits `|z| < 1`.
    pub fn eval_with(&self, z: Complex64, mu: f64, allow_interior: bool) -> Result<Complex64> {
        check_z(z, allow_interior)?;
        let v = match self {
            Self::Arma1 { psi, phi } => phi / (z - psi * mu),
            Self::Parallel(p) => parallel_raw(p, z, mu),
            Self::Periodic(p) => periodic_raw(p, z, mu),
        };
        finite(v, mu)
    }

    /// Writes `omega,mu,magnitude,phase` rows of `H(e^{jω}, μ)`.
    pub fn write_grid_csv<W: Write>(&self, omegas: &[f64], mus: &[f64], writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["omega", "mu", "magnitude", "phase"])?;
        for &w in omegas {
            for &mu in mus {
                let (mag, phase) = match self.eval(Complex64::from_polar(1.0, w), mu) {
                    Ok(h) => (h.norm(), h.arg()),
                    Err(_) => (f64::INFINITY, f64::NAN),
                };
                wtr.write_record([
                    format!("{w:?}"),
                    format!("{mu:?}"),
                    format!("{mag:?}"),
                    format!("{phase:?}"),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Measured steady-state response to `x_t = cos(ωt) φ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalGain {
    /// Complex gain estimate `A − jB` from the fit `A cos + B sin`.
    pub response: Complex64,
    pub amplitude: f64,
    /// Principal value in `(−π, π]`.
    pub phase: f64,
    /// RMS fit residual relative to the fitted amplitude.
    pub residual: f64,
    /// Rounds discarded as transient.
    pub discarded: usize,
    /// Samples used in the fit.
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainOptions {
    /// Samples (rounds, or periods for periodic filters) in the fit window.
    pub fit_samples: usize,
    /// The transient is run until `γ^t` falls below this.
    pub transient_tol: f64,
    /// Upper bound on simulated rounds.
    pub max_rounds: usize,
    /// Fit residual above which the run is rejected.
    pub max_residual: f64,
}

impl Default for GainOptions {
    fn default() -> Self {
        Self {
            fit_samples: 400,
            transient_tol: 1e-10,
            max_rounds: 200_000,
            max_residual: 0.05,
        }
    }
}

/// Drives the filter with `cos(ωt) φ_n` (per period for periodic filters,
/// with the input held within each period), discards the transient and
/// fits a sinusoid to the `φ_n` coefficient of the output.
pub fn measure_temporal_gain(
    config: &SimulationConfig,
    graph: &Graph,
    spectrum: &Spectrum,
    n: usize,
    omega: f64,
    opts: &GainOptions,
) -> Result<TemporalGain> {
    if n >= spectrum.len() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.len(),
            got: n + 1,
        });
    }
    let filter = &config.filter;
    if matches!(filter, FilterSpec::Fir(_)) {
        return Err(Error::Config(
            "temporal gain needs a recursive filter".into(),
        ));
    }
    let period = filter.period();
    // contraction per sample of the fitted sequence
    let gamma = match filter {
        FilterSpec::Periodic(_) => filter.contraction_on(&spectrum.eigenvalues_mu),
        _ => filter.contraction_per_round_on(&spectrum.eigenvalues_mu),
    };
    if !(gamma < 1.0) && !config.force {
        return Err(Error::Unstable(format!(
            "contraction {gamma} on this graph"
        )));
    }
    let by_rule = (5.0 / (1.0 - gamma)).ceil();
    let by_tol = if gamma > 0.0 {
        (opts.transient_tol.ln() / gamma.ln()).ceil()
    } else {
        1.0
    };
    let discard = by_rule.max(by_tol).max(1.0) as usize;
    let samples = opts.fit_samples.max(3);
    let total = (discard + samples) * period;
    if total > opts.max_rounds {
        return Err(Error::TransientNotDecayed { residual: f64::NAN });
    }

    let phi_n = spectrum.eigenvector(n);
    let drive = |i: usize| -> Vec<f64> {
        let c = (omega * i as f64).cos();
        phi_n.iter().map(|v| c * v).collect()
    };
    let mut engine = Engine::new(config, graph, &drive(0))?;
    let mut coeffs = Vec::with_capacity(samples);
    for i in 0..discard + samples {
        if i >= discard {
            coeffs.push(project(&engine.output(), &phi_n));
        }
        // the input for sample i+1 is supplied before the period starts
        for r in 0..period {
            if r == 0 {
                engine.set_signal(&drive(i))?;
            }
            engine.step()?;
        }
    }
    // coeffs[k] is the output at sample s = discard + k, driven by x up to s − 1
    let times: Vec<f64> = (0..samples).map(|k| (discard + k) as f64).collect();
    fit_sinusoid(&coeffs, &times, omega, opts.max_residual).map(|(response, residual)| {
        TemporalGain {
            response,
            amplitude: response.norm(),
            phase: response.arg(),
            residual,
            discarded: discard,
            samples,
        }
    })
}

fn project(y: &[f64], phi: &[f64]) -> f64 {
    y.iter().zip(phi).map(|(a, b)| a * b).sum()
}

/// Least-squares fit `c_t ≈ A cos(ωt) + B sin(ωt)`; returns `A − jB`.
fn fit_sinusoid(c: &[f64], t: &[f64], omega: f64, max_residual: f64) -> Result<(Complex64, f64)> {
    let dc = (omega.rem_euclid(2.0 * PI)).abs() < 1e-12;
    let cols = if dc { 1 } else { 2 };
    let mut a = DMatrix::zeros(c.len(), cols);
    for (i, &ti) in t.iter().enumerate() {
        a[(i, 0)] = (omega * ti).cos();
        if !dc {
            a[(i, 1)] = (omega * ti).sin();
        }
    }
    let rhs = DVector::from_column_slice(c);
    let x = poly::lstsq(&a, &rhs)?;
    let resid = (&a * &x - &rhs).norm() / (c.len() as f64).sqrt();
    let response = if dc {
        Complex64::new(x[0], 0.0)
    } else {
        Complex64::new(x[0], -x[1])
    };
    // a sinusoid of amplitude |H| has RMS |H|/√2
    let scale = response.norm() / if dc { 1.0 } else { 2f64.sqrt() };
    let rel = if scale > 0.0 { resid / scale } else { resid };
    if rel > max_residual {
        return Err(Error::TransientNotDecayed { residual: rel });
    }
    Ok((response, rel))
}

/// Steady-state response of a driven recursion relative to the input sample
/// index: the sample at `s` responds to inputs up to `s − 1`, so the fitted
/// gain equals `H(e^{jω}, μ)` directly.
pub fn expected_gain(response: &JointResponse, omega: f64, mu: f64) -> Result<Complex64> {
    response.eval(Complex64::from_polar(1.0, omega), mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::Branch;
    use crate::operator::SpectralInterval;

    fn iv() -> SpectralInterval {
        SpectralInterval::new(0.0, 2.0).unwrap()
    }

    #[test]
    fn arma1_at_dc_is_static_response() {
        let (psi, phi) = (Complex64::new(0.3, 0.0), Complex64::new(0.8, 0.0));
        for mu in [-1.0, 0.0, 0.5, 1.0] {
            let h = arma1_transfer(psi, phi, Complex64::new(1.0, 0.0), mu).unwrap();
            assert!((h - phi / (1.0 - psi * mu)).norm() < 1e-15);
        }
        let memoryless =
            arma1_transfer(Complex64::new(0.0, 0.0), phi, Complex64::new(0.0, 1.0), 0.7).unwrap();
        assert!((memoryless - phi / Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn interior_z_requires_opt_in() {
        let r = JointResponse::Arma1 {
            psi: Complex64::new(0.3, 0.0),
            phi: Complex64::new(1.0, 0.0),
        };
        assert!(r.eval(Complex64::new(0.5, 0.0), 0.0).is_err());
        assert!(r.eval_with(Complex64::new(0.5, 0.0), 0.0, true).is_ok());
    }

    #[test]
    fn pole_is_flagged() {
        let b = Branch {
            psi: Complex64::new(1.0, 0.0),
            phi: Complex64::new(1.0, 0.0),
        };
        let p = ParallelForm {
            branches: vec![b],
            interval: iv(),
        };
        assert!(matches!(
            parallel_transfer(&p, Complex64::new(1.0, 0.0), 1.0),
            Err(Error::NonFiniteResponse { .. })
        ));
    }
}
