//! Universal filter design.
//!
//! FIR filters are fitted directly by least squares. ARMA filters go through
//! a two-step rational fit (see [`shank`]) on the normalized axis
//! `s = μ/R`, `R = max|μ|`, after which the rational response is converted to
//! the parallel and periodic realizations the engine executes.

pub mod document;
pub mod fir;
pub mod grid;
pub mod parallel;
pub mod periodic;
pub mod poly;
pub mod rational;
pub mod response;
pub mod shank;
pub mod stability;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use document::{DesignDocument, FirDocument};
pub use fir::{design_fir, FirDesign};
pub use grid::{relative_max_error, Grid, DEFAULT_GRID_SIZE};
pub use parallel::{to_parallel, to_parallel_with, Branch, ParallelForm};
pub use periodic::{to_periodic, to_periodic_with, PeriodicForm};
pub use rational::{evaluate_response, non_finite, FrequencyResponse, RationalDesign};
pub use response::{map_to_mu, DesiredResponse, MuResponse, ResponseKind};
pub use shank::{chebyshev_prefit, shank_step1_denominator, shank_step2_numerator};
pub use stability::{check_stability_rational, periodic_contraction, StabilityReport};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignConfig {
    pub order: usize,
    /// Prefit degree; `order + 1` when unset.
    pub k_hat: Option<usize>,
    pub grid_size: usize,
    pub eps_stab: f64,
    pub eps_sep: f64,
    /// Required gap below 1 of the periodic per-period contraction.
    pub periodic_margin: f64,
    /// Gap below 1 that a repaired denominator is scaled to.
    pub repair_margin: f64,
    /// Relative radius increase for reflected poles.
    pub reflect_delta: f64,
    /// Largest prefit degree tried is `order + max_k_hat_extra`.
    pub max_k_hat_extra: usize,
    pub reconstruction_tol: f64,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            order: 5,
            k_hat: None,
            grid_size: DEFAULT_GRID_SIZE,
            eps_stab: stability::DEFAULT_EPS_STAB,
            eps_sep: parallel::DEFAULT_EPS_SEP,
            periodic_margin: 0.05,
            repair_margin: 0.5,
            reflect_delta: 0.05,
            max_k_hat_extra: 5,
            reconstruction_tol: parallel::DEFAULT_RECONSTRUCTION_TOL,
        }
    }
}

impl DesignConfig {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidOrder(
                "order must be ≥ 1 for ARMA; use fir kind".into(),
            ));
        }
        if let Some(k_hat) = self.k_hat {
            if k_hat < self.order {
                return Err(Error::InvalidOrder(format!(
                    "K̂ = {k_hat} is below the order {}",
                    self.order
                )));
            }
        }
        let need = self.order
            + self
                .k_hat
                .unwrap_or(self.order + 1)
                .max(self.order + self.max_k_hat_extra)
            + 1;
        if self.grid_size < need {
            return Err(Error::Config(format!(
                "grid_size {} too small for order {}; need at least {need}",
                self.grid_size, self.order
            )));
        }
        for (name, v) in [
            ("eps_stab", self.eps_stab),
            ("eps_sep", self.eps_sep),
            ("reconstruction_tol", self.reconstruction_tol),
            ("reflect_delta", self.reflect_delta),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.repair_margin) {
            return Err(Error::Config(format!(
                "repair_margin must lie in [0, 1), got {}",
                self.repair_margin
            )));
        }
        if !(0.0..1.0).contains(&self.periodic_margin) {
            return Err(Error::Config(format!(
                "periodic_margin must lie in [0, 1), got {}",
                self.periodic_margin
            )));
        }
        Ok(())
    }

    fn ladder(&self) -> Vec<usize> {
        let first = self.k_hat.unwrap_or(self.order + 1);
        let mut out = vec![first];
        for k in self.order + 2..=self.order + self.max_k_hat_extra {
            if !out.contains(&k) {
                out.push(k);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub k_hat: usize,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub k_hat: usize,
    /// Poles moved outward by the fallback.
    pub reflected_poles: usize,
    /// Radial scale `a_k → σ^k a_k` applied by the fallback.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial_scale: Option<f64>,
    /// `sup |A(μ)|` of the periodic realization.
    pub periodic_contraction: f64,
    /// Trapezoid-weighted grid L² distance to the target.
    pub l2_error: f64,
    pub attempts: Vec<Attempt>,
    pub notes: Vec<String>,
}

/// Output of the ARMA pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaDesign {
    pub response: DesiredResponse,
    pub config: DesignConfig,
    pub rational: RationalDesign,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallel: Option<ParallelForm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic: Option<PeriodicForm>,
    pub stability: StabilityReport,
    pub report: DesignReport,
}

impl ArmaDesign {
    pub fn order(&self) -> usize {
        self.rational.order
    }
}

/// Trapezoid-weighted L² distance between a filter and the target on a
/// uniform `μ` grid.
pub fn l2_error(
    filter: &dyn FrequencyResponse,
    resp: &DesiredResponse,
    grid_size: usize,
) -> Result<f64> {
    let (lo, hi) = resp.interval.mu_range();
    let grid = Grid::uniform(lo, hi, grid_size)?;
    let target: Vec<f64> = grid.points.iter().map(|&mu| resp.eval_mu(mu)).collect();
    Ok(grid.l2_distance(&evaluate_response(filter, &grid.points), &target))
}

struct Candidate {
    rational: RationalDesign,
    stability: StabilityReport,
    contraction: f64,
    parallel: Result<ParallelForm>,
    periodic: Result<PeriodicForm>,
    l2: f64,
}

impl Candidate {
    fn accepted(&self, cfg: &DesignConfig) -> bool {
        self.stability.stable
            && self.contraction <= 1.0 - cfg.periodic_margin
            && self.parallel.is_ok()
            && self.periodic.is_ok()
    }

    fn summary(&self, cfg: &DesignConfig) -> String {
        if self.accepted(cfg) {
            return format!("accepted, L2 error {:.3e}", self.l2);
        }
        let mut why = Vec::new();
        if !self.stability.stable {
            why.push(format!(
                "unstable (min margin {:.3e})",
                self.stability.min_margin().unwrap_or(f64::NAN)
            ));
        }
        if self.contraction > 1.0 - cfg.periodic_margin {
            why.push(format!("periodic contraction {:.4}", self.contraction));
        }
        if let Err(e) = &self.parallel {
            why.push(format!("parallel: {e}"));
        }
        if let Err(e) = &self.periodic {
            why.push(format!("periodic: {e}"));
        }
        why.join("; ")
    }
}

struct Problem<'a> {
    resp: &'a DesiredResponse,
    cfg: &'a DesignConfig,
    radius: f64,
    s_range: (f64, f64),
}

impl Problem<'_> {
    fn g_s(&self, s: f64) -> f64 {
        self.resp.eval_mu(self.radius * s)
    }

    fn denominator(&self, k_hat: usize) -> Result<Vec<f64>> {
        let g_hat = chebyshev_prefit(|s| self.g_s(s), self.s_range, k_hat, self.cfg.grid_size)?;
        shank_step1_denominator(&g_hat, self.cfg.order)
    }

    fn evaluate(&self, a_s: Vec<f64>) -> Result<Candidate> {
        let cfg = self.cfg;
        let b_s = shank_step2_numerator(
            |s| self.g_s(s),
            &a_s,
            cfg.order,
            self.s_range,
            cfg.grid_size,
        )?;
        let unscale = |c: &[f64], first_power: i32| -> Vec<Complex64> {
            c.iter()
                .enumerate()
                .map(|(k, &v)| Complex64::new(v / self.radius.powi(k as i32 + first_power), 0.0))
                .collect()
        };
        let rational = RationalDesign::new(unscale(&b_s, 0), unscale(&a_s, 1), self.resp.interval)?;
        let stability = check_stability_rational(&rational, cfg.eps_stab);
        let a_c: Vec<Complex64> = a_s.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let contraction = periodic_contraction(&a_c, self.s_range, cfg.grid_size);
        let (parallel, periodic) = if stability.stable {
            (
                to_parallel_with(
                    &rational,
                    cfg.eps_sep,
                    cfg.reconstruction_tol,
                    cfg.grid_size,
                ),
                to_periodic_with(&rational, cfg.reconstruction_tol, cfg.grid_size),
            )
        } else {
            let e = || Error::Unstable("denominator has poles inside the stability disk".into());
            (Err(e()), Err(e()))
        };
        let l2 = l2_error(&rational, self.resp, cfg.grid_size)?;
        Ok(Candidate {
            rational,
            stability,
            contraction,
            parallel,
            periodic,
            l2,
        })
    }
}

/// Runs the full ARMA design pipeline.
///
/// Prefit degrees `K̂, K+2, …, K+max_k_hat_extra` are tried in turn; the
/// first candidate that is stable, has a stable periodic realization and
/// converts to both realizations within tolerance is returned. Otherwise the
/// first candidate's denominator is repaired (poles reflected outside the
/// disk, then radially scaled until the periodic realization contracts) and
/// the numerator refitted. A rationally unstable result is never returned.
pub fn design_arma(resp: &DesiredResponse, cfg: &DesignConfig) -> Result<ArmaDesign> {
    cfg.validate()?;
    resp.validate(cfg.grid_size)?;
    let radius = resp.interval.mu_radius();
    let (lo, hi) = resp.interval.mu_range();
    let problem = Problem {
        resp,
        cfg,
        radius,
        s_range: (lo / radius, hi / radius),
    };

    let mut attempts = Vec::new();
    let mut first: Option<(usize, Vec<f64>)> = None;
    for k_hat in cfg.ladder() {
        let candidate = problem.denominator(k_hat).and_then(|a| {
            if first.is_none() {
                first = Some((k_hat, a.clone()));
            }
            problem.evaluate(a)
        });
        match candidate {
            Ok(c) => {
                attempts.push(Attempt {
                    k_hat,
                    outcome: c.summary(cfg),
                });
                log::debug!("K̂ = {k_hat}: {}", c.summary(cfg));
                if c.accepted(cfg) {
                    return Ok(finish(resp, cfg, c, k_hat, 0, None, attempts, Vec::new()));
                }
            }
            Err(e) => attempts.push(Attempt {
                k_hat,
                outcome: format!("failed: {e}"),
            }),
        }
    }

    let Some((k_hat, a_s)) = first else {
        return Err(Error::DesignFailed {
            stage: "denominator",
            reason: attempts
                .last()
                .map(|a| a.outcome.clone())
                .unwrap_or_default(),
        });
    };
    let mut notes = vec![format!(
        "no prefit degree in the ladder met every contract; repaired the K̂ = {k_hat} denominator"
    )];
    let (a_s, reflected) =
        reflect_poles(&a_s, 1.0 + cfg.eps_stab.max(0.0), 1.0 + cfg.reflect_delta)?;
    let target = 1.0 - cfg.repair_margin.max(cfg.periodic_margin);
    let contraction = |a: &[f64]| {
        let c: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        periodic_contraction(&c, problem.s_range, cfg.grid_size)
    };
    let mut scale = None;
    let a_s = if contraction(&a_s) > target {
        let (mut ok, mut bad) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (ok + bad);
            if contraction(&radial_scale(&a_s, mid)) <= target {
                ok = mid;
            } else {
                bad = mid;
            }
        }
        scale = Some(ok);
        radial_scale(&a_s, ok)
    } else {
        a_s
    };
    let c = problem.evaluate(a_s)?;
    if !c.stability.stable {
        return Err(Error::DesignFailed {
            stage: "stability repair",
            reason: c.summary(cfg),
        });
    }
    if let Err(e) = &c.parallel {
        notes.push(format!("parallel form unavailable: {e}"));
    }
    if let Err(e) = &c.periodic {
        notes.push(format!("periodic form unavailable: {e}"));
    }
    attempts.push(Attempt {
        k_hat,
        outcome: format!("repaired: {}", c.summary(cfg)),
    });
    log::info!("{}", notes[0]);
    Ok(finish(
        resp, cfg, c, k_hat, reflected, scale, attempts, notes,
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    resp: &DesiredResponse,
    cfg: &DesignConfig,
    c: Candidate,
    k_hat: usize,
    reflected_poles: usize,
    radial_scale: Option<f64>,
    attempts: Vec<Attempt>,
    notes: Vec<String>,
) -> ArmaDesign {
    ArmaDesign {
        response: resp.clone(),
        config: cfg.clone(),
        report: DesignReport {
            k_hat,
            reflected_poles,
            radial_scale,
            periodic_contraction: c.contraction,
            l2_error: c.l2,
            attempts,
            notes,
        },
        rational: c.rational,
        parallel: c.parallel.ok(),
        periodic: c.periodic.ok(),
        stability: c.stability,
    }
}

/// Moves roots of `1 + Σ a_k s^k` with `|root| < threshold` out to `radius`
/// along their own direction.
fn reflect_poles(a: &[f64], threshold: f64, radius: f64) -> Result<(Vec<f64>, usize)> {
    let mut den = vec![Complex64::new(1.0, 0.0)];
    den.extend(a.iter().map(|&v| Complex64::new(v, 0.0)));
    let mut roots = poly::roots(&den)?;
    poly::conjugate_close(&mut roots);
    let mut moved = 0;
    for r in roots.iter_mut() {
        if r.norm() < threshold {
            *r *= radius / r.norm();
            moved += 1;
        }
    }
    if moved == 0 {
        return Ok((a.to_vec(), 0));
    }
    let rebuilt = poly::from_roots_unit_constant(&roots);
    let mut out: Vec<f64> = rebuilt.iter().skip(1).map(|c| c.re).collect();
    out.resize(a.len(), 0.0);
    Ok((out, moved))
}

fn radial_scale(a: &[f64], sigma: f64) -> Vec<f64> {
    a.iter()
        .enumerate()
        .map(|(k, &v)| v * sigma.powi(k as i32 + 1))
        .collect()
}
