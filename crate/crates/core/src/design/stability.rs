use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly;
use super::rational::RationalDesign;

pub const DEFAULT_EPS_STAB: f64 = 1e-6;

/// Denominator roots against the disk `|μ| ≤ R` they must avoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub radius: f64,
    pub epsilon: f64,
    pub roots: Vec<Complex64>,
    /// `|root| − radius`, per root.
    pub margins: Vec<f64>,
    pub stable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl StabilityReport {
    pub fn min_margin(&self) -> Option<f64> {
        self.margins.iter().copied().reduce(f64::min)
    }
}

/// Passes iff every root lies at least `eps` outside the stability disk.
/// A design without poles passes vacuously.
pub fn check_stability_rational(design: &RationalDesign, eps: f64) -> StabilityReport {
    let radius = design.stability_radius();
    match design.poles() {
        Ok(roots) => {
            let margins: Vec<f64> = roots.iter().map(|r| r.norm() - radius).collect();
            let stable = margins.iter().all(|&m| m > eps);
            StabilityReport {
                radius,
                epsilon: eps,
                roots,
                margins,
                stable,
                note: None,
            }
        }
        Err(e) => StabilityReport {
            radius,
            epsilon: eps,
            roots: Vec::new(),
            margins: Vec::new(),
            stable: false,
            note: Some(e.to_string()),
        },
    }
}

/// `sup |1 − p_a(μ)|` over a uniform grid of `range` (endpoints included).
/// This is the per-period contraction of the periodic realization.
pub fn periodic_contraction(a: &[Complex64], range: (f64, f64), grid_size: usize) -> f64 {
    let mut den = vec![Complex64::new(1.0, 0.0)];
    den.extend_from_slice(a);
    let n = grid_size.max(2);
    (0..n)
        .map(|i| {
            let mu = range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64;
            (Complex64::new(1.0, 0.0) - poly::eval_complex(&den, Complex64::new(mu, 0.0))).norm()
        })
        .fold(0.0, f64::max)
}
