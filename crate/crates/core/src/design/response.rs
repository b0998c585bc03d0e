//! Target responses `h*(λ)` and their image `g*(μ)` on the shifted axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::SpectralInterval;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseKind {
    /// 1 on `[λ_min, cutoff)`, 0 after. Default cutoff `(λ_min + λ_max)/4`.
    Step {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
    },
    /// 1 on `[low, high]`, 0 elsewhere. Defaults `λ_max/3` and `2λ_max/3`.
    Window {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        low: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        high: Option<f64>,
    },
    /// Piecewise-linear through `(λ, value)` samples, constant beyond the ends.
    CustomSampled { points: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesiredResponse {
    #[serde(flatten)]
    pub kind: ResponseKind,
    pub interval: SpectralInterval,
}

impl DesiredResponse {
    pub fn step(interval: SpectralInterval) -> Self {
        Self {
            kind: ResponseKind::Step { cutoff: None },
            interval,
        }
    }

    pub fn step_at(interval: SpectralInterval, cutoff: f64) -> Self {
        Self {
            kind: ResponseKind::Step {
                cutoff: Some(cutoff),
            },
            interval,
        }
    }

    pub fn window(interval: SpectralInterval) -> Self {
        Self {
            kind: ResponseKind::Window {
                low: None,
                high: None,
            },
            interval,
        }
    }

    pub fn sampled(interval: SpectralInterval, mut points: Vec<[f64; 2]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config(
                "custom_sampled response needs at least one point".into(),
            ));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "custom_sampled response has non-finite samples".into(),
            ));
        }
        points.sort_by(|a, b| a[0].total_cmp(&b[0]));
        Ok(Self {
            kind: ResponseKind::CustomSampled { points },
            interval,
        })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ResponseKind::Step { .. } => "step",
            ResponseKind::Window { .. } => "window",
            ResponseKind::CustomSampled { .. } => "custom_sampled",
        }
    }

    pub fn eval_lambda(&self, lambda: f64) -> f64 {
        let iv = self.interval;
        match &self.kind {
            ResponseKind::Step { cutoff } => {
                let c = cutoff.unwrap_or(0.25 * (iv.min + iv.max));
                if lambda < c {
                    1.0
                } else {
                    0.0
                }
            }
            ResponseKind::Window { low, high } => {
                let lo = low.unwrap_or(iv.max / 3.0);
                let hi = high.unwrap_or(2.0 * iv.max / 3.0);
                if lambda >= lo && lambda <= hi {
                    1.0
                } else {
                    0.0
                }
            }
            ResponseKind::CustomSampled { points } => interpolate(points, lambda),
        }
    }

    /// `g*(μ) = h*((λ_max − λ_min)/2 − μ)`.
    pub fn eval_mu(&self, mu: f64) -> f64 {
        self.eval_lambda(self.interval.mu_to_lambda(mu))
    }

    pub fn map_to_mu(&self) -> MuResponse<'_> {
        MuResponse { response: self }
    }

    /// Checks the response is finite on a uniform grid of the interval.
    pub fn validate(&self, grid_size: usize) -> Result<()> {
        let iv = self.interval;
        for i in 0..grid_size.max(2) {
            let l = iv.min + (iv.max - iv.min) * i as f64 / (grid_size.max(2) - 1) as f64;
            if !self.eval_lambda(l).is_finite() {
                return Err(Error::Config(format!(
                    "desired response not finite at λ = {l}"
                )));
            }
        }
        Ok(())
    }
}

/// `g*` over `[μ_min, μ_max]`.
#[derive(Debug, Clone, Copy)]
pub struct MuResponse<'a> {
    response: &'a DesiredResponse,
}

impl MuResponse<'_> {
    pub fn eval(&self, mu: f64) -> f64 {
        self.response.eval_mu(mu)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.response.interval.mu_range()
    }
}

pub fn map_to_mu(resp: &DesiredResponse) -> MuResponse<'_> {
    resp.map_to_mu()
}

fn interpolate(points: &[[f64; 2]], x: f64) -> f64 {
    let first = points[0];
    let last = points[points.len() - 1];
    if x <= first[0] {
        return first[1];
    }
    if x >= last[0] {
        return last[1];
    }
    let idx = points.partition_point(|p| p[0] <= x);
    let [x0, y0] = points[idx - 1];
    let [x1, y1] = points[idx];
    if x1 == x0 {
        return y1;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv() -> SpectralInterval {
        SpectralInterval::new(0.0, 2.0).unwrap()
    }

    #[test]
    fn linear_response_maps_affinely() {
        let r = DesiredResponse::sampled(iv(), vec![[0.0, 0.0], [2.0, 2.0]]).unwrap();
        let g = r.map_to_mu();
        for mu in [-1.0, -0.3, 0.0, 0.8, 1.0] {
            assert!((g.eval(mu) - (1.0 - mu)).abs() < 1e-15);
        }
        assert_eq!(g.domain(), (-1.0, 1.0));
    }

    #[test]
    fn constant_stays_constant() {
        let r = DesiredResponse::sampled(iv(), vec![[1.0, 0.7]]).unwrap();
        assert_eq!(r.eval_mu(-1.0), 0.7);
        assert_eq!(r.eval_mu(1.0), 0.7);
    }

    #[test]
    fn step_orientation_reverses() {
        let r = DesiredResponse::step_at(iv(), 0.5);
        // λ < 0.5 ⇔ μ > 0.5
        assert_eq!(r.eval_mu(0.9), 1.0);
        assert_eq!(r.eval_mu(0.4), 0.0);
        let d = DesiredResponse::step(iv());
        assert_eq!(d.eval_lambda(0.49), 1.0);
        assert_eq!(d.eval_lambda(0.5), 0.0);
    }

    #[test]
    fn window_defaults() {
        let w = DesiredResponse::window(iv());
        assert_eq!(w.eval_lambda(0.6), 0.0);
        assert_eq!(w.eval_lambda(1.0), 1.0);
        assert_eq!(w.eval_lambda(1.4), 0.0);
    }

    #[test]
    fn serde_round_trip() {
        let w = DesiredResponse::step_at(iv(), 0.3);
        let s = toml::to_string(&w).unwrap();
        assert_eq!(toml::from_str::<DesiredResponse>(&s).unwrap(), w);
    }
}
