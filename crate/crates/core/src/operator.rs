//! Basis (shift) operators: the symmetric 1-local matrix `L` and its
//! translation `M = c·I − L` with `c = (λ_max − λ_min)/2`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorVariant {
    /// `D − W`
    DiscreteLaplacian,
    /// `I − D^{-1/2} W D^{-1/2}`
    NormalizedLaplacian,
    /// Any symmetric matrix supported on the graph's edges and diagonal.
    CustomSymmetric1Local,
}

impl OperatorVariant {
    pub fn name(self) -> &'static str {
        match self {
            Self::DiscreteLaplacian => "discrete_laplacian",
            Self::NormalizedLaplacian => "normalized_laplacian",
            Self::CustomSymmetric1Local => "custom_symmetric_1local",
        }
    }
}

/// Universal bounds `[λ_min, λ_max]` on the operator spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralInterval {
    pub min: f64,
    pub max: f64,
}

impl SpectralInterval {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidInterval { min, max });
        }
        Ok(Self { min, max })
    }

    /// `(λ_max − λ_min)/2`, the translation used to form `M`.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.max - self.min)
    }

    pub fn lambda_to_mu(&self, lambda: f64) -> f64 {
        self.half_width() - lambda
    }

    pub fn mu_to_lambda(&self, mu: f64) -> f64 {
        self.half_width() - mu
    }

    /// `[μ_min, μ_max]`, the image of the interval under the translation.
    pub fn mu_range(&self) -> (f64, f64) {
        (self.lambda_to_mu(self.max), self.lambda_to_mu(self.min))
    }

    /// Largest `|μ|` over the interval. Equals `half_width()` whenever
    /// `λ_min = 0`, which holds for both Laplacians.
    pub fn mu_radius(&self) -> f64 {
        let (lo, hi) = self.mu_range();
        lo.abs().max(hi.abs())
    }

    pub fn contains(&self, lambda: f64, tol: f64) -> bool {
        lambda >= self.min - tol && lambda <= self.max + tol
    }

    /// Default universal interval for a variant: `[0, 2]` for the normalized
    /// Laplacian, `[0, 2·max_degree]` for the discrete one.
    pub fn default_for(variant: OperatorVariant, graph: &Graph) -> Result<Self> {
        match variant {
            OperatorVariant::NormalizedLaplacian => Self::new(0.0, 2.0),
            OperatorVariant::DiscreteLaplacian => {
                let bound = 2.0 * graph.max_weighted_degree();
                // edgeless graphs have L = 0; any positive bound contains it
                Self::new(0.0, if bound > 0.0 { bound } else { 1.0 })
            }
            OperatorVariant::CustomSymmetric1Local => {
                Err(Error::MissingInterval("custom operators"))
            }
        }
    }
}

/// One node's view of the operator: its diagonal entry and the entries
/// toward its neighbors, sorted by neighbor id.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalRow {
    pub diagonal: f64,
    pub off_diagonal: Vec<(usize, f64)>,
}

/// Builds each node's row of `L` from adjacency lists alone.
pub fn local_laplacian_rows(graph: &Graph, variant: OperatorVariant) -> Result<Vec<LocalRow>> {
    let n = graph.node_count();
    match variant {
        OperatorVariant::DiscreteLaplacian => Ok((0..n)
            .map(|i| LocalRow {
                diagonal: graph.weighted_degree(i),
                off_diagonal: graph.neighbors(i).iter().map(|&(j, w)| (j, -w)).collect(),
            })
            .collect()),
        OperatorVariant::NormalizedLaplacian => {
            let deg: Vec<f64> = (0..n).map(|i| graph.weighted_degree(i)).collect();
            if let Some(node) = deg.iter().position(|&d| d <= 0.0) {
                return Err(Error::IsolatedNode { node });
            }
            Ok((0..n)
                .map(|i| LocalRow {
                    diagonal: 1.0,
                    off_diagonal: graph
                        .neighbors(i)
                        .iter()
                        .map(|&(j, w)| (j, -w / (deg[i] * deg[j]).sqrt()))
                        .collect(),
                })
                .collect())
        }
        OperatorVariant::CustomSymmetric1Local => Err(Error::Config(
            "custom operators carry their own matrix; use ShiftOperator::local_rows".into(),
        )),
    }
}

#[derive(Debug, Clone)]
pub struct ShiftOperator {
    variant: OperatorVariant,
    laplacian: DMatrix<f64>,
    interval: SpectralInterval,
    shifted: DMatrix<f64>,
}

/// Assembles `L` for a Laplacian variant and the translated `M`.
///
/// Custom operators go through [`ShiftOperator::custom`] since they need a
/// matrix.
pub fn build_shift_operator(
    graph: &Graph,
    variant: OperatorVariant,
    interval: Option<SpectralInterval>,
) -> Result<ShiftOperator> {
    if variant == OperatorVariant::CustomSymmetric1Local && interval.is_none() {
        return Err(Error::MissingInterval("custom operators"));
    }
    let rows = local_laplacian_rows(graph, variant)?;
    let n = graph.node_count();
    let mut l = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        l[(i, i)] = row.diagonal;
        for &(j, v) in &row.off_diagonal {
            l[(i, j)] = v;
        }
    }
    let interval = match interval {
        Some(iv) => iv,
        None => SpectralInterval::default_for(variant, graph)?,
    };
    Ok(ShiftOperator::assemble(variant, l, interval))
}

impl ShiftOperator {
    /// Wraps a user-supplied symmetric 1-local matrix.
    pub fn custom(graph: &Graph, matrix: DMatrix<f64>, interval: SpectralInterval) -> Result<Self> {
        let n = graph.node_count();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.nrows(),
            });
        }
        for i in 0..n {
            for j in i + 1..n {
                if matrix[(i, j)] != matrix[(j, i)] {
                    return Err(Error::NotSymmetric { i, j });
                }
                if matrix[(i, j)] != 0.0 && !graph.has_edge(i, j) {
                    return Err(Error::NotLocal { i, j });
                }
            }
        }
        Ok(Self::assemble(
            OperatorVariant::CustomSymmetric1Local,
            matrix,
            interval,
        ))
    }

    fn assemble(
        variant: OperatorVariant,
        laplacian: DMatrix<f64>,
        interval: SpectralInterval,
    ) -> Self {
        let n = laplacian.nrows();
        let shifted = DMatrix::identity(n, n) * interval.half_width() - &laplacian;
        Self {
            variant,
            laplacian,
            interval,
            shifted,
        }
    }

    pub fn variant(&self) -> OperatorVariant {
        self.variant
    }

    pub fn node_count(&self) -> usize {
        self.laplacian.nrows()
    }

    /// The basis matrix `L`.
    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    /// The translated matrix `M`.
    pub fn shifted(&self) -> &DMatrix<f64> {
        &self.shifted
    }

    pub fn interval(&self) -> SpectralInterval {
        self.interval
    }

    /// Per-node rows of `L` restricted to the graph's edges.
    pub fn local_rows(&self, graph: &Graph) -> Result<Vec<LocalRow>> {
        let n = self.node_count();
        if graph.node_count() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: graph.node_count(),
            });
        }
        Ok((0..n)
            .map(|i| LocalRow {
                diagonal: self.laplacian[(i, i)],
                off_diagonal: graph
                    .neighbors(i)
                    .iter()
                    .map(|&(j, _)| (j, self.laplacian[(i, j)]))
                    .collect(),
            })
            .collect())
    }

    /// Checks that every off-diagonal nonzero of `L` is a graph edge.
    pub fn is_one_local(&self, graph: &Graph) -> bool {
        let n = self.node_count();
        (0..n).all(|i| {
            (0..n).all(|j| i == j || self.laplacian[(i, j)] == 0.0 || graph.has_edge(i, j))
        })
    }
}
