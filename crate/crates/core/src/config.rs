//! TOML input files for the command-line front end. Relative paths inside a
//! file are resolved against the file's own directory.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::design::{
    check_stability_rational, DesignConfig, DesignDocument, DesiredResponse, ResponseKind,
};
use crate::engine::{AccountingReport, FilterSpec, InitialCondition, SignalSource};
use crate::error::{Error, Result};
use crate::experiments::Scenario;
use crate::graph::Graph;
use crate::operator::{OperatorVariant, SpectralInterval};
use crate::signal::GraphSignal;

/// Reads and parses a TOML file, returning the parsed value and the
/// directory that relative paths are resolved against.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<(T, PathBuf)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let value = toml::from_str(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((value, base))
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn read_file(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path)
        .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignFilter {
    #[default]
    Arma,
    Fir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseName {
    #[default]
    Step,
    Window,
    CustomSampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResponseSpec {
    pub kind: ResponseName,
    pub interval: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub high: Option<f64>,
    /// Inline `[λ, value]` samples for `custom_sampled`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    /// CSV with `lambda,value` columns for `custom_sampled`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_file: Option<PathBuf>,
}

impl Default for ResponseSpec {
    fn default() -> Self {
        Self {
            kind: ResponseName::Step,
            interval: [0.0, 2.0],
            cutoff: None,
            low: None,
            high: None,
            points: None,
            points_file: None,
        }
    }
}

#[derive(Debug, Deserialize)]
struct SampleRow {
    lambda: f64,
    value: f64,
}

impl ResponseSpec {
    pub fn to_response(&self, base: &Path) -> Result<DesiredResponse> {
        let interval = SpectralInterval::new(self.interval[0], self.interval[1])?;
        let kind = match self.kind {
            ResponseName::Step => ResponseKind::Step {
                cutoff: self.cutoff,
            },
            ResponseName::Window => ResponseKind::Window {
                low: self.low,
                high: self.high,
            },
            ResponseName::CustomSampled => {
                let points = match (&self.points, &self.points_file) {
                    (Some(p), None) => p.clone(),
                    (None, Some(file)) => {
                        let mut rdr = csv::ReaderBuilder::new()
                            .trim(csv::Trim::All)
                            .from_reader(read_file(&resolve(base, file))?);
                        let mut pts = Vec::new();
                        for row in rdr.deserialize() {
                            let row: SampleRow = row?;
                            pts.push([row.lambda, row.value]);
                        }
                        pts
                    }
                    _ => {
                        return Err(Error::Config(
                            "custom_sampled needs exactly one of points or points_file".into(),
                        ))
                    }
                };
                return DesiredResponse::sampled(interval, points);
            }
        };
        Ok(DesiredResponse { kind, interval })
    }
}

/// Input to `design`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignSpec {
    pub filter: DesignFilter,
    pub response: ResponseSpec,
    pub design: DesignConfig,
}

/// Where the simulated filter comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FilterSource {
    /// A document written by `design`.
    Design { path: PathBuf },
    /// A single first-order recursion `y ← ψ M y + φ x`.
    Arma1 {
        psi: f64,
        phi: f64,
        interval: [f64; 2],
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Arma1,
    Parallel,
    Periodic,
    Fir,
}

impl FilterSource {
    /// Builds the engine filter, checking that `family` fits the source.
    /// ARMA documents default to the parallel realization and must pass the
    /// rational stability check unless `force` is set.
    pub fn to_filter(
        &self,
        base: &Path,
        family: Option<Family>,
        force: bool,
    ) -> Result<FilterSpec> {
        match self {
            Self::Arma1 { psi, phi, interval } => {
                if !matches!(family, None | Some(Family::Arma1)) {
                    return Err(Error::Config(
                        "an arma1 filter source only runs as family arma1".into(),
                    ));
                }
                Ok(FilterSpec::arma1(
                    *psi,
                    *phi,
                    SpectralInterval::new(interval[0], interval[1])?,
                ))
            }
            Self::Design { path } => match DesignDocument::read(resolve(base, path))? {
                DesignDocument::Fir(doc) => match family {
                    None | Some(Family::Fir) => Ok(FilterSpec::Fir(doc.fir)),
                    Some(f) => Err(Error::Config(format!("an FIR design cannot run as {f:?}"))),
                },
                DesignDocument::Arma(d) => {
                    let report = check_stability_rational(&d.rational, d.config.eps_stab);
                    if !report.stable && !force {
                        return Err(Error::Unstable(format!(
                            "design has a pole inside the disk of radius {} (margin {:e})",
                            report.radius,
                            report.min_margin().unwrap_or(f64::NAN)
                        )));
                    }
                    match family {
                        None | Some(Family::Parallel) => {
                            d.parallel.map(FilterSpec::Parallel).ok_or_else(|| {
                                Error::Config("design has no parallel realization".into())
                            })
                        }
                        Some(Family::Periodic) => {
                            d.periodic.map(FilterSpec::Periodic).ok_or_else(|| {
                                Error::Config("design has no periodic realization".into())
                            })
                        }
                        Some(f) => {
                            Err(Error::Config(format!("an ARMA design cannot run as {f:?}")))
                        }
                    }
                }
            },
        }
    }
}

/// Input signal for `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSpec {
    /// `node,value` CSV, held constant.
    File {
        path: PathBuf,
    },
    /// `t,node,value` CSV, piecewise constant in time.
    Table {
        path: PathBuf,
    },
    Values {
        values: Vec<f64>,
    },
    Constant {
        value: f64,
    },
    Degree,
    Switch {
        at: usize,
        before: Vec<f64>,
        after: Vec<f64>,
    },
    Sinusoid {
        omega: f64,
        base: Vec<f64>,
    },
}

impl SignalSpec {
    pub fn to_source(&self, base: &Path, n: usize) -> Result<SignalSource> {
        Ok(match self {
            Self::File { path } => SignalSource::Static(
                GraphSignal::read_csv(read_file(&resolve(base, path))?)?.values,
            ),
            Self::Table { path } => {
                SignalSource::read_table_csv(read_file(&resolve(base, path))?, n)?
            }
            Self::Values { values } => SignalSource::Static(values.clone()),
            Self::Constant { value } => SignalSource::Constant(*value),
            Self::Degree => SignalSource::Degree,
            Self::Switch { at, before, after } => SignalSource::Switch {
                at: *at,
                before: before.clone(),
                after: after.clone(),
            },
            Self::Sinusoid { omega, base } => SignalSource::Sinusoid {
                omega: *omega,
                base: base.clone(),
            },
        })
    }
}

/// Input to `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub filter: FilterSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    /// Edge-list file.
    pub graph: PathBuf,
    #[serde(default = "default_operator")]
    pub operator: OperatorVariant,
    pub signal: SignalSpec,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default = "default_initial")]
    pub initial_condition: InitialCondition,
}

fn default_operator() -> OperatorVariant {
    OperatorVariant::NormalizedLaplacian
}

fn default_rounds() -> usize {
    100
}

fn default_initial() -> InitialCondition {
    InitialCondition::Zero
}

impl SimulateSpec {
    pub fn read_graph(&self, base: &Path) -> Result<Graph> {
        Graph::read(resolve(base, &self.graph))
    }
}

/// Single measurement for `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub graph: PathBuf,
    #[serde(default = "default_operator")]
    pub operator: OperatorVariant,
    /// Index into the ascending eigenvalue list.
    pub eigenvector: usize,
    pub omega: f64,
}

impl MeasureSpec {
    pub fn read_graph(&self, base: &Path) -> Result<Graph> {
        Graph::read(resolve(base, &self.graph))
    }
}

/// Input to `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeSpec {
    pub filter: FilterSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    /// Temporal frequencies sampled uniformly on `[0, π]`.
    #[serde(default = "default_points")]
    pub omega_points: usize,
    /// Graph frequencies sampled uniformly on the `μ` range.
    #[serde(default = "default_points")]
    pub mu_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
}

fn default_points() -> usize {
    64
}

/// Input to `spectrum`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub graph: PathBuf,
    #[serde(default = "default_operator")]
    pub operator: OperatorVariant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
}

impl SpectrumSpec {
    pub fn read_graph(&self, base: &Path) -> Result<Graph> {
        Graph::read(resolve(base, &self.graph))
    }

    pub fn interval(&self, graph: &Graph) -> Result<SpectralInterval> {
        match self.interval {
            Some([lo, hi]) => SpectralInterval::new(lo, hi),
            None => SpectralInterval::default_for(self.operator, graph),
        }
    }
}

/// Input to `experiment`.
pub type ExperimentSpec = Scenario;

/// Summary written next to a simulation trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: SimulateSpec,
    pub family: String,
    pub node_count: usize,
    /// Per-round contraction on the graph's actual spectrum.
    pub contraction: f64,
    /// Last valid output time.
    pub final_time: usize,
    pub final_output: Vec<f64>,
    /// `‖y − y*‖/‖y*‖` against the exact spectral output for the last input.
    pub final_error: f64,
    pub accounting: AccountingReport,
}

impl RunSummary {
    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}
