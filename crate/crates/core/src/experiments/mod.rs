//! Scripted experiment settings: response fits, convergence traces and
//! filtering under node mobility.

mod waypoint;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use waypoint::WaypointModel;

use crate::design::{
    design_arma, design_fir, evaluate_response, l2_error, ArmaDesign, DesignConfig,
    DesiredResponse, Grid,
};
use crate::engine::{Engine, FilterSpec, SimulationConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::operator::{build_shift_operator, OperatorVariant, SpectralInterval};
use crate::signal::{relative_error, GraphSignal};
use crate::spectrum::{apply_filter_exact, eigendecompose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinResponse {
    Step,
    Window,
}

impl BuiltinResponse {
    pub fn on(self, interval: SpectralInterval) -> DesiredResponse {
        match self {
            Self::Step => DesiredResponse::step(interval),
            Self::Window => DesiredResponse::window(interval),
        }
    }
}

fn rep_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn design_err(stage: &'static str, e: impl std::fmt::Display) -> Error {
    Error::DesignFailed {
        stage,
        reason: e.to_string(),
    }
}

// ---------------------------------------------------------------- response fit

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResponseFitConfig {
    pub kind: BuiltinResponse,
    pub orders: Vec<usize>,
    pub interval: [f64; 2],
    pub grid_size: usize,
}

impl Default for ResponseFitConfig {
    fn default() -> Self {
        Self {
            kind: BuiltinResponse::Step,
            orders: vec![5, 10, 20],
            interval: [0.0, 2.0],
            grid_size: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseFitResult {
    pub kind: String,
    pub orders: Vec<usize>,
    pub mu: Vec<f64>,
    pub g_star: Vec<f64>,
    pub arma: Vec<Vec<f64>>,
    pub fir: Vec<Vec<f64>>,
    pub arma_l2: Vec<f64>,
    pub fir_l2: Vec<f64>,
    pub designs: Vec<ArmaDesign>,
}

pub fn experiment_response_fit(cfg: &ResponseFitConfig) -> Result<ResponseFitResult> {
    let iv = SpectralInterval::new(cfg.interval[0], cfg.interval[1])?;
    response_fit(&cfg.kind.on(iv), &cfg.orders, cfg.grid_size)
}

/// Designs ARMA(K) and FIR(K) for every order and samples both responses on
/// a uniform `μ` grid.
pub fn response_fit(
    resp: &DesiredResponse,
    orders: &[usize],
    grid_size: usize,
) -> Result<ResponseFitResult> {
    let (lo, hi) = resp.interval.mu_range();
    let grid = Grid::uniform(lo, hi, grid_size)?;
    let g_star = grid.points.iter().map(|&mu| resp.eval_mu(mu)).collect();
    let mut out = ResponseFitResult {
        kind: resp.name().to_string(),
        orders: orders.to_vec(),
        mu: grid.points.clone(),
        g_star,
        arma: Vec::new(),
        fir: Vec::new(),
        arma_l2: Vec::new(),
        fir_l2: Vec::new(),
        designs: Vec::new(),
    };
    for &k in orders {
        let cfg = DesignConfig {
            grid_size,
            ..DesignConfig::with_order(k)
        };
        let arma = design_arma(resp, &cfg)
            .map_err(|e| design_err("response fit", format!("K = {k}: {e}")))?;
        let fir = design_fir(resp, k, grid_size)
            .map_err(|e| design_err("response fit", format!("K = {k}: {e}")))?;
        out.arma.push(
            evaluate_response(&arma.rational, &grid.points)
                .iter()
                .map(|c| c.re)
                .collect(),
        );
        out.fir.push(
            evaluate_response(&fir, &grid.points)
                .iter()
                .map(|c| c.re)
                .collect(),
        );
        out.arma_l2.push(l2_error(&arma.rational, resp, grid_size)?);
        out.fir_l2.push(l2_error(&fir, resp, grid_size)?);
        out.designs.push(arma);
    }
    Ok(out)
}

impl ResponseFitResult {
    /// `mu,g_star,arma_K,fir_K,…`
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["mu".to_string(), "g_star".to_string()];
        for k in &self.orders {
            header.push(format!("arma_{k}"));
            header.push(format!("fir_{k}"));
        }
        wtr.write_record(&header)?;
        for i in 0..self.mu.len() {
            let mut row = vec![format!("{:?}", self.mu[i]), format!("{:?}", self.g_star[i])];
            for j in 0..self.orders.len() {
                row.push(format!("{:?}", self.arma[j][i]));
                row.push(format!("{:?}", self.fir[j][i]));
            }
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

// ----------------------------------------------------------------- convergence

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub node_count: usize,
    pub order: usize,
    pub kind: BuiltinResponse,
    pub rounds: usize,
    /// Multiple of the connectivity radius used for the random geometric graph.
    pub radius_scale: f64,
    pub seed: u64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            node_count: 100,
            order: 5,
            kind: BuiltinResponse::Step,
            rounds: 100,
            radius_scale: 1.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub filter: String,
    /// `(t, ‖y_t − y*‖/‖y*‖)` at valid output times.
    pub points: Vec<(usize, f64)>,
    /// Per-round contraction on the experiment graph.
    pub contraction: f64,
}

impl Series {
    pub fn final_error(&self) -> Option<f64> {
        self.points.last().map(|p| p.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceResult {
    pub series: Vec<Series>,
    pub graph: Graph,
    pub design: ArmaDesign,
}

impl ConvergenceResult {
    pub fn series(&self, filter: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.filter == filter)
    }

    /// `t,filter,error`
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["t", "filter", "error"])?;
        for s in &self.series {
            for &(t, e) in &s.points {
                wtr.write_record([t.to_string(), s.filter.clone(), format!("{e:?}")])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Per-round filtering error of parallel ARMA, periodic ARMA and restarted
/// FIR on a seeded random geometric graph with the normalized Laplacian.
/// Each filter is measured against its own exact output.
pub fn experiment_convergence(cfg: &ConvergenceConfig) -> Result<ConvergenceResult> {
    let mut rng = rep_rng(cfg.seed, 0);
    let radius = cfg.radius_scale * Graph::connectivity_radius(cfg.node_count);
    let graph = Graph::connected_random_geometric(cfg.node_count, radius, 1000, &mut rng)?;
    if !graph.isolated_nodes().is_empty() {
        return Err(Error::InvalidGraph(
            "random geometric graph has isolated nodes; increase radius_scale".into(),
        ));
    }
    let x: Vec<f64> = (0..cfg.node_count)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let iv = SpectralInterval::new(0.0, 2.0)?;
    let resp = cfg.kind.on(iv);
    let design = design_arma(&resp, &DesignConfig::with_order(cfg.order))?;
    let fir = design_fir(&resp, cfg.order, 1000)?;

    let op = build_shift_operator(&graph, OperatorVariant::NormalizedLaplacian, Some(iv))?;
    let spectrum = eigendecompose(&op)?;
    let signal = GraphSignal::new(x.clone());

    let mut filters = Vec::new();
    if let Some(p) = &design.parallel {
        filters.push(FilterSpec::Parallel(p.clone()));
    }
    if let Some(p) = &design.periodic {
        filters.push(FilterSpec::Periodic(p.clone()));
    }
    filters.push(FilterSpec::Fir(fir));

    let mut series = Vec::new();
    for filter in filters {
        let oracle = apply_filter_exact(&signal, &spectrum, |mu| filter.response_at(mu).re)?;
        let contraction = filter.contraction_per_round_on(&spectrum.eigenvalues_mu);
        let sim = SimulationConfig::new(
            filter.clone(),
            OperatorVariant::NormalizedLaplacian,
            cfg.rounds,
        );
        let mut engine = Engine::new(&sim, &graph, &x)?;
        engine.run(cfg.rounds)?;
        let trace = engine.into_trace();
        let points = trace
            .outputs
            .iter()
            .enumerate()
            .filter(|(t, _)| trace.valid[*t])
            .map(|(t, y)| (t, relative_error(y, &oracle.values)))
            .collect();
        series.push(Series {
            filter: filter.family().to_string(),
            points,
            contraction,
        });
    }
    Ok(ConvergenceResult {
        series,
        graph,
        design,
    })
}

// -------------------------------------------------------------------- mobility

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilityConfig {
    pub node_count: usize,
    pub box_size: f64,
    pub range: f64,
    /// Meters per iteration.
    pub speeds: Vec<f64>,
    /// Iterations per run.
    pub duration: usize,
    /// Errors are taken every this many iterations and averaged.
    pub eval_every: usize,
    pub repetitions: usize,
    pub order: usize,
    pub kind: BuiltinResponse,
    pub pause: usize,
    /// Upper spectral bound; `2(N − 1)` when unset.
    pub lambda_max: Option<f64>,
    pub seed: u64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        Self {
            node_count: 100,
            box_size: 1000.0,
            range: 180.0,
            speeds: vec![0.0, 1.0, 5.0, 10.0, 20.0],
            duration: 600,
            eval_every: 100,
            repetitions: 10,
            order: 5,
            kind: BuiltinResponse::Step,
            pause: 0,
            lambda_max: None,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilityRow {
    pub speed: f64,
    pub filter: String,
    pub mean_error: f64,
    /// Sample standard deviation over repetitions; absent for one run.
    pub std_error: Option<f64>,
    /// Per-repetition error (mean over evaluation times).
    pub runs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityResult {
    pub rows: Vec<MobilityRow>,
    /// Runs whose last graph was disconnected, per speed.
    pub disconnected_final: Vec<(f64, usize)>,
    pub design: ArmaDesign,
    pub note: String,
}

impl MobilityResult {
    pub fn row(&self, speed: f64, filter: &str) -> Option<&MobilityRow> {
        self.rows
            .iter()
            .find(|r| r.speed == speed && r.filter == filter)
    }

    /// `speed,filter,mean_error,std_error`
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["speed", "filter", "mean_error", "std_error"])?;
        for r in &self.rows {
            wtr.write_record([
                format!("{:?}", r.speed),
                r.filter.clone(),
                format!("{:?}", r.mean_error),
                r.std_error.map(|s| format!("{s:?}")).unwrap_or_default(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

const MOBILITY_NOTE: &str =
    "error is the signal-domain proxy ‖y_t − F*x_t‖/‖F*x_t‖ with F* the desired \
response applied exactly on the graph and input of the last round, averaged over evaluation times";

/// Random waypoint mobility on a disk graph driven by the degree signal.
/// For every speed and repetition the graph is rebuilt each iteration and
/// parallel ARMA, periodic ARMA and restarted FIR run side by side.
pub fn experiment_mobility(cfg: &MobilityConfig) -> Result<MobilityResult> {
    if cfg.repetitions == 0 || cfg.eval_every == 0 || cfg.duration < cfg.eval_every {
        return Err(Error::Config(
            "mobility needs repetitions ≥ 1 and duration ≥ eval_every ≥ 1".into(),
        ));
    }
    let n = cfg.node_count;
    let lambda_max = cfg.lambda_max.unwrap_or(2.0 * (n as f64 - 1.0));
    let iv = SpectralInterval::new(0.0, lambda_max)?;
    let resp = cfg.kind.on(iv);
    let design = design_arma(&resp, &DesignConfig::with_order(cfg.order))?;
    let fir = design_fir(&resp, cfg.order, 1000)?;
    let mut filters = Vec::new();
    if let Some(p) = &design.parallel {
        filters.push(FilterSpec::Parallel(p.clone()));
    }
    if let Some(p) = &design.periodic {
        filters.push(FilterSpec::Periodic(p.clone()));
    }
    filters.push(FilterSpec::Fir(fir));

    let mut rows = Vec::new();
    let mut disconnected_final = Vec::new();
    for &speed in &cfg.speeds {
        let mut per_filter: Vec<Vec<f64>> = vec![Vec::new(); filters.len()];
        let mut disconnected = 0;
        for rep in 0..cfg.repetitions {
            let mut rng = rep_rng(cfg.seed, rep as u64 + 1);
            let mut model = WaypointModel::new(n, cfg.box_size, speed, cfg.pause, &mut rng);
            let mut graph = model.disk_graph(cfg.range)?;
            let x0 = graph.degrees();
            let mut engines = filters
                .iter()
                .map(|f| {
                    Engine::new(
                        &SimulationConfig::new(f.clone(), OperatorVariant::DiscreteLaplacian, 0),
                        &graph,
                        &x0,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let mut sums = vec![0.0; filters.len()];
            let mut evals = 0;
            for t in 1..=cfg.duration {
                let x = graph.degrees();
                for e in &mut engines {
                    e.step_time_varying(Some(&x), Some(&graph))?;
                }
                if t % cfg.eval_every == 0 {
                    let op =
                        build_shift_operator(&graph, OperatorVariant::DiscreteLaplacian, Some(iv))?;
                    let spectrum = eigendecompose(&op)?;
                    let target =
                        apply_filter_exact(&GraphSignal::new(x.clone()), &spectrum, |mu| {
                            resp.eval_mu(mu)
                        })?;
                    for (s, e) in sums.iter_mut().zip(&engines) {
                        *s += relative_error(&e.output(), &target.values);
                    }
                    evals += 1;
                    if t == cfg.duration && !graph.is_connected() {
                        disconnected += 1;
                    }
                }
                if t < cfg.duration {
                    model.advance(&mut rng);
                    graph = model.disk_graph(cfg.range)?;
                }
            }
            for (acc, s) in per_filter.iter_mut().zip(&sums) {
                acc.push(s / evals as f64);
            }
        }
        for (f, runs) in filters.iter().zip(per_filter) {
            let mean = runs.iter().sum::<f64>() / runs.len() as f64;
            let std = (runs.len() >= 2).then(|| {
                (runs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (runs.len() - 1) as f64)
                    .sqrt()
            });
            rows.push(MobilityRow {
                speed,
                filter: f.family().to_string(),
                mean_error: mean,
                std_error: std,
                runs,
            });
        }
        disconnected_final.push((speed, disconnected));
    }
    Ok(MobilityResult {
        rows,
        disconnected_final,
        design,
        note: MOBILITY_NOTE.to_string(),
    })
}

/// Any of the three scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Scenario {
    Fig1(ResponseFitConfig),
    Fig2(ConvergenceConfig),
    Fig3(MobilityConfig),
}

pub enum ExperimentResult {
    ResponseFit(ResponseFitResult),
    Convergence(ConvergenceResult),
    Mobility(MobilityResult),
}

impl ExperimentResult {
    pub fn scenario(&self) -> &'static str {
        match self {
            Self::ResponseFit(_) => "fig1",
            Self::Convergence(_) => "fig2",
            Self::Mobility(_) => "fig3",
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        match self {
            Self::ResponseFit(r) => r.write_csv(writer),
            Self::Convergence(r) => r.write_csv(writer),
            Self::Mobility(r) => r.write_csv(writer),
        }
    }
}

impl Scenario {
    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Self::Fig1(_) => {}
            Self::Fig2(c) => c.seed = seed,
            Self::Fig3(c) => c.seed = seed,
        }
    }

    pub fn run(&self) -> Result<ExperimentResult> {
        Ok(match self {
            Self::Fig1(c) => ExperimentResult::ResponseFit(experiment_response_fit(c)?),
            Self::Fig2(c) => ExperimentResult::Convergence(experiment_convergence(c)?),
            Self::Fig3(c) => ExperimentResult::Mobility(experiment_mobility(c)?),
        })
    }
}
