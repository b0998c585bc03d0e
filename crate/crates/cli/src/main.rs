use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use log::info;
use serde::Serialize;

use arma_core::config::{
    self, AnalyzeSpec, DesignFilter, DesignSpec, RunSummary, SimulateSpec, SpectrumSpec,
};
use arma_core::design::{design_arma, design_fir, l2_error, DesignDocument, FirDocument};
use arma_core::engine::run_with_source;
use arma_core::experiments::{ExperimentResult, Scenario};
use arma_core::spectrum::apply_filter_exact;
use arma_core::temporal::{
    expected_gain, measure_temporal_gain, GainOptions, JointResponse, TemporalGain,
};
use arma_core::{
    build_shift_operator, eigendecompose, Complex64, Error, GraphSignal, InitialCondition,
    SimulationConfig,
};

/// Universal ARMA graph filters: design, distributed simulation, analysis
/// and experiment runs.
#[derive(Debug, Parser)]
#[command(name = "arma", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML input for the subcommand.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if absent.
    #[arg(long, short, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed of seeded inputs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overwrite existing results and run filters that fail the stability check.
    #[arg(long, global = true)]
    force: bool,
    /// Repeat for more log output.
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Design an ARMA or FIR filter and write the design document.
    Design,
    /// Run a filter on a graph and write the trace and a run summary.
    Simulate,
    /// Evaluate the joint graph/time response, optionally measuring one gain.
    Analyze,
    /// Run a scripted experiment and write its CSV.
    Experiment,
    /// Eigendecompose a graph operator.
    Spectrum,
}

const EXIT_INTERNAL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_UNSTABLE: u8 = 3;

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unstable(_) => EXIT_UNSTABLE,
            Error::Io(_) | Error::NoConvergence | Error::TomlSer(_) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            error: e.into(),
        }
    }
}

fn internal(e: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        error: e.into(),
    }
}

fn input(e: anyhow::Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        error: e,
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Outputs {
    dir: PathBuf,
    force: bool,
}

impl Outputs {
    /// Creates the directory and returns the paths for `names`, refusing to
    /// clobber existing files without `--force`.
    fn claim<const N: usize>(
        &self,
        names: [&str; N],
    ) -> std::result::Result<[PathBuf; N], Failure> {
        let paths = names.map(|n| self.dir.join(n));
        if !self.force {
            if let Some(p) = paths.iter().find(|p| p.exists()) {
                return Err(input(anyhow!(
                    "{} exists; pass --force to overwrite",
                    p.display()
                )));
            }
        }
        std::fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating {}", self.dir.display()))
            .map_err(internal)?;
        Ok(paths)
    }
}

fn write_text(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(internal)
}

fn write_toml<T: Serialize>(path: &Path, value: &T) -> Outcome {
    write_text(path, &toml::to_string(value).map_err(internal)?)
}

fn create(path: &Path) -> std::result::Result<std::fs::File, Failure> {
    std::fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(internal)
}

fn load<T: serde::de::DeserializeOwned>(cli: &Cli) -> std::result::Result<(T, PathBuf), Failure> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| input(anyhow!("--config is required")))?;
    Ok(config::load(path)?)
}

fn cmd_design(cli: &Cli, out: &Outputs) -> Outcome {
    let (spec, base): (DesignSpec, _) = load(cli)?;
    let resp = spec.response.to_response(&base)?;
    let doc = match spec.filter {
        DesignFilter::Arma => {
            let d = design_arma(&resp, &spec.design)?;
            println!("stable: {}", d.stability.stable);
            println!("k_hat: {}", d.report.k_hat);
            println!(
                "realizations: parallel {}, periodic {}",
                d.parallel.is_some(),
                d.periodic.is_some()
            );
            for note in &d.report.notes {
                println!("note: {note}");
            }
            println!("l2_error: {:e}", d.report.l2_error);
            DesignDocument::Arma(Box::new(d))
        }
        DesignFilter::Fir => {
            let fir = design_fir(&resp, spec.design.order, spec.design.grid_size)?;
            let err = l2_error(&fir, &resp, spec.design.grid_size)?;
            println!("stable: true");
            println!("l2_error: {err:e}");
            DesignDocument::Fir(FirDocument {
                response: resp,
                grid_size: spec.design.grid_size,
                fir,
                l2_error: err,
            })
        }
    };
    let [path] = out.claim(["design.toml"])?;
    write_text(&path, &doc.to_toml_string()?)?;
    info!("wrote {}", path.display());
    Ok(())
}

fn cmd_simulate(cli: &Cli, out: &Outputs) -> Outcome {
    let (mut spec, base): (SimulateSpec, _) = load(cli)?;
    if let (Some(seed), InitialCondition::Random(s)) = (cli.seed, &mut spec.initial_condition) {
        *s = seed;
    }
    let graph = spec.read_graph(&base)?;
    let filter = spec.filter.to_filter(&base, spec.family, cli.force)?;
    let source = spec.signal.to_source(&base, graph.node_count())?;
    let last_input = source.signal_at(spec.rounds.saturating_sub(1), &graph)?;
    let [trace_path, summary_path] = out.claim(["trace.csv", "summary.toml"])?;

    let sim = SimulationConfig {
        filter: filter.clone(),
        operator: spec.operator,
        rounds: spec.rounds,
        initial_condition: spec.initial_condition.clone(),
        force: cli.force,
    };
    let trace = run_with_source(&sim, &graph, &source)?;

    let op = build_shift_operator(&graph, spec.operator, Some(filter.interval()))?;
    let spectrum = eigendecompose(&op)?;
    let oracle = apply_filter_exact(&GraphSignal::new(last_input), &spectrum, |mu| {
        filter.response_at(mu).re
    })?;
    let (final_time, final_output) = trace
        .last_valid()
        .map(|(t, y)| (t, y.to_vec()))
        .ok_or_else(|| internal(anyhow!("trace has no valid output")))?;
    let summary = RunSummary {
        config: spec,
        family: filter.family().to_string(),
        node_count: graph.node_count(),
        contraction: filter.contraction_per_round_on(&spectrum.eigenvalues_mu),
        final_time,
        final_error: arma_core::signal::relative_error(&final_output, &oracle.values),
        final_output,
        accounting: trace.accounting_report(),
    };
    trace.write_csv(create(&trace_path)?)?;
    write_text(&summary_path, &summary.to_toml_string()?)?;
    println!("family: {}", summary.family);
    println!("contraction: {}", summary.contraction);
    println!("final_time: {}", summary.final_time);
    println!("final_output: {:?}", summary.final_output);
    println!("final_error: {:e}", summary.final_error);
    println!(
        "scalars: {} total over {} rounds",
        summary.accounting.total_scalars, summary.accounting.rounds
    );
    Ok(())
}

#[derive(Serialize)]
struct GainReport {
    eigenvector: usize,
    mu: f64,
    omega: f64,
    measured: TemporalGain,
    expected_amplitude: f64,
    expected_phase: f64,
}

fn cmd_analyze(cli: &Cli, out: &Outputs) -> Outcome {
    let (spec, base): (AnalyzeSpec, _) = load(cli)?;
    let filter = spec.filter.to_filter(&base, spec.family, cli.force)?;
    let joint = JointResponse::from_filter(&filter)?;
    if spec.omega_points < 2 || spec.mu_points < 2 {
        return Err(input(anyhow!(
            "omega_points and mu_points must be at least 2"
        )));
    }
    let [joint_path] = out.claim(["joint_response.csv"])?;
    let gain_path = match spec.measure {
        Some(_) => Some(out.claim(["gain.toml"])?[0].clone()),
        None => None,
    };
    let omegas: Vec<f64> = (0..spec.omega_points)
        .map(|k| std::f64::consts::PI * k as f64 / (spec.omega_points - 1) as f64)
        .collect();
    let (lo, hi) = filter.interval().mu_range();
    let mus: Vec<f64> = (0..spec.mu_points)
        .map(|k| lo + (hi - lo) * k as f64 / (spec.mu_points - 1) as f64)
        .collect();
    joint.write_grid_csv(&omegas, &mus, create(&joint_path)?)?;
    println!("family: {}", joint.family());

    if let (Some(m), Some(gain_path)) = (&spec.measure, gain_path) {
        let graph = m.read_graph(&base)?;
        let op = build_shift_operator(&graph, m.operator, Some(filter.interval()))?;
        let spectrum = eigendecompose(&op)?;
        let mut sim = SimulationConfig::new(filter.clone(), m.operator, 0);
        sim.force = cli.force;
        let measured = measure_temporal_gain(
            &sim,
            &graph,
            &spectrum,
            m.eigenvector,
            m.omega,
            &GainOptions::default(),
        )?;
        let mu = *spectrum
            .eigenvalues_mu
            .get(m.eigenvector)
            .ok_or_else(|| input(anyhow!("eigenvector index out of range")))?;
        let h: Complex64 = expected_gain(&joint, m.omega, mu)?;
        let report = GainReport {
            eigenvector: m.eigenvector,
            mu,
            omega: m.omega,
            measured,
            expected_amplitude: h.norm(),
            expected_phase: h.arg(),
        };
        println!(
            "measured: amplitude {:.6}, phase {:.6}",
            measured.amplitude, measured.phase
        );
        println!("expected: amplitude {:.6}, phase {:.6}", h.norm(), h.arg());
        write_toml(&gain_path, &report)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ExperimentSummary<'a> {
    scenario: &'a Scenario,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    disconnected_final: Vec<[f64; 2]>,
}

fn cmd_experiment(cli: &Cli, out: &Outputs) -> Outcome {
    let (mut scenario, _): (Scenario, _) = load(cli)?;
    if let Some(seed) = cli.seed {
        scenario.set_seed(seed);
    }
    let name = match scenario {
        Scenario::Fig1(_) => "fig1",
        Scenario::Fig2(_) => "fig2",
        Scenario::Fig3(_) => "fig3",
    };
    let [csv_path, summary_path] =
        out.claim([&format!("{name}.csv"), &format!("{name}_summary.toml")])?;
    let result = scenario.run()?;
    let mut summary = ExperimentSummary {
        scenario: &scenario,
        note: None,
        disconnected_final: Vec::new(),
    };
    match &result {
        ExperimentResult::ResponseFit(r) => {
            for (i, k) in r.orders.iter().enumerate() {
                println!(
                    "K = {k}: arma l2 {:e}, fir l2 {:e}",
                    r.arma_l2[i], r.fir_l2[i]
                );
            }
        }
        ExperimentResult::Convergence(r) => {
            for s in &r.series {
                println!(
                    "{}: contraction {:.4}, final error {:e}",
                    s.filter,
                    s.contraction,
                    s.final_error().unwrap_or(f64::NAN)
                );
            }
        }
        ExperimentResult::Mobility(r) => {
            for row in &r.rows {
                println!(
                    "speed {}: {} mean {:.4} std {:.4}",
                    row.speed,
                    row.filter,
                    row.mean_error,
                    row.std_error.unwrap_or(f64::NAN)
                );
            }
            summary.note = Some(&r.note);
            summary.disconnected_final = r
                .disconnected_final
                .iter()
                .map(|&(s, c)| [s, c as f64])
                .collect();
        }
    }
    result.write_csv(create(&csv_path)?)?;
    write_toml(&summary_path, &summary)?;
    info!("wrote {}", csv_path.display());
    Ok(())
}

fn cmd_spectrum(cli: &Cli, out: &Outputs) -> Outcome {
    let (spec, base): (SpectrumSpec, _) = load(cli)?;
    let graph = spec.read_graph(&base)?;
    let interval = spec.interval(&graph)?;
    let op = build_shift_operator(&graph, spec.operator, Some(interval))?;
    let spectrum = eigendecompose(&op)?;
    let [path] = out.claim(["spectrum.csv"])?;
    spectrum.write_csv(create(&path)?)?;
    let l = &spectrum.eigenvalues_lambda;
    println!("nodes: {}", l.len());
    println!("lambda: [{:.6}, {:.6}]", l[0], l[l.len() - 1]);
    println!("interval: [{}, {}]", interval.min, interval.max);
    if let Some(v) = spectrum.interval_violation {
        println!("warning: eigenvalue {v} lies outside the interval");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    let out = Outputs {
        dir: cli.out.clone(),
        force: cli.force,
    };
    let outcome = match cli.command {
        Command::Design => cmd_design(&cli, &out),
        Command::Simulate => cmd_simulate(&cli, &out),
        Command::Analyze => cmd_analyze(&cli, &out),
        Command::Experiment => cmd_experiment(&cli, &out),
        Command::Spectrum => cmd_spectrum(&cli, &out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
