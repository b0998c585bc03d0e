//! Round-synchronous, per-node execution of graph filter recursions.
//!
//! Every round each node sends its branch states to its current neighbors,
//! then updates from its own row of `M` and the values it received. Nodes
//! never see the global matrix. Graph and signal changes take effect at
//! round boundaries.

mod node;
mod source;
mod trace;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use node::NodeState;
pub use source::{run_with_source, SignalSource};
pub use trace::{accounting_report, AccountingReport, RoundAccounting, Trace};

use crate::design::{FirDesign, FrequencyResponse, ParallelForm, PeriodicForm, DEFAULT_GRID_SIZE};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::operator::{
    local_laplacian_rows, LocalRow, OperatorVariant, ShiftOperator, SpectralInterval,
};

/// A filter the engine can execute.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterSpec {
    Fir(FirDesign),
    Arma1 {
        psi: Complex64,
        phi: Complex64,
        interval: SpectralInterval,
    },
    Parallel(ParallelForm),
    Periodic(PeriodicForm),
}

impl FilterSpec {
    pub fn arma1(psi: f64, phi: f64, interval: SpectralInterval) -> Self {
        Self::Arma1 {
            psi: Complex64::new(psi, 0.0),
            phi: Complex64::new(phi, 0.0),
            interval,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Fir(_) => "fir",
            Self::Arma1 { .. } => "arma1",
            Self::Parallel(_) => "parallel",
            Self::Periodic(_) => "periodic",
        }
    }

    pub fn interval(&self) -> SpectralInterval {
        match self {
            Self::Fir(f) => f.interval,
            Self::Arma1 { interval, .. } => *interval,
            Self::Parallel(p) => p.interval,
            Self::Periodic(p) => p.interval,
        }
    }

    /// State values each node keeps and sends per round.
    pub fn branch_count(&self) -> usize {
        match self {
            Self::Parallel(p) => p.branches.len(),
            _ => 1,
        }
    }

    /// Rounds between genuine outputs (1 for ARMA1 and parallel).
    pub fn period(&self) -> usize {
        match self {
            Self::Fir(f) => f.order.max(1),
            Self::Periodic(p) => p.period,
            _ => 1,
        }
    }

    /// Steady-state (or exact, for FIR) response at `μ`.
    pub fn response_at(&self, mu: f64) -> Complex64 {
        match self {
            Self::Fir(f) => f.response_at(mu),
            Self::Arma1 { psi, phi, .. } => phi / (1.0 - psi * mu),
            Self::Parallel(p) => p.response_at(mu),
            Self::Periodic(p) => p.response_at(mu),
        }
    }

    /// Contraction over the whole universal interval: `|ψ|R` (ARMA1),
    /// `max_k |ψ_k| R` (parallel), `sup |A(μ)|` per period (periodic).
    pub fn universal_contraction(&self) -> f64 {
        match self {
            Self::Fir(_) => 0.0,
            Self::Arma1 { psi, interval, .. } => psi.norm() * interval.mu_radius(),
            Self::Parallel(p) => p.contraction(),
            Self::Periodic(p) => p.contraction(DEFAULT_GRID_SIZE),
        }
    }

    /// Contraction on a particular graph with shifted eigenvalues `mu`:
    /// `|ψ|ρ(M)`, `max_k |ψ_k|ρ(M)`, or `max_n |A(μ_n)|` per period.
    pub fn contraction_on(&self, mu: &[f64]) -> f64 {
        let rho = mu.iter().fold(0.0, |acc: f64, m| acc.max(m.abs()));
        match self {
            Self::Fir(_) => 0.0,
            Self::Arma1 { psi, .. } => psi.norm() * rho,
            Self::Parallel(p) => p
                .branches
                .iter()
                .map(|b| b.psi.norm() * rho)
                .fold(0.0, f64::max),
            Self::Periodic(p) => mu
                .iter()
                .map(|&m| p.state_gain(m).norm())
                .fold(0.0, f64::max),
        }
    }

    /// Per-round contraction; the periodic value is the `K`-th root of the
    /// per-period one.
    pub fn contraction_per_round_on(&self, mu: &[f64]) -> f64 {
        let g = self.contraction_on(mu);
        match self {
            Self::Periodic(p) => g.powf(1.0 / p.period as f64),
            _ => g,
        }
    }

    pub fn is_stable(&self) -> bool {
        self.universal_contraction() < 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum InitialCondition {
    Zero,
    Given(Vec<f64>),
    Random(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub filter: FilterSpec,
    pub operator: OperatorVariant,
    pub rounds: usize,
    pub initial_condition: InitialCondition,
    /// Run unstable filters anyway.
    pub force: bool,
}

impl SimulationConfig {
    pub fn new(filter: FilterSpec, operator: OperatorVariant, rounds: usize) -> Self {
        Self {
            filter,
            operator,
            rounds,
            initial_condition: InitialCondition::Zero,
            force: false,
        }
    }
}

pub struct Engine {
    filter: FilterSpec,
    operator: OperatorVariant,
    custom: Option<ShiftOperator>,
    half_width: f64,
    nodes: Vec<NodeState>,
    t: usize,
    /// Most recent input supplied to the engine.
    pending: Vec<f64>,
    outgoing: Vec<Complex64>,
    trace: Trace,
}

impl Engine {
    pub fn new(config: &SimulationConfig, graph: &Graph, input: &[f64]) -> Result<Self> {
        if config.operator == OperatorVariant::CustomSymmetric1Local {
            return Err(Error::Config(
                "custom operators must be passed with Engine::with_operator".into(),
            ));
        }
        let rows = local_laplacian_rows(graph, config.operator)?;
        Self::build(config, None, rows, input)
    }

    /// Engine over a custom symmetric 1-local operator. The graph is fixed
    /// for the lifetime of the engine.
    pub fn with_operator(
        config: &SimulationConfig,
        graph: &Graph,
        op: &ShiftOperator,
        input: &[f64],
    ) -> Result<Self> {
        if !op.is_one_local(graph) {
            return Err(Error::Config(
                "operator is not supported on the graph's edges".into(),
            ));
        }
        let rows = op.local_rows(graph)?;
        Self::build(config, Some(op.clone()), rows, input)
    }

    fn build(
        config: &SimulationConfig,
        custom: Option<ShiftOperator>,
        rows: Vec<LocalRow>,
        input: &[f64],
    ) -> Result<Self> {
        let filter = config.filter.clone();
        validate_filter(&filter)?;
        if !config.force && !filter.is_stable() {
            return Err(Error::Unstable(format!(
                "{} filter has contraction {:.6} ≥ 1 over the spectral interval; pass force to run it",
                filter.family(),
                filter.universal_contraction()
            )));
        }
        let n = rows.len();
        if input.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: input.len(),
            });
        }
        let half_width = filter.interval().half_width();
        let branches = filter.branch_count();
        let mut nodes: Vec<NodeState> = rows
            .iter()
            .enumerate()
            .map(|(i, row)| NodeState::new(i, row, half_width, branches))
            .collect();
        for (node, &x) in nodes.iter_mut().zip(input) {
            node.local_input = x;
        }
        let mut engine = Self {
            operator: custom.as_ref().map_or(config.operator, |op| op.variant()),
            custom,
            half_width,
            t: 0,
            pending: input.to_vec(),
            outgoing: Vec::new(),
            trace: Trace {
                family: filter.family().to_string(),
                stored_per_node: vec![0; n],
                ..Trace::default()
            },
            filter,
            nodes: Vec::new(),
        };
        engine.apply_initial_condition(&config.initial_condition, &mut nodes)?;
        engine.nodes = nodes;
        if let FilterSpec::Fir(f) = &engine.filter {
            if f.order == 0 {
                let h0 = f.h[0];
                for node in &mut engine.nodes {
                    node.fir_out = h0 * node.local_input;
                }
            }
        }
        engine.record();
        Ok(engine)
    }

    fn apply_initial_condition(
        &self,
        ic: &InitialCondition,
        nodes: &mut [NodeState],
    ) -> Result<()> {
        if matches!(self.filter, FilterSpec::Fir(_)) {
            return Ok(());
        }
        let n = nodes.len();
        let b = self.filter.branch_count().max(1);
        match ic {
            InitialCondition::Zero => {}
            InitialCondition::Given(y0) => {
                if y0.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: y0.len(),
                    });
                }
                for (node, &v) in nodes.iter_mut().zip(y0) {
                    for s in &mut node.branch_states {
                        *s = Complex64::new(v / b as f64, 0.0);
                    }
                }
            }
            InitialCondition::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for node in nodes.iter_mut() {
                    for s in &mut node.branch_states {
                        *s = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn filter(&self) -> &FilterSpec {
        &self.filter
    }

    pub fn time(&self) -> usize {
        self.t
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    /// Overwrites every node's branch states (one vector per node).
    pub fn set_branch_states(&mut self, states: &[Vec<Complex64>]) -> Result<()> {
        if states.len() != self.nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.nodes.len(),
                got: states.len(),
            });
        }
        for (node, s) in self.nodes.iter_mut().zip(states) {
            if s.len() != node.branch_states.len() {
                return Err(Error::DimensionMismatch {
                    expected: node.branch_states.len(),
                    got: s.len(),
                });
            }
            node.branch_states.clone_from(s);
        }
        let t = self.trace.outputs.len() - 1;
        self.trace.outputs[t] = self.output();
        self.trace.max_imag[t] = self.max_imag();
        Ok(())
    }

    /// Current output (real part) at every node.
    pub fn output(&self) -> Vec<f64> {
        match self.filter {
            FilterSpec::Fir(_) => self.nodes.iter().map(|n| n.fir_out).collect(),
            _ => self.nodes.iter().map(|n| n.output().re).collect(),
        }
    }

    pub fn complex_output(&self) -> Vec<Complex64> {
        match self.filter {
            FilterSpec::Fir(_) => self
                .nodes
                .iter()
                .map(|n| Complex64::new(n.fir_out, 0.0))
                .collect(),
            _ => self.nodes.iter().map(NodeState::output).collect(),
        }
    }

    fn max_imag(&self) -> f64 {
        self.complex_output()
            .iter()
            .map(|c| c.im.abs())
            .fold(0.0, f64::max)
    }

    /// Whether the current output is a genuine filter output.
    pub fn output_valid(&self) -> bool {
        match &self.filter {
            FilterSpec::Fir(f) => f.order == 0 || (self.t > 0 && self.t % f.order == 0),
            FilterSpec::Periodic(p) => self.t % p.period == 0,
            _ => true,
        }
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn into_trace(self) -> Trace {
        self.trace
    }

    fn record(&mut self) {
        self.trace.outputs.push(self.output());
        self.trace.max_imag.push(self.max_imag());
        self.trace.valid.push(self.output_valid());
    }

    /// Replaces the graph from the next round on. The node count must not
    /// change.
    pub fn set_graph(&mut self, graph: &Graph) -> Result<()> {
        if graph.node_count() != self.nodes.len() {
            return Err(Error::NodeCountChanged {
                expected: self.nodes.len(),
                got: graph.node_count(),
            });
        }
        let rows = match &self.custom {
            Some(_) => {
                return Err(Error::Config(
                    "custom operators are tied to a fixed graph".into(),
                ))
            }
            None => local_laplacian_rows(graph, self.operator)?,
        };
        for (node, row) in self.nodes.iter_mut().zip(&rows) {
            node.set_row(row, self.half_width);
        }
        Ok(())
    }

    /// Supplies the input `x_t` for the next round. Periodic and FIR filters
    /// only read it at period boundaries.
    pub fn set_signal(&mut self, signal: &[f64]) -> Result<()> {
        if signal.len() != self.nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.nodes.len(),
                got: signal.len(),
            });
        }
        self.pending.copy_from_slice(signal);
        Ok(())
    }

    /// Advances one round, optionally switching signal and graph first.
    pub fn step_time_varying(
        &mut self,
        signal: Option<&[f64]>,
        graph: Option<&Graph>,
    ) -> Result<()> {
        if let Some(g) = graph {
            self.set_graph(g)?;
        }
        if let Some(x) = signal {
            self.set_signal(x)?;
        }
        self.step()
    }

    pub fn run(&mut self, rounds: usize) -> Result<()> {
        for _ in 0..rounds {
            self.step()?;
        }
        Ok(())
    }

    /// Executes one round: `y_t → y_{t+1}`.
    pub fn step(&mut self) -> Result<()> {
        let period = self.filter.period();
        let boundary = self.t % period == 0;
        let sample = match self.filter {
            FilterSpec::Fir(_) | FilterSpec::Periodic(_) => boundary,
            _ => true,
        };
        if sample {
            for (node, &x) in self.nodes.iter_mut().zip(&self.pending) {
                node.local_input = x;
            }
        }
        for node in &mut self.nodes {
            node.phase = self.t % period;
        }
        match self.filter.clone() {
            FilterSpec::Fir(f) => self.fir_round(&f, boundary)?,
            other => self.arma_round(&other)?,
        }
        self.t += 1;
        if let FilterSpec::Fir(f) = &self.filter {
            if f.order > 0 && self.t % f.order == 0 {
                for node in &mut self.nodes {
                    node.fir_out = node.fir_acc;
                }
            }
        }
        self.record();
        Ok(())
    }

    /// Snapshots outgoing payloads and delivers them along current edges.
    /// Returns the accounting entry; `payload` scalars per message.
    fn exchange(
        &mut self,
        payload: usize,
        values: impl Fn(&NodeState) -> Vec<Complex64>,
    ) -> Result<RoundAccounting> {
        let n = self.nodes.len();
        self.outgoing.clear();
        for node in &self.nodes {
            self.outgoing.extend(values(node));
        }
        let mut sent = vec![0; n];
        let mut messages = 0;
        for (i, node) in self.nodes.iter().enumerate() {
            for &(j, _) in &node.neighbor_weights {
                if self.nodes[j].weight_of(i).is_none() {
                    return Err(Error::LocalityViolation { from: i, to: j });
                }
                sent[i] += payload;
                messages += 1;
            }
        }
        let max_stored = self
            .nodes
            .iter()
            .map(|node| self.stored_scalars(node.degree()))
            .max()
            .unwrap_or(0);
        for (i, node) in self.nodes.iter().enumerate() {
            let s = self.stored_scalars(node.degree());
            self.trace.stored_per_node[i] = self.trace.stored_per_node[i].max(s);
        }
        Ok(RoundAccounting {
            round: self.t,
            messages,
            scalars: sent.iter().sum(),
            sent_per_node: sent,
            max_stored,
        })
    }

    fn stored_scalars(&self, degree: usize) -> usize {
        match &self.filter {
            // received terms, own term, accumulator, input
            FilterSpec::Fir(f) if f.order > 0 => degree + 3,
            FilterSpec::Fir(_) => 2,
            // received branch values, own branch states, input
            other => {
                let b = other.branch_count();
                b * (degree + 1) + 1
            }
        }
    }

    fn arma_round(&mut self, filter: &FilterSpec) -> Result<()> {
        let b = filter.branch_count();
        let acct = self.exchange(b, |node| node.branch_states.clone())?;
        let phase = self.t % filter.period();
        let (theta, psi, phi): (f64, Vec<Complex64>, Vec<Complex64>) = match filter {
            FilterSpec::Arma1 { psi, phi, .. } => (0.0, vec![*psi], vec![*phi]),
            FilterSpec::Parallel(p) => (
                0.0,
                p.branches.iter().map(|br| br.psi).collect(),
                p.branches.iter().map(|br| br.phi).collect(),
            ),
            FilterSpec::Periodic(p) => (p.theta[phase], vec![p.psi[phase]], vec![p.phi[phase]]),
            FilterSpec::Fir(_) => unreachable!("FIR rounds are handled separately"),
        };
        let outgoing = &self.outgoing;
        let mut acc = vec![Complex64::new(0.0, 0.0); b];
        for node in &mut self.nodes {
            for k in 0..b {
                acc[k] = node.self_weight * node.branch_states[k];
            }
            for &(j, w) in &node.neighbor_weights {
                for k in 0..b {
                    acc[k] += w * outgoing[j * b + k];
                }
            }
            let x = node.local_input;
            for k in 0..b {
                node.branch_states[k] =
                    theta * node.branch_states[k] + psi[k] * acc[k] + phi[k] * x;
            }
        }
        self.trace.accounting.push(acct);
        Ok(())
    }

    fn fir_round(&mut self, f: &FirDesign, boundary: bool) -> Result<()> {
        let order = f.order;
        if order == 0 {
            let h0 = f.h[0];
            for node in &mut self.nodes {
                node.fir_out = h0 * node.local_input;
            }
            let acct = RoundAccounting {
                round: self.t,
                messages: 0,
                scalars: 0,
                sent_per_node: vec![0; self.nodes.len()],
                max_stored: 2,
            };
            for s in &mut self.trace.stored_per_node {
                *s = (*s).max(2);
            }
            self.trace.accounting.push(acct);
            return Ok(());
        }
        if boundary {
            for node in &mut self.nodes {
                node.fir_term = node.local_input;
                node.fir_acc = f.h[0] * node.local_input;
            }
        }
        let acct = self.exchange(1, |node| vec![Complex64::new(node.fir_term, 0.0)])?;
        let r = self.t % order + 1;
        let hw = self.half_width;
        let outgoing = &self.outgoing;
        for node in &mut self.nodes {
            // L = hw·I − M
            let mut v = (hw - node.self_weight) * node.fir_term;
            for &(j, w) in &node.neighbor_weights {
                v -= w * outgoing[j].re;
            }
            node.fir_term = v;
            node.fir_acc += f.h[r] * v;
        }
        self.trace.accounting.push(acct);
        Ok(())
    }
}

fn validate_filter(filter: &FilterSpec) -> Result<()> {
    match filter {
        FilterSpec::Parallel(p) if p.branches.is_empty() => {
            Err(Error::InvalidOrder("parallel form without branches".into()))
        }
        FilterSpec::Periodic(p)
            if p.period == 0
                || p.theta.len() != p.period
                || p.psi.len() != p.period
                || p.phi.len() != p.period =>
        {
            Err(Error::InvalidOrder(
                "periodic schedule lengths do not match the period".into(),
            ))
        }
        FilterSpec::Fir(f) if f.h.len() != f.order + 1 => Err(Error::InvalidOrder(
            "FIR coefficient count does not match its order".into(),
        )),
        _ => Ok(()),
    }
}

/// Runs `config.rounds` rounds on a static graph and signal.
pub fn simulate(config: &SimulationConfig, graph: &Graph, signal: &[f64]) -> Result<Trace> {
    let mut engine = Engine::new(config, graph, signal)?;
    engine.run(config.rounds)?;
    Ok(engine.into_trace())
}

fn expect_family(config: &SimulationConfig, family: &str) -> Result<()> {
    if config.filter.family() != family {
        return Err(Error::Config(format!(
            "expected a {family} filter, got {}",
            config.filter.family()
        )));
    }
    Ok(())
}

pub fn run_fir(config: &SimulationConfig, graph: &Graph, signal: &[f64]) -> Result<Trace> {
    expect_family(config, "fir")?;
    simulate(config, graph, signal)
}

pub fn run_arma1(config: &SimulationConfig, graph: &Graph, signal: &[f64]) -> Result<Trace> {
    expect_family(config, "arma1")?;
    simulate(config, graph, signal)
}

pub fn run_parallel(config: &SimulationConfig, graph: &Graph, signal: &[f64]) -> Result<Trace> {
    expect_family(config, "parallel")?;
    simulate(config, graph, signal)
}

pub fn run_periodic(config: &SimulationConfig, graph: &Graph, signal: &[f64]) -> Result<Trace> {
    expect_family(config, "periodic")?;
    simulate(config, graph, signal)
}
