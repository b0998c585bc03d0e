use std::collections::BTreeMap;
use std::io::Read;

use serde::Deserialize;

use super::{Engine, SimulationConfig, Trace};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Per-round input provider.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSource {
    Static(Vec<f64>),
    Constant(f64),
    /// The current graph's weighted degree vector.
    Degree,
    /// `before` for `t < at`, `after` from then on.
    Switch {
        at: usize,
        before: Vec<f64>,
        after: Vec<f64>,
    },
    /// `cos(ω t) · base`
    Sinusoid {
        omega: f64,
        base: Vec<f64>,
    },
    /// Piecewise-constant table: the row set with the largest `t' ≤ t`.
    Table(BTreeMap<usize, Vec<f64>>),
}

#[derive(Debug, Deserialize)]
struct TableRow {
    t: usize,
    node: usize,
    value: f64,
}

impl SignalSource {
    pub fn signal_at(&self, t: usize, graph: &Graph) -> Result<Vec<f64>> {
        let n = graph.node_count();
        let out = match self {
            Self::Static(x) => x.clone(),
            Self::Constant(c) => vec![*c; n],
            Self::Degree => graph.degrees(),
            Self::Switch { at, before, after } => {
                if t < *at {
                    before.clone()
                } else {
                    after.clone()
                }
            }
            Self::Sinusoid { omega, base } => {
                let c = (omega * t as f64).cos();
                base.iter().map(|v| c * v).collect()
            }
            Self::Table(rows) => rows
                .range(..=t)
                .next_back()
                .map(|(_, v)| v.clone())
                .ok_or_else(|| {
                    Error::Config(format!("signal table has no rows at or before t = {t}"))
                })?,
        };
        if out.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: out.len(),
            });
        }
        Ok(out)
    }

    /// Reads `t,node,value` rows (nodes 1-based) for a graph of `n` nodes.
    pub fn read_table_csv<R: Read>(reader: R, n: usize) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for row in rdr.deserialize() {
            let row: TableRow = row?;
            if row.node == 0 || row.node > n {
                return Err(Error::Config(format!(
                    "signal row for node {} outside 1..={n}",
                    row.node
                )));
            }
            rows.entry(row.t).or_insert_with(|| vec![f64::NAN; n])[row.node - 1] = row.value;
        }
        for (t, v) in &rows {
            if let Some(i) = v.iter().position(|x| x.is_nan()) {
                return Err(Error::Config(format!(
                    "signal table misses node {} at t = {t}",
                    i + 1
                )));
            }
        }
        if rows.is_empty() {
            return Err(Error::Config("empty signal table".into()));
        }
        Ok(Self::Table(rows))
    }
}

/// Runs `config.rounds` rounds, feeding `x_t` from the provider before each
/// round.
pub fn run_with_source(
    config: &SimulationConfig,
    graph: &Graph,
    source: &SignalSource,
) -> Result<Trace> {
    let mut engine = Engine::new(config, graph, &source.signal_at(0, graph)?)?;
    for t in 0..config.rounds {
        engine.set_signal(&source.signal_at(t, graph)?)?;
        engine.step()?;
    }
    Ok(engine.into_trace())
}
