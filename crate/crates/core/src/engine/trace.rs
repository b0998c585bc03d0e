use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::signal::relative_error;

/// Messages and scalars exchanged during one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundAccounting {
    /// Round index `t`; the round maps `y_t` to `y_{t+1}`.
    pub round: usize,
    pub messages: usize,
    pub scalars: usize,
    /// Scalars sent by each node.
    pub sent_per_node: Vec<usize>,
    /// Largest number of scalars any node holds during the round.
    pub max_stored: usize,
}

/// Outputs of a run, one entry per time `t = 0..=T`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub family: String,
    /// Real part of the output at each time.
    pub outputs: Vec<Vec<f64>>,
    /// Largest imaginary part across nodes at each time.
    pub max_imag: Vec<f64>,
    /// Whether the output at `t` is a genuine filter output (period
    /// boundaries and completed FIR windows).
    pub valid: Vec<bool>,
    pub accounting: Vec<RoundAccounting>,
    /// Per-node maximum stored scalars over the run.
    pub stored_per_node: Vec<usize>,
    /// Filtering error against an oracle, when one was supplied.
    pub errors: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountingReport {
    pub rounds: usize,
    pub total_messages: usize,
    pub total_scalars: usize,
    pub max_stored_per_node: Vec<usize>,
    pub max_sent_per_node: Vec<usize>,
    pub total_sent_per_node: Vec<usize>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.outputs.last().map(Vec::as_slice)
    }

    /// Last output flagged valid.
    pub fn last_valid(&self) -> Option<(usize, &[f64])> {
        self.valid
            .iter()
            .rposition(|&v| v)
            .map(|t| (t, self.outputs[t].as_slice()))
    }

    /// `‖y_t − y*‖/‖y*‖` for every `t`; stored on the trace and returned.
    pub fn attach_errors(&mut self, oracle: &[f64]) -> &[f64] {
        let e = self
            .outputs
            .iter()
            .map(|y| relative_error(y, oracle))
            .collect();
        self.errors = Some(e);
        self.errors.as_deref().unwrap_or_default()
    }

    pub fn accounting_report(&self) -> AccountingReport {
        accounting_report(self)
    }

    /// Writes `t,node,value` rows (nodes 1-based).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["t", "node", "value"])?;
        for (t, y) in self.outputs.iter().enumerate() {
            for (i, v) in y.iter().enumerate() {
                wtr.write_record([t.to_string(), (i + 1).to_string(), format!("{v:?}")])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

pub fn accounting_report(trace: &Trace) -> AccountingReport {
    let n = trace.stored_per_node.len();
    let mut max_sent = vec![0; n];
    let mut total_sent = vec![0; n];
    for round in &trace.accounting {
        for (i, &s) in round.sent_per_node.iter().enumerate() {
            max_sent[i] = max_sent[i].max(s);
            total_sent[i] += s;
        }
    }
    AccountingReport {
        rounds: trace.accounting.len(),
        total_messages: trace.accounting.iter().map(|r| r.messages).sum(),
        total_scalars: trace.accounting.iter().map(|r| r.scalars).sum(),
        max_stored_per_node: trace.stored_per_node.clone(),
        max_sent_per_node: max_sent,
        total_sent_per_node: total_sent,
    }
}
