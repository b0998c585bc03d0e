//! Graph signals and their `node,value` CSV form (nodes are 1-based on disk).

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal {
    pub values: Vec<f64>,
    /// Round index the signal refers to.
    pub timestamp: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct SignalRow {
    node: usize,
    value: f64,
}

impl GraphSignal {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            timestamp: 0,
        }
    }

    pub fn at(values: Vec<f64>, timestamp: usize) -> Self {
        Self { values, timestamp }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.values)
    }

    pub fn ensure_len(&self, n: usize) -> Result<()> {
        if self.values.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.values.len(),
            });
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows: Vec<SignalRow> = Vec::new();
        for row in rdr.deserialize() {
            rows.push(row?);
        }
        let n = rows.len();
        let mut values = vec![f64::NAN; n];
        for row in rows {
            if row.node == 0 || row.node > n {
                return Err(Error::Config(format!(
                    "signal row for node {} outside 1..={n}",
                    row.node
                )));
            }
            values[row.node - 1] = row.value;
        }
        if let Some(missing) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::Config(format!(
                "signal missing node {}",
                missing + 1
            )));
        }
        Ok(Self::new(values))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for (i, &value) in self.values.iter().enumerate() {
            wtr.serialize(SignalRow { node: i + 1, value })?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖a − b‖ / ‖b‖`, or the plain norm of the difference when `b` is zero.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let denom = norm(b);
    if denom > 0.0 {
        diff / denom
    } else {
        diff
    }
}
