use num_complex::Complex64;

use crate::operator::LocalRow;

/// Everything one node knows: its own row of `M`, its branch states and its
/// current input.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub node_id: usize,
    /// `M_ii`
    pub self_weight: f64,
    /// `(j, M_ij)` for every current neighbor, sorted by `j`.
    pub neighbor_weights: Vec<(usize, f64)>,
    pub branch_states: Vec<Complex64>,
    pub local_input: f64,
    /// Round counter modulo the period (periodic and FIR filters).
    pub phase: usize,
    pub(crate) fir_term: f64,
    pub(crate) fir_acc: f64,
    pub(crate) fir_out: f64,
}

impl NodeState {
    pub(crate) fn new(node_id: usize, row: &LocalRow, half_width: f64, branches: usize) -> Self {
        let mut node = Self {
            node_id,
            self_weight: 0.0,
            neighbor_weights: Vec::new(),
            branch_states: vec![Complex64::new(0.0, 0.0); branches],
            local_input: 0.0,
            phase: 0,
            fir_term: 0.0,
            fir_acc: 0.0,
            fir_out: 0.0,
        };
        node.set_row(row, half_width);
        node
    }

    /// Rebuilds the neighbor table from a row of `L`.
    pub(crate) fn set_row(&mut self, row: &LocalRow, half_width: f64) {
        self.self_weight = half_width - row.diagonal;
        self.neighbor_weights = row.off_diagonal.iter().map(|&(j, v)| (j, -v)).collect();
        self.neighbor_weights.sort_by_key(|&(j, _)| j);
    }

    pub fn degree(&self) -> usize {
        self.neighbor_weights.len()
    }

    pub fn weight_of(&self, j: usize) -> Option<f64> {
        self.neighbor_weights
            .binary_search_by_key(&j, |&(k, _)| k)
            .ok()
            .map(|idx| self.neighbor_weights[idx].1)
    }

    pub fn output(&self) -> Complex64 {
        self.branch_states.iter().sum()
    }
}
