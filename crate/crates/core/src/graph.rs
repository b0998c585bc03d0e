//! Undirected weighted graphs and the edge-list file format.
//!
//! Nodes are 0-based in memory. The text format is 1-based:
//!
//! ```text
//! # comment
//! 1 2 0.5
//! 2 3          # weight defaults to 1.0
//! # pos 1 10.0 20.0
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

/// A 2-D coordinate in meters.
pub type Position = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    // (i, j) with i < j
    edges: BTreeMap<(usize, usize), f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
    positions: Option<Vec<Position>>,
}

impl Graph {
    pub fn new(node_count: usize) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidGraph(
                "a graph needs at least one node".into(),
            ));
        }
        Ok(Self {
            node_count,
            edges: BTreeMap::new(),
            adjacency: vec![Vec::new(); node_count],
            positions: None,
        })
    }

    /// Builds a graph from `(i, j, weight)` triples.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut g = Self::new(node_count)?;
        for &(i, j, w) in edges {
            g.add_edge(i, j, w)?;
        }
        Ok(g)
    }

    /// Adds the undirected edge `{i, j}`. Re-adding an existing edge with the
    /// same weight is a no-op; a different weight is an error.
    pub fn add_edge(&mut self, i: usize, j: usize, weight: f64) -> Result<()> {
        if i >= self.node_count || j >= self.node_count {
            return Err(Error::InvalidGraph(format!(
                "edge ({i}, {j}) references a node outside 0..{}",
                self.node_count
            )));
        }
        if i == j {
            return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidGraph(format!(
                "edge ({i}, {j}) has non-positive weight {weight}"
            )));
        }
        let key = (i.min(j), i.max(j));
        if let Some(&existing) = self.edges.get(&key) {
            if existing != weight {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) given twice with weights {existing} and {weight}"
                )));
            }
            return Ok(());
        }
        self.edges.insert(key, weight);
        insert_sorted(&mut self.adjacency[i], j, weight);
        insert_sorted(&mut self.adjacency[j], i, weight);
        Ok(())
    }

    pub fn with_positions(mut self, positions: Vec<Position>) -> Result<Self> {
        if positions.len() != self.node_count {
            return Err(Error::DimensionMismatch {
                expected: self.node_count,
                got: positions.len(),
            });
        }
        self.positions = Some(positions);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j, weight)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    /// Neighbors of `node` sorted by id, with edge weights.
    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains_key(&(i.min(j), i.max(j)))
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.edges.get(&(i.min(j), i.max(j))).copied()
    }

    /// Number of neighbors.
    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    /// Sum of incident edge weights.
    pub fn weighted_degree(&self, node: usize) -> f64 {
        self.adjacency[node].iter().map(|&(_, w)| w).sum()
    }

    pub fn max_weighted_degree(&self) -> f64 {
        (0..self.node_count)
            .map(|i| self.weighted_degree(i))
            .fold(0.0, f64::max)
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.node_count)
            .map(|i| self.degree(i) as f64)
            .collect()
    }

    pub fn positions(&self) -> Option<&[Position]> {
        self.positions.as_deref()
    }

    pub fn isolated_nodes(&self) -> Vec<usize> {
        (0..self.node_count)
            .filter(|&i| self.adjacency[i].is_empty())
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.node_count
    }

    pub fn path(node_count: usize) -> Result<Self> {
        let edges: Vec<_> = (1..node_count).map(|i| (i - 1, i, 1.0)).collect();
        Self::from_edges(node_count, &edges)
    }

    pub fn cycle(node_count: usize) -> Result<Self> {
        if node_count < 3 {
            return Err(Error::InvalidGraph("a cycle needs at least 3 nodes".into()));
        }
        let edges: Vec<_> = (0..node_count)
            .map(|i| (i, (i + 1) % node_count, 1.0))
            .collect();
        Self::from_edges(node_count, &edges)
    }

    pub fn complete(node_count: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..node_count {
            for j in i + 1..node_count {
                edges.push((i, j, 1.0));
            }
        }
        Self::from_edges(node_count, &edges)
    }

    /// Disk graph: nodes within `range` (inclusive) of each other are joined
    /// with unit weight. Brute-force over all pairs.
    pub fn disk(positions: Vec<Position>, range: f64) -> Result<Self> {
        let mut g = Self::new(positions.len())?;
        let r2 = range * range;
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                let dx = positions[i][0] - positions[j][0];
                let dy = positions[i][1] - positions[j][1];
                if dx * dx + dy * dy <= r2 {
                    g.add_edge(i, j, 1.0)?;
                }
            }
        }
        g.with_positions(positions)
    }

    /// Random geometric graph in the unit square.
    pub fn random_geometric<R: Rng + ?Sized>(
        node_count: usize,
        radius: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let positions = (0..node_count)
            .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        Self::disk(positions, radius)
    }

    /// Connectivity-scaled radius `sqrt(2 ln N / (pi N))` for the unit square.
    pub fn connectivity_radius(node_count: usize) -> f64 {
        let n = node_count.max(2) as f64;
        (2.0 * n.ln() / (std::f64::consts::PI * n)).sqrt()
    }

    /// Draws random geometric graphs until one is connected (at most
    /// `attempts` draws), returning the last draw otherwise.
    pub fn connected_random_geometric<R: Rng + ?Sized>(
        node_count: usize,
        radius: f64,
        attempts: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let mut g = Self::random_geometric(node_count, radius, rng)?;
        for _ in 1..attempts.max(1) {
            if g.is_connected() {
                break;
            }
            g = Self::random_geometric(node_count, radius, rng)?;
        }
        Ok(g)
    }

    /// Parses the 1-based edge-list format.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut positions: BTreeMap<usize, Position> = BTreeMap::new();
        let mut max_node = 0usize;
        let mut declared_nodes = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            if let Some(rest) = line.strip_prefix('#') {
                let mut tokens = rest.split_whitespace();
                match tokens.next() {
                    Some("pos") => {
                        let fields: Vec<&str> = tokens.collect();
                        if fields.len() != 3 {
                            return Err(parse_err("expected `# pos i x y`".into()));
                        }
                        let node = parse_node(fields[0]).map_err(&parse_err)?;
                        let x = parse_f64(fields[1]).map_err(&parse_err)?;
                        let y = parse_f64(fields[2]).map_err(&parse_err)?;
                        max_node = max_node.max(node);
                        positions.insert(node, [x, y]);
                    }
                    Some("nodes") => {
                        let n = tokens
                            .next()
                            .ok_or_else(|| parse_err("expected `# nodes N`".into()))?;
                        declared_nodes = Some(parse_node(n).map_err(&parse_err)?);
                    }
                    _ => {}
                }
                continue;
            }
            let line = line.split('#').next().unwrap_or("").trim();
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(parse_err(format!("expected `i j [w]`, got `{line}`")));
            }
            let i = parse_node(fields[0]).map_err(&parse_err)?;
            let j = parse_node(fields[1]).map_err(&parse_err)?;
            let w = match fields.get(2) {
                Some(s) => parse_f64(s).map_err(&parse_err)?,
                None => 1.0,
            };
            max_node = max_node.max(i).max(j);
            edges.push((line_no, i, j, w));
        }

        let node_count = declared_nodes.unwrap_or(0).max(max_node);
        let mut g = Self::new(node_count)?;
        for (line, i, j, w) in edges {
            g.add_edge(i - 1, j - 1, w).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        if !positions.is_empty() {
            if positions.len() != node_count {
                return Err(Error::Parse {
                    line: 0,
                    message: format!(
                        "positions given for {} of {node_count} nodes",
                        positions.len()
                    ),
                });
            }
            g = g.with_positions(positions.into_values().collect())?;
        }
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# nodes {}", self.node_count);
        for (i, j, w) in self.edges() {
            let _ = writeln!(out, "{} {} {:?}", i + 1, j + 1, w);
        }
        if let Some(pos) = &self.positions {
            for (i, p) in pos.iter().enumerate() {
                let _ = writeln!(out, "# pos {} {:?} {:?}", i + 1, p[0], p[1]);
            }
        }
        out
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}

fn insert_sorted(list: &mut Vec<(usize, f64)>, node: usize, weight: f64) {
    let at = list.partition_point(|&(n, _)| n < node);
    list.insert(at, (node, weight));
}

fn parse_node(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("node indices are 1-based".into()),
        Ok(n) => Ok(n),
        Err(_) => Err(format!("invalid node index `{s}`")),
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>()
        .map_err(|_| format!("invalid number `{s}`"))
}
