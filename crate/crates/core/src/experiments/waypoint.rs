use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Graph, Position};

/// Random waypoint mobility in an axis-aligned square box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaypointModel {
    pub box_size: f64,
    /// Meters per iteration.
    pub speed: f64,
    /// Iterations spent at a reached waypoint.
    pub pause: usize,
    pub positions: Vec<Position>,
    pub targets: Vec<Position>,
    pub pause_left: Vec<usize>,
}

impl WaypointModel {
    pub fn new<R: Rng + ?Sized>(
        node_count: usize,
        box_size: f64,
        speed: f64,
        pause: usize,
        rng: &mut R,
    ) -> Self {
        let mut draw = || {
            [
                rng.random::<f64>() * box_size,
                rng.random::<f64>() * box_size,
            ]
        };
        let positions: Vec<Position> = (0..node_count).map(|_| draw()).collect();
        let targets: Vec<Position> = (0..node_count).map(|_| draw()).collect();
        Self {
            box_size,
            speed,
            pause,
            positions,
            targets,
            pause_left: vec![0; node_count],
        }
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    /// Moves every node one iteration toward its target; nodes that arrive
    /// pause, then draw a fresh target.
    pub fn advance<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for i in 0..self.positions.len() {
            if self.pause_left[i] > 0 {
                self.pause_left[i] -= 1;
                continue;
            }
            let [x, y] = self.positions[i];
            let [tx, ty] = self.targets[i];
            let (dx, dy) = (tx - x, ty - y);
            let dist = dx.hypot(dy);
            if dist <= self.speed {
                self.positions[i] = self.targets[i];
                self.targets[i] = [
                    rng.random::<f64>() * self.box_size,
                    rng.random::<f64>() * self.box_size,
                ];
                self.pause_left[i] = self.pause;
            } else {
                let s = self.speed / dist;
                self.positions[i] = [
                    (x + dx * s).clamp(0.0, self.box_size),
                    (y + dy * s).clamp(0.0, self.box_size),
                ];
            }
        }
    }

    pub fn disk_graph(&self, range: f64) -> Result<Graph> {
        Graph::disk(self.positions.clone(), range)
    }
}
