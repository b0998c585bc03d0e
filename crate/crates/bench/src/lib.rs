//! Benchmark fixtures.

use arma_core::Graph;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded random geometric graph on `n` nodes at 1.5× the connectivity radius.
pub fn fixture_graph(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Graph::connected_random_geometric(n, 1.5 * Graph::connectivity_radius(n), 1000, &mut rng)
        .expect("fixture graph")
}

pub fn fixture_signal(n: usize) -> Vec<f64> {
    (0..n).map(|i| ((i * 37 % 11) as f64 - 5.0) / 5.0).collect()
}
