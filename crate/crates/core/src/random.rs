//! Seeded random networks.

use rand::Rng;

use crate::network::{Blocking, Count, Network, NetworkSpec};

#[derive(Clone, Debug)]
pub struct RandomNetworkConfig {
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Probability of each ordered pair `(i, j)`, `i ≠ j`, being an arc.
    pub arc_probability: f64,
    /// Probability that a node with predecessors starts empty (`r = 0`).
    pub empty_probability: f64,
    pub max_initial: u32,
    /// Probability that a node with predecessors gets `r = s = inf`.
    pub infinite_probability: f64,
    /// Probability that a node gets a finite buffer (ignored without blocking).
    pub finite_buffer_probability: f64,
    /// Largest `s − r` for finite buffers.
    pub max_spare: u32,
}

impl Default for RandomNetworkConfig {
    fn default() -> Self {
        RandomNetworkConfig {
            min_nodes: 1,
            max_nodes: 6,
            arc_probability: 0.3,
            empty_probability: 0.5,
            max_initial: 3,
            infinite_probability: 0.05,
            finite_buffer_probability: 0.6,
            max_spare: 3,
        }
    }
}

/// Draws a valid network. Cyclic `𝒢_0` graphs are not filtered out.
pub fn random_network<R: Rng + ?Sized>(
    rng: &mut R,
    config: &RandomNetworkConfig,
    blocking: Blocking,
) -> Network {
    let n = rng.gen_range(config.min_nodes..=config.max_nodes);
    let mut arcs = std::collections::BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(config.arc_probability) {
                arcs.insert((i, j));
            }
        }
    }
    let mut initial = Vec::with_capacity(n);
    let mut capacity = Vec::with_capacity(n);
    for j in 0..n {
        let has_pred = arcs.iter().any(|&(_, to)| to == j);
        if !has_pred || rng.gen_bool(config.infinite_probability) {
            initial.push(Count::Infinite);
            capacity.push(Count::Infinite);
            continue;
        }
        let r = if rng.gen_bool(config.empty_probability) {
            0
        } else {
            rng.gen_range(1..=config.max_initial.max(1))
        };
        initial.push(Count::Finite(r));
        let finite = blocking != Blocking::None && rng.gen_bool(config.finite_buffer_probability);
        capacity.push(if finite {
            Count::Finite(r + rng.gen_range(0..=config.max_spare))
        } else {
            Count::Infinite
        });
    }
    NetworkSpec {
        node_count: n,
        arcs,
        initial,
        capacity,
        blocking,
    }
    .validate()
    .expect("generator only builds valid networks")
}
