//! Comparison schemes: shortest-path unicast without in-network aggregation,
//! per-neighbor broadcast, and alternative root-selection strategies.
//!
//! Baselines run on the same topology objects as the proposed scheme so that
//! every comparison is paired per topology.

use crate::topology::{bfs_distances, build_bfs_tree, SwarmTopology};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;
use std::str::FromStr;

/// Comparison scheme identifier. The string forms double as CSV column
/// values and CLI arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Proposed,
    Spf,
    NeighborBroadcast,
    RootRandom,
    RootCentroid,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Proposed,
        Scheme::Spf,
        Scheme::NeighborBroadcast,
        Scheme::RootRandom,
        Scheme::RootCentroid,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Spf => "spf",
            Scheme::NeighborBroadcast => "neighbor_broadcast",
            Scheme::RootRandom => "root_random",
            Scheme::RootCentroid => "root_centroid",
        }
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proposed" => Ok(Scheme::Proposed),
            "spf" => Ok(Scheme::Spf),
            "neighbor_broadcast" => Ok(Scheme::NeighborBroadcast),
            "root_random" => Ok(Scheme::RootRandom),
            "root_centroid" => Ok(Scheme::RootCentroid),
            other => Err(format!(
                "unknown scheme `{}` (expected proposed|spf|neighbor_broadcast|root_random|root_centroid)",
                other
            )),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Delay and message count of one scheme on one topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselineResult {
    pub scheme: Scheme,
    pub delay_slots: usize,
    pub messages_sent: usize,
}

/// Shortest-path-first unicast: every node delivers its own update to the
/// root along its shortest path, relays forward each message separately.
///
/// Message count is exactly the sum of hop distances to the root. The delay
/// is the makespan of the hop-by-hop delivery under a one-send-per-node-per-
/// slot constraint with FIFO queueing at relays (packets route along the
/// lowest-id-parent BFS tree; arrivals enqueue in ascending sender order).
pub fn spf_overhead(topology: &SwarmTopology, root: usize) -> BaselineResult {
    let n = topology.num_nodes();
    let tree = build_bfs_tree(topology, root);
    // Every node starts with its own packet queued; each relay slot moves
    // one queue head one hop toward the root.
    let mut queues: Vec<VecDeque<usize>> = (0..n)
        .map(|v| {
            if v == root {
                VecDeque::new()
            } else {
                VecDeque::from(vec![v])
            }
        })
        .collect();
    let mut messages = 0;
    let mut slots = 0;
    loop {
        let mut sends: Vec<(usize, usize, usize)> = Vec::new();
        for v in 0..n {
            if let Some(&packet) = queues[v].front() {
                let parent = tree.parent(v).expect("only non-root nodes hold packets");
                sends.push((v, parent, packet));
            }
        }
        if sends.is_empty() {
            break;
        }
        slots += 1;
        for (sender, receiver, packet) in sends {
            queues[sender].pop_front();
            messages += 1;
            if receiver != root {
                queues[receiver].push_back(packet);
            }
        }
    }

    debug_assert_eq!(
        messages,
        bfs_distances(topology, root)
            .iter()
            .enumerate()
            .filter(|&(v, _)| v != root)
            .map(|(_, &d)| d)
            .sum::<usize>()
    );
    BaselineResult {
        scheme: Scheme::Spf,
        delay_slots: slots,
        messages_sent: messages,
    }
}

/// Decentralized per-neighbor broadcast: each round, every node sends its
/// model once per incident link, so one round costs `2 |E|` messages.
///
/// `rounds_per_aggregation` is the number of broadcast rounds counted as one
/// global aggregation; information from the farthest pair needs at least the
/// minimum graph eccentricity many rounds to mix, so that is the usual value.
pub fn neighbor_broadcast_overhead(
    topology: &SwarmTopology,
    rounds_per_aggregation: usize,
) -> BaselineResult {
    BaselineResult {
        scheme: Scheme::NeighborBroadcast,
        delay_slots: rounds_per_aggregation,
        messages_sent: rounds_per_aggregation * 2 * topology.num_edges(),
    }
}

/// Uniformly random root choice, deterministic per seed.
pub fn root_random(topology: &SwarmTopology, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.random_range(0..topology.num_nodes())
}

/// Root choice by 2-D location: the node closest to the mean position of the
/// whole swarm, lowest id on ties.
pub fn root_centroid(topology: &SwarmTopology) -> usize {
    let n = topology.num_nodes();
    let (sx, sy) = topology
        .positions()
        .iter()
        .fold((0.0, 0.0), |(ax, ay), &(x, y)| (ax + x, ay + y));
    let centroid = (sx / n as f64, sy / n as f64);
    let mut best = 0;
    let mut best_d2 = f64::INFINITY;
    for (v, &(x, y)) in topology.positions().iter().enumerate() {
        let d2 = (x - centroid.0).powi(2) + (y - centroid.1).powi(2);
        if d2 < best_d2 {
            best = v;
            best_d2 = d2;
        }
    }
    best
}
