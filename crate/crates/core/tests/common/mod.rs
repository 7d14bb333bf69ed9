//! Shared fixtures and independent reference implementations ("oracles")
//! for the integration suites.
//!
//! The oracles deliberately avoid the library's own traversal and
//! aggregation code paths: distances come from Floyd-Warshall or a
//! level-set BFS, aggregates from a direct weighted sum in node order.
#![allow(dead_code)] // each test target compiles its own copy

use swarmcast_core::topology::{DeploymentConfig, SwarmTopology};

/// The worked-example swarm: node 0 is the graph center; edges
/// 1-0, 1-2, 1-3, 4-0, 4-6, 5-6, 6-0, 7-0.
pub fn toy_topology() -> SwarmTopology {
    let positions = vec![
        (0.0, 0.0),
        (95.0, 0.0),
        (175.0, 55.0),
        (175.0, -55.0),
        (-90.0, 20.0),
        (-115.0, 160.0),
        (-50.0, 85.0),
        (0.0, -95.0),
    ];
    SwarmTopology::from_positions(positions, 100.0)
}

/// Deployment config used by randomized suites: area scaled with the swarm
/// size so the expected degree stays near 8 and placements almost always
/// connect.
pub fn scaled_config(num_uavs: usize, rng_seed: u64) -> DeploymentConfig {
    let side = (94.0 * (num_uavs as f64).sqrt()).max(200.0);
    DeploymentConfig {
        num_uavs,
        area_width: side,
        area_height: side,
        comm_range: 150.0,
        safety_distance: 5.0,
        rng_seed,
        max_attempts: 1000,
    }
}

/// Level-set BFS, structurally independent of the library's queue-based
/// traversal. Panics on disconnected input.
pub fn oracle_bfs(topology: &SwarmTopology, source: usize) -> Vec<usize> {
    let n = topology.num_nodes();
    let mut dist = vec![usize::MAX; n];
    dist[source] = 0;
    let mut frontier = vec![source];
    let mut level = 0;
    while !frontier.is_empty() {
        level += 1;
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in topology.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = level;
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    assert!(
        dist.iter().all(|&d| d != usize::MAX),
        "oracle_bfs requires a connected topology"
    );
    dist
}

/// Dense all-pairs hop counts by Floyd-Warshall.
pub fn oracle_floyd_warshall(topology: &SwarmTopology) -> Vec<Vec<usize>> {
    let n = topology.num_nodes();
    const INF: usize = usize::MAX / 2;
    let mut dist = vec![vec![INF; n]; n];
    for v in 0..n {
        dist[v][v] = 0;
        for &u in topology.neighbors(v) {
            dist[v][u] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    dist
}

/// Eccentricity of every node via the oracle BFS.
pub fn oracle_eccentricities(topology: &SwarmTopology) -> Vec<usize> {
    (0..topology.num_nodes())
        .map(|v| *oracle_bfs(topology, v).iter().max().unwrap())
        .collect()
}

/// Direct weighted sum over all nodes in id order, skipping the network.
pub fn oracle_weighted_sum(weights: &[f64], models: &[Vec<f64>]) -> Vec<f64> {
    let dim = models[0].len();
    let mut acc = vec![0.0; dim];
    for (w, m) in weights.iter().zip(models) {
        for (a, x) in acc.iter_mut().zip(m) {
            *a += w * x;
        }
    }
    acc
}

/// Componentwise relative comparison with an absolute floor of 1.
pub fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}
