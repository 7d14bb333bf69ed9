//! Swarm deployments, connectivity graphs, hop distances, and the
//! breadth-first aggregation tree.
//!
//! Node ids are dense integers `0..V-1`. Distances are always hop counts on
//! the unweighted connectivity graph, never meters.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Hop count marking a node not reached by a traversal. Only observable on
/// disconnected graphs, which every operation here treats as a precondition
/// violation.
pub const UNREACHABLE: usize = usize::MAX;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("invalid deployment config: {0}")]
    InvalidConfig(String),
    #[error("no connected safety-respecting layout found in {attempts} attempts")]
    PlacementFailure { attempts: usize },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("topology is not connected")]
    Disconnected,
}

/// Parameters of a random swarm deployment.
#[derive(Debug, Clone)]
pub struct DeploymentConfig {
    pub num_uavs: usize,
    pub area_width: f64,
    pub area_height: f64,
    /// Maximum direct communication range between two UAVs, meters.
    pub comm_range: f64,
    /// Minimum pairwise separation between UAVs, meters.
    pub safety_distance: f64,
    pub rng_seed: u64,
    /// Whole-layout retry budget for rejection sampling.
    pub max_attempts: usize,
}

impl DeploymentConfig {
    /// Reference deployment geometry: 1000 m x 1000 m area, 150 m range, 5 m
    /// safety distance.
    pub fn new(num_uavs: usize, rng_seed: u64) -> Self {
        DeploymentConfig {
            num_uavs,
            area_width: 1000.0,
            area_height: 1000.0,
            comm_range: 150.0,
            safety_distance: 5.0,
            rng_seed,
            max_attempts: 1000,
        }
    }

    pub fn validate(&self) -> Result<(), TopologyError> {
        if self.num_uavs < 1 {
            return Err(TopologyError::InvalidConfig("num_uavs must be >= 1".into()));
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.area_width) || !positive(self.area_height) {
            return Err(TopologyError::InvalidConfig(
                "area dimensions must be positive".into(),
            ));
        }
        if !positive(self.safety_distance) {
            return Err(TopologyError::InvalidConfig(
                "safety_distance must be positive".into(),
            ));
        }
        if !self.comm_range.is_finite() || self.comm_range <= self.safety_distance {
            return Err(TopologyError::InvalidConfig(
                "comm_range must exceed safety_distance".into(),
            ));
        }
        if self.max_attempts == 0 {
            return Err(TopologyError::InvalidConfig("max_attempts must be >= 1".into()));
        }
        Ok(())
    }
}

/// A fixed swarm deployment: 2-D positions plus the connectivity graph
/// derived from them.
///
/// An edge `(u, v)` exists iff the Euclidean distance between `u` and `v` is
/// at most the communication range. The graph is undirected and unweighted;
/// adjacency lists are kept sorted so every traversal is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmTopology {
    positions: Vec<(f64, f64)>,
    neighbors: Vec<Vec<usize>>,
    comm_range: f64,
    num_edges: usize,
}

impl SwarmTopology {
    /// Builds the connectivity graph for fixed positions. Edges are always
    /// recomputed from positions and range, never stored externally.
    pub fn from_positions(positions: Vec<(f64, f64)>, comm_range: f64) -> Self {
        let n = positions.len();
        let mut neighbors = vec![Vec::new(); n];
        let mut num_edges = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                if euclidean(positions[u], positions[v]) <= comm_range {
                    neighbors[u].push(v);
                    neighbors[v].push(u);
                    num_edges += 1;
                }
            }
        }
        SwarmTopology {
            positions,
            neighbors,
            comm_range,
            num_edges,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.positions.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn comm_range(&self) -> f64 {
        self.comm_range
    }

    pub fn position(&self, v: usize) -> (f64, f64) {
        self.positions[v]
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    /// Neighbor ids of `v`, sorted ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.neighbors[u].binary_search(&v).is_ok()
    }

    /// True when every pair of nodes can reach each other.
    pub fn is_connected(&self) -> bool {
        if self.positions.is_empty() {
            return false;
        }
        bfs_distances(self, 0).iter().all(|&d| d != UNREACHABLE)
    }

    /// Line-oriented text form: `swarm <V> <comm_range_m>` header followed by
    /// one `node <id> <x_m> <y_m>` line per node, ids in order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("swarm {} {}\n", self.num_nodes(), self.comm_range));
        for (id, (x, y)) in self.positions.iter().enumerate() {
            out.push_str(&format!("node {} {} {}\n", id, x, y));
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output. Edges are rebuilt from the
    /// positions and range in the file.
    pub fn from_text(text: &str) -> Result<Self, TopologyError> {
        let parse_err = |line: usize, message: &str| TopologyError::Parse {
            line,
            message: message.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty topology file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "swarm" {
            return Err(parse_err(1, "expected header `swarm <V> <comm_range_m>`"));
        }
        let num_nodes: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(1, "invalid node count"))?;
        let comm_range: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(1, "invalid comm range"))?;
        if num_nodes == 0 {
            return Err(parse_err(1, "node count must be >= 1"));
        }
        if !comm_range.is_finite() || comm_range <= 0.0 {
            return Err(parse_err(1, "comm range must be positive"));
        }

        let mut positions = Vec::with_capacity(num_nodes);
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "node" {
                return Err(parse_err(lineno, "expected `node <id> <x_m> <y_m>`"));
            }
            let id: usize = fields[1]
                .parse()
                .map_err(|_| parse_err(lineno, "invalid node id"))?;
            if id != positions.len() {
                return Err(parse_err(lineno, "node ids must be 0..V-1 in order"));
            }
            let x: f64 = fields[2]
                .parse()
                .map_err(|_| parse_err(lineno, "invalid x coordinate"))?;
            let y: f64 = fields[3]
                .parse()
                .map_err(|_| parse_err(lineno, "invalid y coordinate"))?;
            if !x.is_finite() || !y.is_finite() {
                return Err(parse_err(lineno, "coordinates must be finite"));
            }
            positions.push((x, y));
        }
        if positions.len() != num_nodes {
            return Err(TopologyError::Parse {
                line: num_nodes + 1,
                message: format!("expected {} node lines, found {}", num_nodes, positions.len()),
            });
        }
        Ok(SwarmTopology::from_positions(positions, comm_range))
    }
}

fn euclidean(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (dx * dx + dy * dy).sqrt()
}

/// Randomly places `num_uavs` nodes until the layout respects the safety
/// distance and forms a connected graph.
///
/// Rejection sampling: points are drawn uniformly over the area and redrawn
/// while they sit within `safety_distance` of an already placed node; once
/// all nodes are placed, the whole layout is rejected unless connected.
/// Deterministic for a fixed `rng_seed`.
pub fn generate_deployment(config: &DeploymentConfig) -> Result<SwarmTopology, TopologyError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    // Redraw budget per node before the layout attempt is abandoned as
    // over-dense.
    const DRAWS_PER_NODE: usize = 1000;

    for _ in 0..config.max_attempts {
        let mut positions: Vec<(f64, f64)> = Vec::with_capacity(config.num_uavs);
        let mut placed_all = true;
        'nodes: for _ in 0..config.num_uavs {
            for _ in 0..DRAWS_PER_NODE {
                let p = (
                    rng.random_range(0.0..config.area_width),
                    rng.random_range(0.0..config.area_height),
                );
                if positions
                    .iter()
                    .all(|&q| euclidean(p, q) >= config.safety_distance)
                {
                    positions.push(p);
                    continue 'nodes;
                }
            }
            placed_all = false;
            break;
        }
        if !placed_all {
            continue;
        }
        let topology = SwarmTopology::from_positions(positions, config.comm_range);
        if topology.is_connected() {
            return Ok(topology);
        }
    }
    Err(TopologyError::PlacementFailure {
        attempts: config.max_attempts,
    })
}

/// Hop distance from `source` to every node. Unreached nodes (only possible
/// on disconnected input, which callers must rule out) are [`UNREACHABLE`].
pub fn bfs_distances(topology: &SwarmTopology, source: usize) -> Vec<usize> {
    let n = topology.num_nodes();
    let mut dist = vec![UNREACHABLE; n];
    dist[source] = 0;
    let mut queue = std::collections::VecDeque::with_capacity(n);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &v in topology.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Longest hop distance from `v` to any other node.
pub fn eccentricity(topology: &SwarmTopology, v: usize) -> usize {
    bfs_distances(topology, v).into_iter().max().unwrap_or(0)
}

/// Eccentricity of every node, by one BFS per node.
pub fn all_eccentricities(topology: &SwarmTopology) -> Vec<usize> {
    (0..topology.num_nodes())
        .map(|v| eccentricity(topology, v))
        .collect()
}

/// Smallest eccentricity over all nodes (the graph radius).
pub fn min_eccentricity(topology: &SwarmTopology) -> usize {
    all_eccentricities(topology).into_iter().min().unwrap_or(0)
}

/// Root choice: the node with minimum eccentricity, lowest id on ties.
///
/// Rooting the aggregation tree here minimizes the per-round delay, which
/// equals the root's eccentricity in slots.
pub fn select_root(topology: &SwarmTopology) -> usize {
    let eccs = all_eccentricities(topology);
    let mut best = 0;
    for v in 1..eccs.len() {
        if eccs[v] < eccs[best] {
            best = v;
        }
    }
    best
}

/// Breadth-first spanning tree rooted at the aggregation node.
///
/// `tier(v)` is the hop distance `d(v, root)`; tree paths to the root are
/// shortest paths, so the tree depth equals the root's eccentricity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsTree {
    root: usize,
    parent: Vec<Option<usize>>,
    tier: Vec<usize>,
    depth: usize,
}

impl BfsTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn num_nodes(&self) -> usize {
        self.parent.len()
    }

    /// Tree parent of `v`; `None` exactly for the root.
    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Hop distance of `v` from the root.
    pub fn tier(&self, v: usize) -> usize {
        self.tier[v]
    }

    /// Deepest tier, equal to the root's eccentricity.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Nodes grouped by tier: index `k` holds the sorted set of nodes at hop
    /// distance `k` (index 0 is `[root]`).
    pub fn tier_sets(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.depth + 1];
        for v in 0..self.num_nodes() {
            sets[self.tier[v]].push(v);
        }
        sets
    }

    /// Tree children of each node, sorted ascending.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.num_nodes()];
        for v in 0..self.num_nodes() {
            if let Some(p) = self.parent[v] {
                children[p].push(v);
            }
        }
        children
    }

    /// Nodes on the tree path from `v` to the root, inclusive on both ends.
    pub fn path_to_root(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path
    }
}

/// Builds the breadth-first tree of `topology` rooted at `root`.
///
/// When a node has several neighbors one tier closer to the root, the lowest
/// node id becomes the parent, making construction deterministic.
pub fn build_bfs_tree(topology: &SwarmTopology, root: usize) -> BfsTree {
    let dist = bfs_distances(topology, root);
    let n = topology.num_nodes();
    let mut parent = vec![None; n];
    let mut depth = 0;
    for v in 0..n {
        debug_assert_ne!(dist[v], UNREACHABLE, "build_bfs_tree requires a connected graph");
        if v == root {
            continue;
        }
        // Neighbor lists are sorted, so the first neighbor one tier closer is
        // the lowest-id candidate.
        parent[v] = topology
            .neighbors(v)
            .iter()
            .copied()
            .find(|&u| dist[u] + 1 == dist[v]);
        depth = depth.max(dist[v]);
    }
    BfsTree {
        root,
        parent,
        tier: dist,
        depth,
    }
}

/// Toy swarm shared by module tests: node 0 is the graph center with two
/// depth-2 branches. Edges: 1-0, 1-2, 1-3, 4-0, 4-6, 5-6, 6-0, 7-0.
#[cfg(test)]
pub(crate) fn toy_topology() -> SwarmTopology {
    // Coordinates chosen so that range 100 yields exactly the edge list
    // above (verified by the edge-set assertion in `toy_edge_set`).
    let positions = vec![
        (0.0, 0.0),      // 0 = root candidate
        (95.0, 0.0),     // 1
        (175.0, 55.0),   // 2
        (175.0, -55.0),  // 3
        (-90.0, 20.0),   // 4
        (-115.0, 160.0), // 5
        (-50.0, 85.0),   // 6
        (0.0, -95.0),    // 7
    ];
    SwarmTopology::from_positions(positions, 100.0)
}

/// Deployment over a 400 m x 400 m area, dense enough that small swarms
/// come out connected within the default attempt budget.
#[cfg(test)]
pub(crate) fn dense_config(num_uavs: usize, rng_seed: u64) -> DeploymentConfig {
    DeploymentConfig {
        area_width: 400.0,
        area_height: 400.0,
        ..DeploymentConfig::new(num_uavs, rng_seed)
    }
}
