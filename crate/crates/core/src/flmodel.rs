//! Synthetic federated-learning workload: convex least-squares local
//! objectives, seeded mini-batch SGD, and the full per-round loop of local
//! training, schedule-mediated aggregation, and global-model dissemination.
//!
//! The workload is deliberately simple enough to admit an exact centralized
//! reference computation, which the test suites compare against the
//! schedule-mediated path round by round.

use crate::schedule::build_schedule;
use crate::seed::derive_seed;
use crate::simcore::{broadcast_global, run_round, ModelVector, NodeState, SimError};
use crate::topology::{build_bfs_tree, select_root, SwarmTopology};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rand_distr::StandardNormal;
use thiserror::Error;

// Stream tags keeping data generation and per-round training draws disjoint.
const STREAM_DATA: u64 = 0x5744;
const STREAM_TRAIN: u64 = 0x5347;

#[derive(Debug, Error)]
pub enum FlError {
    #[error("node {node} diverged at round {round}: non-finite parameter (learning rate too large?)")]
    DivergenceDetected { node: usize, round: usize },
    #[error("invalid FL config: {0}")]
    InvalidConfig(String),
    #[error("malformed model checkpoint: {0}")]
    MalformedCheckpoint(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// How synthetic local datasets differ across nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataSplit {
    /// Same feature distribution and equal dataset sizes everywhere.
    Iid,
    /// Per-node feature mean shifts and unequal dataset sizes, so the
    /// aggregation weights come out unequal.
    NonIid,
}

impl std::str::FromStr for DataSplit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "iid" => Ok(DataSplit::Iid),
            "noniid" | "non-iid" => Ok(DataSplit::NonIid),
            other => Err(format!("unknown data split `{}` (expected iid|noniid)", other)),
        }
    }
}

/// Hyperparameters of the synthetic FL run.
#[derive(Debug, Clone)]
pub struct FlConfig {
    /// Model parameter count d.
    pub dim: usize,
    /// Mini-batch SGD steps per node per round.
    pub local_iterations: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub num_rounds: usize,
    pub rng_seed: u64,
    pub split: DataSplit,
    /// Base dataset size per node (scaled per node under `NonIid`).
    pub samples_per_node: usize,
}

impl FlConfig {
    pub fn new(dim: usize, rng_seed: u64) -> Self {
        FlConfig {
            dim,
            local_iterations: 5,
            batch_size: 10,
            learning_rate: 0.01,
            num_rounds: 20,
            rng_seed,
            split: DataSplit::Iid,
            samples_per_node: 100,
        }
    }

    /// Seed of the mini-batch sampling stream used by [`local_train`] for
    /// `(round, node)`. Part of the determinism contract: an external
    /// reimplementation drawing from a ChaCha8 stream seeded with this value
    /// reproduces the exact trajectory.
    pub fn training_stream_seed(&self, round: usize, node: usize) -> u64 {
        derive_seed(self.rng_seed, STREAM_TRAIN ^ round as u64, node as u64)
    }

    pub fn validate(&self) -> Result<(), FlError> {
        if self.dim == 0 {
            return Err(FlError::InvalidConfig("dim must be >= 1".into()));
        }
        if self.local_iterations == 0 {
            return Err(FlError::InvalidConfig("local_iterations must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(FlError::InvalidConfig("batch_size must be >= 1".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(FlError::InvalidConfig("learning_rate must be positive".into()));
        }
        if self.num_rounds == 0 {
            return Err(FlError::InvalidConfig("num_rounds must be >= 1".into()));
        }
        if self.samples_per_node == 0 {
            return Err(FlError::InvalidConfig("samples_per_node must be >= 1".into()));
        }
        Ok(())
    }
}

/// One node's local least-squares problem:
/// `F_v(w) = (1/n_v) * ||A_v w - b_v||^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalProblem {
    pub node: usize,
    /// Dataset size `n_v`; also the aggregation-weight numerator.
    pub data_size: usize,
    /// Design matrix, row-major `n_v x d`.
    pub design: Vec<f64>,
    pub targets: Vec<f64>,
    pub dim: usize,
}

impl LocalProblem {
    fn row(&self, i: usize) -> &[f64] {
        &self.design[i * self.dim..(i + 1) * self.dim]
    }

    /// Local objective value at `w`.
    pub fn loss(&self, w: &[f64]) -> f64 {
        let n = self.data_size;
        let mut total = 0.0;
        for i in 0..n {
            let r = dot(self.row(i), w) - self.targets[i];
            total += r * r;
        }
        total / n as f64
    }

    /// Gradient of the mean squared residual over the given rows:
    /// `(2/|rows|) * sum_i a_i (a_i . w - b_i)`.
    fn gradient_over(&self, w: &[f64], rows: &[usize]) -> Vec<f64> {
        let mut grad = vec![0.0; self.dim];
        for &i in rows {
            let r = dot(self.row(i), w) - self.targets[i];
            for (g, a) in grad.iter_mut().zip(self.row(i)) {
                *g += 2.0 * r * a;
            }
        }
        let scale = 1.0 / rows.len() as f64;
        for g in &mut grad {
            *g *= scale;
        }
        grad
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Aggregation weights from dataset sizes: `w_v = n_v / sum(n_u)`.
pub fn weights_from_sizes(sizes: &[usize]) -> Vec<f64> {
    let total: usize = sizes.iter().sum();
    assert!(total > 0, "total dataset size must be positive");
    sizes.iter().map(|&s| s as f64 / total as f64).collect()
}

/// Global objective `F(w) = sum_v weight_v * F_v(w)`.
pub fn global_loss(problems: &[LocalProblem], weights: &[f64], w: &[f64]) -> f64 {
    problems
        .iter()
        .zip(weights)
        .map(|(p, &lambda)| lambda * p.loss(w))
        .sum()
}

/// Runs the node's mini-batch SGD steps for one round, starting from
/// `start`.
///
/// Batches are drawn uniformly with replacement from a stream seeded by
/// `(config seed, round, node)`, so the trajectory is exactly reproducible.
/// A batch size at or above `n_v` selects the full dataset deterministically.
/// Returns `DivergenceDetected` if any parameter leaves the finite range.
pub fn local_train(
    problem: &LocalProblem,
    start: &ModelVector,
    config: &FlConfig,
    round: usize,
) -> Result<ModelVector, FlError> {
    assert_eq!(start.dim(), problem.dim, "start model dimension mismatch");
    let mut w = start.values().to_vec();
    let n = problem.data_size;
    let mut rng = ChaCha8Rng::seed_from_u64(config.training_stream_seed(round, problem.node));
    let full_batch: Vec<usize> = (0..n).collect();
    for _ in 0..config.local_iterations {
        let batch: Vec<usize> = if config.batch_size >= n {
            full_batch.clone()
        } else {
            (0..config.batch_size).map(|_| rng.random_range(0..n)).collect()
        };
        let grad = problem.gradient_over(&w, &batch);
        for (wi, gi) in w.iter_mut().zip(&grad) {
            *wi -= config.learning_rate * gi;
        }
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(FlError::DivergenceDetected {
            node: problem.node,
            round,
        });
    }
    Ok(ModelVector::new(problem.node, w))
}

/// Generates one least-squares problem per node around a shared ground-truth
/// parameter vector.
///
/// IID: every node draws standard-normal features and `samples_per_node`
/// rows. Non-IID: per-node feature mean shifts and dataset sizes scaled by a
/// `{1, 2, 3, 4} / 2` cycle, so aggregation weights are unequal. Each node's
/// data comes from its own derived stream; regeneration is byte-identical.
pub fn make_synthetic_problems(num_nodes: usize, config: &FlConfig) -> Vec<LocalProblem> {
    assert!(num_nodes >= 1);
    let d = config.dim;
    let mut truth_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.rng_seed, STREAM_DATA, u64::MAX));
    let truth: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut truth_rng)).collect();
    const NOISE_STD: f64 = 0.1;

    (0..num_nodes)
        .map(|v| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(config.rng_seed, STREAM_DATA, v as u64));
            let (size, shift) = match config.split {
                DataSplit::Iid => (config.samples_per_node, vec![0.0; d]),
                DataSplit::NonIid => {
                    let factor = (1 + v % 4) as f64 / 2.0;
                    let size = ((config.samples_per_node as f64 * factor) as usize).max(1);
                    let shift: Vec<f64> =
                        (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                    (size, shift)
                }
            };
            let mut design = Vec::with_capacity(size * d);
            let mut targets = Vec::with_capacity(size);
            for _ in 0..size {
                let row_start = design.len();
                for k in 0..d {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    design.push(shift[k] + z);
                }
                let noise: f64 = StandardNormal.sample(&mut rng);
                targets.push(dot(&design[row_start..], &truth) + NOISE_STD * noise);
            }
            LocalProblem {
                node: v,
                data_size: size,
                design,
                targets,
                dim: d,
            }
        })
        .collect()
}

/// Binary model checkpoint: a little-endian u64 element count followed by
/// each parameter as a little-endian f64.
pub fn encode_model(model: &ModelVector) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(8 + model.dim() * 8);
    bytes.extend_from_slice(&(model.dim() as u64).to_le_bytes());
    for v in model.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    bytes
}

/// Parses [`encode_model`] output back into a vector owned by `owner`.
pub fn decode_model(owner: usize, bytes: &[u8]) -> Result<ModelVector, FlError> {
    if bytes.len() < 8 {
        return Err(FlError::MalformedCheckpoint("missing length prefix".into()));
    }
    let dim = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
    let expected = 8 + dim * 8;
    if bytes.len() != expected {
        return Err(FlError::MalformedCheckpoint(format!(
            "expected {} bytes for {} parameters, found {}",
            expected,
            dim,
            bytes.len()
        )));
    }
    let values = bytes[8..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(ModelVector::new(owner, values))
}

/// One global round's record.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub round: usize,
    pub global_loss: f64,
    /// Aggregation (uplink) delay in slots.
    pub delay_slots: usize,
    /// Aggregation (uplink) messages.
    pub messages: usize,
    /// Dissemination (downlink) cost, counted but not optimized.
    pub broadcast_slots: usize,
    pub broadcast_messages: usize,
    pub global_model: ModelVector,
}

/// The full multi-round trajectory.
#[derive(Debug, Clone)]
pub struct FlHistory {
    pub records: Vec<RoundRecord>,
}

impl FlHistory {
    pub fn final_model(&self) -> &ModelVector {
        &self.records.last().expect("at least one round").global_model
    }

    /// CSV dump: `round,global_loss,delay_slots,messages` per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,global_loss,delay_slots,messages\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.round, r.global_loss, r.delay_slots, r.messages
            ));
        }
        out
    }
}

/// Runs the full synchronous FL loop over `topology`: each round trains all
/// nodes locally from the current global model, aggregates over the
/// convergecast schedule, floods the result back down, and records the
/// global loss.
///
/// The root, tree, and schedule are computed once and reused across rounds.
/// Aggregation weights derive from the problems' dataset sizes.
pub fn run_fl_experiment(
    topology: &SwarmTopology,
    problems: &[LocalProblem],
    config: &FlConfig,
) -> Result<FlHistory, FlError> {
    config.validate()?;
    assert_eq!(
        problems.len(),
        topology.num_nodes(),
        "one LocalProblem per node"
    );

    let root = select_root(topology);
    let tree = build_bfs_tree(topology, root);
    let schedule = build_schedule(&tree);
    let weights = weights_from_sizes(&problems.iter().map(|p| p.data_size).collect::<Vec<_>>());

    let mut global = ModelVector::new(root, vec![0.0; config.dim]);
    let mut records = Vec::with_capacity(config.num_rounds);
    for round in 1..=config.num_rounds {
        let mut states: Vec<NodeState> = Vec::with_capacity(problems.len());
        for (v, problem) in problems.iter().enumerate() {
            let local = local_train(problem, &global, config, round)?;
            states.push(NodeState::new(v, weights[v], local));
        }
        let result = run_round(&tree, &schedule, &mut states, 1.0)?;
        global = result.global_model.clone();
        let broadcast = broadcast_global(&tree, &global);
        records.push(RoundRecord {
            round,
            global_loss: global_loss(problems, &weights, global.values()),
            delay_slots: result.delay_slots,
            messages: result.messages_sent,
            broadcast_slots: broadcast.slots,
            broadcast_messages: broadcast.messages,
            global_model: global.clone(),
        });
    }
    Ok(FlHistory { records })
}
