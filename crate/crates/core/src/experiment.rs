//! Paired-comparison experiment driver: sweeps swarm sizes, evaluates every
//! requested scheme on the same per-trial topology, and emits deterministic
//! CSV.
//!
//! Row schema: `size,trial,scheme,root,eccentricity,delay_slots,messages,
//! bytes,topology_hash`. Detail rows carry the trial index; per-size mean
//! rows carry `mean` in the trial column and `-` in the root and hash
//! columns. The hash column is a 64-bit FNV-1a digest of the topology's text
//! form, so rows that share a topology are recognizable as paired.

use crate::baselines::{
    neighbor_broadcast_overhead, root_centroid, root_random, spf_overhead, Scheme,
};
use crate::schedule::build_schedule;
use crate::seed::derive_seed;
use crate::simcore::{run_round, ModelVector, NodeState, SimError, MESSAGE_HEADER_BYTES};
use crate::topology::{
    build_bfs_tree, eccentricity, generate_deployment, min_eccentricity, select_root,
    DeploymentConfig, SwarmTopology, TopologyError,
};
use thiserror::Error;

pub const CSV_HEADER: &str = "size,trial,scheme,root,eccentricity,delay_slots,messages,bytes,topology_hash";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A full sweep: which sizes and schemes to run, how many trials per size,
/// and the deployment geometry shared by all trials.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub schemes: Vec<Scheme>,
    pub area_width: f64,
    pub area_height: f64,
    pub comm_range: f64,
    pub safety_distance: f64,
    /// Payload dimension of the simulated model vectors (bytes column only).
    pub model_dim: usize,
    pub base_seed: u64,
    /// Placement retry budget per trial.
    pub max_attempts: usize,
}

impl ExperimentPlan {
    pub fn new(sizes: Vec<usize>, base_seed: u64) -> Self {
        ExperimentPlan {
            sizes,
            trials: 5,
            schemes: Scheme::ALL.to_vec(),
            area_width: 1000.0,
            area_height: 1000.0,
            comm_range: 150.0,
            safety_distance: 5.0,
            model_dim: 16,
            base_seed,
            max_attempts: 1000,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.sizes.is_empty() || self.sizes.iter().any(|&s| s < 1) {
            return Err(ExperimentError::InvalidPlan(
                "sizes must be non-empty and all >= 1".into(),
            ));
        }
        if self.trials < 1 {
            return Err(ExperimentError::InvalidPlan("trials must be >= 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(ExperimentError::InvalidPlan("at least one scheme".into()));
        }
        if self.model_dim < 1 {
            return Err(ExperimentError::InvalidPlan("model_dim must be >= 1".into()));
        }
        Ok(())
    }

    fn deployment(&self, size: usize, trial: usize) -> DeploymentConfig {
        DeploymentConfig {
            num_uavs: size,
            area_width: self.area_width,
            area_height: self.area_height,
            comm_range: self.comm_range,
            safety_distance: self.safety_distance,
            rng_seed: trial_seed(self.base_seed, size, trial),
            max_attempts: self.max_attempts,
        }
    }
}

/// Seed for the topology of `(size, trial)`, mixed from the base seed so
/// that every combination lands on its own stream.
pub fn trial_seed(base_seed: u64, size: usize, trial: usize) -> u64 {
    derive_seed(base_seed, size as u64, trial as u64)
}

/// FNV-1a 64-bit digest of the topology's canonical text form, hex encoded.
pub fn topology_hash(topology: &SwarmTopology) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in topology.to_text().bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{:016x}", hash)
}

/// One scheme evaluated on one topology.
#[derive(Debug, Clone)]
pub struct SchemeRow {
    pub size: usize,
    pub trial: usize,
    pub scheme: Scheme,
    pub root: usize,
    pub eccentricity: usize,
    pub delay_slots: usize,
    pub messages: usize,
    pub bytes: usize,
    pub topology_hash: String,
}

/// CSV text plus any per-trial warnings (skipped placements).
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub csv: String,
    pub warnings: Vec<String>,
}

fn message_bytes(messages: usize, dim: usize) -> usize {
    messages * (dim * 8 + MESSAGE_HEADER_BYTES)
}

/// Evaluates one scheme on a fixed topology. The proposed scheme actually
/// runs the slot simulation; root baselines rerun it under their root
/// choice; overhead baselines use their closed-form counting.
pub fn evaluate_scheme(
    topology: &SwarmTopology,
    scheme: Scheme,
    size: usize,
    trial: usize,
    plan: &ExperimentPlan,
) -> Result<SchemeRow, ExperimentError> {
    let hash = topology_hash(topology);
    let dim = plan.model_dim;
    let proposed_root = select_root(topology);
    let make_row = |root, ecc, delay, messages| SchemeRow {
        size,
        trial,
        scheme,
        root,
        eccentricity: ecc,
        delay_slots: delay,
        messages,
        bytes: message_bytes(messages, dim),
        topology_hash: hash.clone(),
    };

    let simulate_at_root = |root: usize| -> Result<(usize, usize), ExperimentError> {
        let tree = build_bfs_tree(topology, root);
        let schedule = build_schedule(&tree);
        let mut states: Vec<NodeState> = (0..topology.num_nodes())
            .map(|v| NodeState::new(v, 1.0, ModelVector::new(v, vec![v as f64; dim])))
            .collect();
        let result = run_round(&tree, &schedule, &mut states, 1.0)?;
        Ok((result.delay_slots, result.messages_sent))
    };

    let row = match scheme {
        Scheme::Proposed => {
            let (delay, messages) = simulate_at_root(proposed_root)?;
            make_row(proposed_root, eccentricity(topology, proposed_root), delay, messages)
        }
        Scheme::Spf => {
            let result = spf_overhead(topology, proposed_root);
            make_row(
                proposed_root,
                eccentricity(topology, proposed_root),
                result.delay_slots,
                result.messages_sent,
            )
        }
        Scheme::NeighborBroadcast => {
            // Rounds default to the minimum graph eccentricity: the fewest
            // broadcast rounds that let the farthest pair's information mix.
            let rounds = min_eccentricity(topology).max(1);
            let result = neighbor_broadcast_overhead(topology, rounds);
            make_row(
                proposed_root,
                eccentricity(topology, proposed_root),
                result.delay_slots,
                result.messages_sent,
            )
        }
        Scheme::RootRandom => {
            // Drawn from a stream distinct from the deployment's.
            let root = root_random(topology, derive_seed(plan.base_seed ^ 0x726f6f74, size as u64, trial as u64));
            let (delay, messages) = simulate_at_root(root)?;
            make_row(root, eccentricity(topology, root), delay, messages)
        }
        Scheme::RootCentroid => {
            let root = root_centroid(topology);
            let (delay, messages) = simulate_at_root(root)?;
            make_row(root, eccentricity(topology, root), delay, messages)
        }
    };
    Ok(row)
}

fn detail_line(row: &SchemeRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        row.size,
        row.trial,
        row.scheme,
        row.root,
        row.eccentricity,
        row.delay_slots,
        row.messages,
        row.bytes,
        row.topology_hash
    )
}

fn mean_line(size: usize, scheme: Scheme, rows: &[&SchemeRow]) -> String {
    let n = rows.len() as f64;
    let mean = |f: fn(&SchemeRow) -> usize| rows.iter().map(|r| f(r) as f64).sum::<f64>() / n;
    format!(
        "{},mean,{},-,{:.3},{:.3},{:.3},{:.3},-",
        size,
        scheme,
        mean(|r| r.eccentricity),
        mean(|r| r.delay_slots),
        mean(|r| r.messages),
        mean(|r| r.bytes)
    )
}

/// Runs the whole sweep. For each `(size, trial)` one topology is generated
/// and every requested scheme is evaluated on it; per-size mean rows follow
/// each size's detail rows. Trials whose placement fails are skipped with a
/// warning. Output is deterministic end to end for a fixed plan.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentOutput, ExperimentError> {
    plan.validate()?;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut warnings = Vec::new();

    for &size in &plan.sizes {
        let mut size_rows: Vec<SchemeRow> = Vec::new();
        for trial in 0..plan.trials {
            let topology = match generate_deployment(&plan.deployment(size, trial)) {
                Ok(t) => t,
                Err(e @ TopologyError::PlacementFailure { .. }) => {
                    warnings.push(format!("size {} trial {}: skipped ({})", size, trial, e));
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            for &scheme in &plan.schemes {
                size_rows.push(evaluate_scheme(&topology, scheme, size, trial, plan)?);
            }
        }
        for row in &size_rows {
            csv.push_str(&detail_line(row));
            csv.push('\n');
        }
        for &scheme in &plan.schemes {
            let scheme_rows: Vec<&SchemeRow> =
                size_rows.iter().filter(|r| r.scheme == scheme).collect();
            if !scheme_rows.is_empty() {
                csv.push_str(&mean_line(size, scheme, &scheme_rows));
                csv.push('\n');
            }
        }
    }
    Ok(ExperimentOutput { csv, warnings })
}
