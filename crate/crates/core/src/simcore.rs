//! Deterministic slot-by-slot execution of one aggregation round.
//!
//! Every node runs the same per-slot action: outside its designated slot it
//! does nothing; in its designated slot it folds the aggregates received from
//! its scheduled senders into its own weighted local model and transmits the
//! result to its tree parent. After the final slot the root folds in the
//! tier-1 aggregates and its own model, yielding the global model.
//!
//! All slot-`t` transmissions deliver exactly at the slot boundary; there is
//! no loss, reordering, or retransmission. Within a slot, node actions read
//! only their own state and their inbox frozen at the previous boundary, so
//! results do not depend on intra-slot execution order.

use crate::schedule::Schedule;
use crate::topology::BfsTree;
use thiserror::Error;

/// Fixed per-message framing overhead used for byte accounting in reports.
pub const MESSAGE_HEADER_BYTES: usize = 32;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("node {node}: model dimension {found} does not match expected {expected}")]
    DimensionMismatch {
        node: usize,
        expected: usize,
        found: usize,
    },
    #[error("node {node} reached its designated slot {slot} without the update from node {missing}")]
    MissingUpdate {
        node: usize,
        slot: usize,
        missing: usize,
    },
    #[error("node weights must all be 1 (unweighted mode) or sum to 1, got sum {sum}")]
    InvalidWeights { sum: f64 },
    #[error("node {node} holds a non-finite model parameter")]
    NonFiniteModel { node: usize },
}

/// A flat real-valued model parameter vector tagged with the node that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelVector {
    owner: usize,
    values: Vec<f64>,
}

impl ModelVector {
    pub fn new(owner: usize, values: Vec<f64>) -> Self {
        ModelVector { owner, values }
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Per-node state for one aggregation round.
#[derive(Debug, Clone)]
pub struct NodeState {
    id: usize,
    /// Aggregation weight for this node's local model.
    weight: f64,
    local_model: ModelVector,
    /// The locally aggregated model, set once the node's designated slot has
    /// run (for the root: the global model, set after the final slot).
    aggregate: Option<ModelVector>,
    /// Senders whose aggregates were folded in, ascending.
    received_from: Vec<usize>,
    has_sent: bool,
}

impl NodeState {
    pub fn new(id: usize, weight: f64, local_model: ModelVector) -> Self {
        NodeState {
            id,
            weight,
            local_model,
            aggregate: None,
            received_from: Vec::new(),
            has_sent: false,
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn local_model(&self) -> &ModelVector {
        &self.local_model
    }

    pub fn aggregate(&self) -> Option<&ModelVector> {
        self.aggregate.as_ref()
    }

    pub fn received_from(&self) -> &[usize] {
        &self.received_from
    }

    pub fn has_sent(&self) -> bool {
        self.has_sent
    }
}

/// One delivered transmission, as recorded in the round transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub slot: usize,
    pub sender: usize,
    pub receiver: usize,
    /// Payload dimension (model parameter count).
    pub dim: usize,
}

/// Outcome of one aggregation round.
#[derive(Debug, Clone)]
pub struct RoundResult {
    /// Slots consumed by the round, equal to the schedule length.
    pub delay_slots: usize,
    /// Reporting multiplier: seconds per slot.
    pub slot_duration: f64,
    /// Transmissions that actually fired.
    pub messages_sent: usize,
    /// The root's final aggregate.
    pub global_model: ModelVector,
    /// Delivered transmissions sorted by (slot, sender).
    pub transcript: Vec<TranscriptEntry>,
}

impl RoundResult {
    pub fn delay_seconds(&self) -> f64 {
        self.delay_slots as f64 * self.slot_duration
    }

    /// Bytes moved over the air: per message, 8 bytes per model parameter
    /// plus a fixed header. Reporting only; never part of optimality claims.
    pub fn bytes_transferred(&self) -> usize {
        self.transcript
            .iter()
            .map(|e| e.dim * 8 + MESSAGE_HEADER_BYTES)
            .sum()
    }

    /// Text dump: `t=<slot> <sender>-><receiver> dim=<d>` per delivered
    /// message, sorted by (slot, sender).
    pub fn transcript_dump(&self) -> String {
        let mut out = String::new();
        for e in &self.transcript {
            out.push_str(&format!("t={} {}->{} dim={}\n", e.slot, e.sender, e.receiver, e.dim));
        }
        out
    }
}

/// Folds `weight * local` plus the payloads of `inbox` senders listed in
/// `senders` (ascending) into a fresh vector. Summation order is fixed:
/// sender aggregates first in ascending id order, own weighted model last.
fn fold_aggregate(
    node: usize,
    weight: f64,
    local: &ModelVector,
    senders: &[usize],
    inbox: &[(usize, ModelVector)],
    slot: usize,
) -> Result<(ModelVector, Vec<usize>), SimError> {
    let dim = local.dim();
    let mut acc = vec![0.0; dim];
    let mut folded = Vec::with_capacity(senders.len());
    for &u in senders {
        let payload = inbox
            .iter()
            .find(|(s, _)| *s == u)
            .map(|(_, m)| m)
            .ok_or(SimError::MissingUpdate {
                node,
                slot,
                missing: u,
            })?;
        if payload.dim() != dim {
            return Err(SimError::DimensionMismatch {
                node,
                expected: dim,
                found: payload.dim(),
            });
        }
        for (a, v) in acc.iter_mut().zip(payload.values()) {
            *a += v;
        }
        folded.push(u);
    }
    for (a, v) in acc.iter_mut().zip(local.values()) {
        *a += weight * v;
    }
    Ok((ModelVector::new(node, acc), folded))
}

/// The per-slot action of a single node.
///
/// Returns `Ok(None)` unless `t` is the node's designated slot. In its
/// designated slot the node reads the senders scheduled into it at slot
/// `t - 1` (empty for `t = 1`), folds their payloads with its own weighted
/// model, and returns the single transmission the slot-`t` matrix assigns
/// it. The root has no designated slot and never transmits.
pub fn node_action(
    state: &mut NodeState,
    t: usize,
    schedule: &Schedule,
    inbox: &[(usize, ModelVector)],
) -> Result<Option<(usize, ModelVector)>, SimError> {
    let tier = schedule
        .tiers
        .iter()
        .position(|set| set.binary_search(&state.id).is_ok())
        .expect("node id present in tier partition");
    if schedule.designated_slot(tier) != Some(t) {
        return Ok(None);
    }

    let senders = schedule.senders_to(state.id, t - 1);
    let (aggregate, folded) =
        fold_aggregate(state.id, state.weight, &state.local_model, &senders, inbox, t)?;
    state.received_from = folded;
    state.aggregate = Some(aggregate.clone());

    let receiver = schedule.slots[t - 1]
        .transmissions
        .iter()
        .find(|&&(s, _)| s == state.id)
        .map(|&(_, r)| r);
    match receiver {
        Some(r) => {
            state.has_sent = true;
            Ok(Some((r, aggregate)))
        }
        // No one-valued entry for this node in its slot matrix: nothing is
        // sent, which a downstream MissingUpdate will surface.
        None => Ok(None),
    }
}

fn check_weights(states: &[NodeState]) -> Result<(), SimError> {
    if states.iter().all(|s| s.weight == 1.0) {
        return Ok(());
    }
    let sum: f64 = states.iter().map(|s| s.weight).sum();
    if states.iter().any(|s| s.weight < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(SimError::InvalidWeights { sum });
    }
    Ok(())
}

/// Runs one aggregation round over `schedule`, mutating `states` in place
/// (aggregates, reception records, send flags) and returning the result.
///
/// Expects one state per node, identical model dimensions, and weights that
/// are either all 1 (unweighted mode) or non-negative and summing to 1.
/// `slot_duration` scales the reported delay into seconds and nothing else.
pub fn run_round(
    tree: &BfsTree,
    schedule: &Schedule,
    states: &mut [NodeState],
    slot_duration: f64,
) -> Result<RoundResult, SimError> {
    let n = tree.num_nodes();
    assert_eq!(states.len(), n, "one NodeState per node");
    let dim = states[0].local_model.dim();
    for state in states.iter() {
        if state.local_model.dim() != dim {
            return Err(SimError::DimensionMismatch {
                node: state.id,
                expected: dim,
                found: state.local_model.dim(),
            });
        }
        if !state.local_model.is_finite() {
            return Err(SimError::NonFiniteModel { node: state.id });
        }
    }
    check_weights(states)?;

    let children = tree.children();
    let mut inboxes: Vec<Vec<(usize, ModelVector)>> = vec![Vec::new(); n];
    let mut transcript = Vec::with_capacity(n.saturating_sub(1));

    for t in 1..=schedule.num_slots {
        let mut deliveries: Vec<(usize, usize, ModelVector)> = Vec::new();
        for v in 0..n {
            if schedule.designated_slot(tree.tier(v)) == Some(t) {
                // The corrupted-schedule signal: a node acting now must hold
                // every tree child's aggregate.
                for &c in &children[v] {
                    if !inboxes[v].iter().any(|(s, _)| *s == c) {
                        return Err(SimError::MissingUpdate {
                            node: v,
                            slot: t,
                            missing: c,
                        });
                    }
                }
            }
            let inbox = std::mem::take(&mut inboxes[v]);
            if let Some((receiver, payload)) = node_action(&mut states[v], t, schedule, &inbox)? {
                deliveries.push((v, receiver, payload));
            }
            inboxes[v] = inbox;
        }
        // Slot boundary: all slot-t payloads become visible at once.
        for (sender, receiver, payload) in deliveries {
            transcript.push(TranscriptEntry {
                slot: t,
                sender,
                receiver,
                dim: payload.dim(),
            });
            inboxes[receiver].push((sender, payload));
        }
    }

    // The root finalizes the global model after the last slot from the
    // tier-1 aggregates plus its own weighted model.
    let root = tree.root();
    let senders = schedule.senders_to(root, schedule.num_slots);
    for &c in &children[root] {
        if !inboxes[root].iter().any(|(s, _)| *s == c) {
            return Err(SimError::MissingUpdate {
                node: root,
                slot: schedule.num_slots,
                missing: c,
            });
        }
    }
    let (global, folded) = fold_aggregate(
        root,
        states[root].weight,
        &states[root].local_model,
        &senders,
        &inboxes[root],
        schedule.num_slots,
    )?;
    states[root].received_from = folded;
    states[root].aggregate = Some(global.clone());

    transcript.sort_by_key(|e| (e.slot, e.sender));
    Ok(RoundResult {
        delay_slots: schedule.num_slots,
        slot_duration,
        messages_sent: transcript.len(),
        global_model: global,
        transcript,
    })
}

/// Dissemination cost of one downlink pass: the root's global model floods
/// back down the tree, each parent forwarding to its children tier by tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BroadcastResult {
    pub slots: usize,
    pub messages: usize,
}

/// Reverse-tree flood of the global model: tier-`k` nodes receive at slot
/// `k`, so the pass takes `depth` slots and `V - 1` messages.
pub fn broadcast_global(tree: &BfsTree, global: &ModelVector) -> BroadcastResult {
    debug_assert!(global.is_finite());
    let children = tree.children();
    let mut frontier = vec![tree.root()];
    let mut slots = 0;
    let mut messages = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &v in &frontier {
            for &c in &children[v] {
                messages += 1;
                next.push(c);
            }
        }
        if next.is_empty() {
            break;
        }
        slots += 1;
        frontier = next;
    }
    BroadcastResult { slots, messages }
}
