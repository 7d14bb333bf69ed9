//! Per-slot convergecast schedule built from the aggregation tree.
//!
//! Slot `t` (1-based) carries the transmissions of every tier-`(depth-t+1)`
//! node to its tree parent one tier closer to the root, so the deepest tier
//! transmits first and tier-1 nodes transmit last. Transmission matrices are
//! stored sparsely as `(sender, receiver)` pairs.

use crate::topology::BfsTree;

/// Transmissions scheduled into one time slot.
///
/// A pair `(i, j)` stands for a one-valued entry of the slot's transmission
/// matrix: node `i` sends its aggregate to node `j` during this slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmissionSlot {
    /// 1-based slot index `t`.
    pub slot_index: usize,
    /// `(sender, receiver)` pairs, sorted by sender id.
    pub transmissions: Vec<(usize, usize)>,
}

/// The full schedule for one aggregation round: `num_slots` transmission
/// slots plus the tier partition they were derived from.
///
/// Immutable after construction; a pure function of the tree, so rebuilding
/// from the same tree yields an identical schedule reusable across rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// Number of slots, equal to the tree depth.
    pub num_slots: usize,
    /// Slots indexed `t = 1..=num_slots` (element `t - 1`).
    pub slots: Vec<TransmissionSlot>,
    /// Tier partition: `tiers[k]` is the sorted set of nodes at hop
    /// distance `k` from the root.
    pub tiers: Vec<Vec<usize>>,
    pub root: usize,
}

impl Schedule {
    pub fn num_nodes(&self) -> usize {
        self.tiers.iter().map(Vec::len).sum()
    }

    pub fn total_transmissions(&self) -> usize {
        self.slots.iter().map(|s| s.transmissions.len()).sum()
    }

    /// The slot in which a tier-`k` node is designated to transmit
    /// (`num_slots - k + 1`), or `None` for the root tier.
    pub fn designated_slot(&self, tier: usize) -> Option<usize> {
        if tier == 0 {
            None
        } else {
            Some(self.num_slots - tier + 1)
        }
    }

    /// Senders scheduled to transmit into `receiver` during slot `t`.
    /// Empty for `t == 0`, which has no transmission matrix.
    pub fn senders_to(&self, receiver: usize, t: usize) -> Vec<usize> {
        if t == 0 || t > self.num_slots {
            return Vec::new();
        }
        self.slots[t - 1]
            .transmissions
            .iter()
            .filter(|&&(_, r)| r == receiver)
            .map(|&(s, _)| s)
            .collect()
    }

    /// Debug/golden-test dump: one `slot <t>: <sender>-><receiver>, ...` line
    /// per slot, pairs sorted by sender id.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for slot in &self.slots {
            let pairs: Vec<String> = slot
                .transmissions
                .iter()
                .map(|(s, r)| format!("{}->{}", s, r))
                .collect();
            out.push_str(&format!("slot {}: {}\n", slot.slot_index, pairs.join(", ")));
        }
        out
    }
}

/// Builds the transmission schedule for `tree`.
///
/// For each slot `t`, every node of tier `depth - t + 1` is paired with its
/// unique tree parent. A single-node tree yields the legal empty schedule
/// (zero slots).
pub fn build_schedule(tree: &BfsTree) -> Schedule {
    let num_slots = tree.depth();
    let tiers = tree.tier_sets();
    let mut slots = Vec::with_capacity(num_slots);
    for t in 1..=num_slots {
        let sending_tier = num_slots - t + 1;
        // Tier sets are sorted, so transmissions come out sorted by sender.
        let transmissions = tiers[sending_tier]
            .iter()
            .map(|&v| (v, tree.parent(v).expect("non-root node has a parent")))
            .collect();
        slots.push(TransmissionSlot {
            slot_index: t,
            transmissions,
        });
    }
    Schedule {
        num_slots,
        slots,
        tiers,
        root: tree.root(),
    }
}

/// Outcome of one structural check on a schedule.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Pass/fail report over all structural schedule invariants.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Checks `schedule` against `tree`: slot count equals tree depth, every
/// transmission is a parent link sent from the tier designated for its slot,
/// every non-root node sends exactly once, and the total equals `V - 1`.
/// Failures are report entries, never errors.
pub fn validate_schedule(schedule: &Schedule, tree: &BfsTree) -> ValidationReport {
    let mut checks = Vec::new();
    let n = tree.num_nodes();

    let depth_ok = schedule.num_slots == tree.depth() && schedule.slots.len() == schedule.num_slots;
    checks.push(CheckResult {
        name: "slot_count_equals_tree_depth",
        passed: depth_ok,
        detail: format!("num_slots={} tree depth={}", schedule.num_slots, tree.depth()),
    });

    let mut tier_ok = true;
    let mut tier_detail = String::from("every slot t carries tier depth-t+1 senders");
    for slot in &schedule.slots {
        let expected_tier = schedule.num_slots - slot.slot_index + 1;
        let senders: Vec<usize> = slot.transmissions.iter().map(|&(s, _)| s).collect();
        let expected: Vec<usize> = (0..n).filter(|&v| tree.tier(v) == expected_tier).collect();
        if senders != expected {
            tier_ok = false;
            tier_detail = format!(
                "slot {} senders {:?} != tier-{} nodes {:?}",
                slot.slot_index, senders, expected_tier, expected
            );
            break;
        }
    }
    checks.push(CheckResult {
        name: "tier_consistent_slots",
        passed: tier_ok,
        detail: tier_detail,
    });

    let mut send_counts = vec![0usize; n];
    for slot in &schedule.slots {
        for &(s, _) in &slot.transmissions {
            if s < n {
                send_counts[s] += 1;
            }
        }
    }
    let one_send_ok = (0..n).all(|v| {
        if v == tree.root() {
            send_counts[v] == 0
        } else {
            send_counts[v] == 1
        }
    });
    checks.push(CheckResult {
        name: "one_send_per_node",
        passed: one_send_ok,
        detail: format!(
            "root sends {} times; non-root send counts {:?}",
            send_counts[tree.root()],
            (0..n).filter(|&v| v != tree.root()).map(|v| send_counts[v]).collect::<Vec<_>>()
        ),
    });

    let mut tree_edge_ok = true;
    let mut tree_edge_detail = String::from("all transmissions follow parent links");
    'outer: for slot in &schedule.slots {
        for &(s, r) in &slot.transmissions {
            if s >= n || tree.parent(s) != Some(r) {
                tree_edge_ok = false;
                tree_edge_detail = format!("{}->{} in slot {} is not a parent link", s, r, slot.slot_index);
                break 'outer;
            }
        }
    }
    checks.push(CheckResult {
        name: "tree_edges_only",
        passed: tree_edge_ok,
        detail: tree_edge_detail,
    });

    let total = schedule.total_transmissions();
    checks.push(CheckResult {
        name: "total_transmissions_v_minus_1",
        passed: total == n - 1,
        detail: format!("total={} expected={}", total, n - 1),
    });

    ValidationReport { checks }
}
