//! Acceptance suite: one test per release criterion, each printing a
//! `[acceptance] criterion N: PASS` line (run with `--nocapture` to see
//! them). Every tolerance is pinned here, not configurable.
//!
//! Criteria:
//! 1. Aggregation exactness, minimum delay, and minimum message count over
//!    200 random connected deployments spanning V in {10, 50, 100, 200, 400}
//!    at the reference geometry (1000 m x 1000 m, range 150 m, safety 5 m).
//! 2. Aggregation-tree structure on the same corpus: V-1 links, tree paths
//!    are shortest paths, tree depth equals the graph's minimum eccentricity.
//! 3. Root-choice delay ordering across sizes 20..100, paired per topology,
//!    with a strict win fraction of at least 30% against each baseline at
//!    V in {60, 80}.
//! 4. Message-overhead ratios at V = 400: proposed/SPF <= 0.40 and
//!    proposed/neighbor-broadcast <= 0.15, averaged over >= 5 seeds.
//! 5. Schedule-mediated FL equals the centralized reference every round
//!    (1e-9 relative), with non-increasing loss in >= 95% of rounds over 20
//!    seeds.
//! 6. Worked-example golden values.
//! 7. Byte-identical outputs for repeated CLI invocations.

use std::process::{Command, Output};
use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swarmcast_core::baselines::{
    neighbor_broadcast_overhead, root_centroid, root_random, spf_overhead,
};
use swarmcast_core::schedule::build_schedule;
use swarmcast_core::seed::derive_seed;
use swarmcast_core::simcore::{run_round, ModelVector, NodeState};
use swarmcast_core::topology::{
    build_bfs_tree, generate_deployment, select_root, DeploymentConfig, SwarmTopology,
};

const REL_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Independent oracles (no library traversal/aggregation code).
// ---------------------------------------------------------------------------

fn oracle_bfs(topology: &SwarmTopology, source: usize) -> Vec<usize> {
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
    assert!(dist.iter().all(|&d| d != usize::MAX), "disconnected topology");
    dist
}

fn oracle_eccentricities(topology: &SwarmTopology) -> Vec<usize> {
    (0..topology.num_nodes())
        .map(|v| *oracle_bfs(topology, v).iter().max().unwrap())
        .collect()
}

fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Shared corpus for criteria 1 and 2.
// ---------------------------------------------------------------------------

struct CorpusEntry {
    topology: SwarmTopology,
    /// Oracle eccentricity of every node.
    eccentricities: Vec<usize>,
    /// Oracle minimum eccentricity (graph radius).
    radius: usize,
}

/// (size, topologies to collect, placement budget). 200 total. Sparse sizes
/// need large budgets: uniform placements of 10 UAVs at the reference
/// density connect only about once in a few hundred thousand draws.
const CORPUS_SPEC: [(usize, usize, usize); 5] = [
    (10, 24, 1_000_000),
    (50, 44, 100_000),
    (100, 44, 10_000),
    (200, 44, 10_000),
    (400, 44, 10_000),
];

fn reference_corpus() -> &'static [CorpusEntry] {
    static CORPUS: OnceLock<Vec<CorpusEntry>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut corpus = Vec::new();
        for &(size, count, budget) in &CORPUS_SPEC {
            let mut collected = 0;
            let mut trial = 0u64;
            while collected < count {
                assert!(
                    trial < count as u64 + 16,
                    "could not collect {} connected size-{} deployments",
                    count,
                    size
                );
                let config = DeploymentConfig {
                    max_attempts: budget,
                    ..DeploymentConfig::new(size, derive_seed(0xACC0, size as u64, trial))
                };
                trial += 1;
                let topology = match generate_deployment(&config) {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                let eccentricities = oracle_eccentricities(&topology);
                let radius = *eccentricities.iter().min().unwrap();
                corpus.push(CorpusEntry {
                    topology,
                    eccentricities,
                    radius,
                });
                collected += 1;
            }
        }
        assert!(corpus.len() >= 200);
        corpus
    })
}

#[test]
fn criterion_1_aggregation_delay_and_overhead_optimality() {
    let corpus = reference_corpus();
    assert!(corpus.len() >= 200, "corpus spans at least 200 topologies");
    let mut worst_rel = 0.0f64;
    for (idx, entry) in corpus.iter().enumerate() {
        let topo = &entry.topology;
        let n = topo.num_nodes();
        let root = select_root(topo);
        let tree = build_bfs_tree(topo, root);
        let schedule = build_schedule(&tree);

        // Random weights summing to 1 and random 16-dim models.
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(0xACC1, idx as u64, n as u64));
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.into_iter().map(|w| w / total).collect();
        let models: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..16).map(|_| rng.random_range(-10.0..10.0)).collect())
            .collect();

        let mut states: Vec<NodeState> = (0..n)
            .map(|v| NodeState::new(v, weights[v], ModelVector::new(v, models[v].clone())))
            .collect();
        let result = run_round(&tree, &schedule, &mut states, 1.0).unwrap();

        // Exactness: equal to the direct weighted sum, componentwise.
        let mut direct = vec![0.0; 16];
        for v in 0..n {
            for (acc, x) in direct.iter_mut().zip(&models[v]) {
                *acc += weights[v] * x;
            }
        }
        let rel = max_rel_err(result.global_model.values(), &direct);
        assert!(rel < REL_TOL, "aggregate mismatch on topology {}: rel err {}", idx, rel);
        worst_rel = worst_rel.max(rel);

        // Minimum delay: equal to the graph's minimum eccentricity, which
        // no other root choice could beat.
        assert_eq!(result.delay_slots, entry.radius, "delay not minimal on topology {}", idx);
        assert!(entry.eccentricities.iter().all(|&e| entry.radius <= e));

        // Minimum overhead: exactly V - 1 messages, one send per non-root
        // node.
        assert_eq!(result.messages_sent, n - 1, "message count not minimal on topology {}", idx);
        let mut senders: Vec<usize> = result.transcript.iter().map(|e| e.sender).collect();
        senders.sort_unstable();
        senders.dedup();
        assert_eq!(senders.len(), n - 1);
        assert!(!senders.contains(&root));
    }
    println!(
        "[acceptance] criterion 1 (aggregation exact, delay = min eccentricity, messages = V-1): \
         PASS over {} topologies, worst aggregate rel err {:.2e}",
        corpus.len(),
        worst_rel
    );
}

#[test]
fn criterion_2_aggregation_tree_structure() {
    let corpus = reference_corpus();
    for (idx, entry) in corpus.iter().enumerate() {
        let topo = &entry.topology;
        let n = topo.num_nodes();
        let root = select_root(topo);
        let tree = build_bfs_tree(topo, root);
        let dist = oracle_bfs(topo, root);

        let links = (0..n).filter(|&v| tree.parent(v).is_some()).count();
        assert_eq!(links, n - 1, "tree edge count violated on topology {}", idx);
        for v in 0..n {
            assert_eq!(
                tree.path_to_root(v).len(),
                dist[v] + 1,
                "tree path for node {} on topology {} is not shortest",
                v,
                idx
            );
            if let Some(p) = tree.parent(v) {
                assert!(topo.has_edge(v, p));
            }
        }
        assert_eq!(tree.depth(), entry.radius, "depth violated on topology {}", idx);
    }
    println!(
        "[acceptance] criterion 2 (tree: V-1 links, shortest paths, depth = min eccentricity): \
         PASS over {} topologies",
        corpus.len()
    );
}

#[test]
fn criterion_3_root_choice_delay_ordering() {
    // 800 m x 800 m keeps every size in this sweep feasible to place as a
    // connected uniform deployment; at the 1000 m reference geometry, sizes
    // 20-40 essentially never connect.
    let sizes = [20usize, 40, 60, 80, 100];
    let trials = 40u64;
    let mut strict_focus: Vec<(usize, f64, f64)> = Vec::new();
    for &size in &sizes {
        let mut strict_centroid = 0usize;
        let mut strict_random = 0usize;
        for trial in 0..trials {
            let config = DeploymentConfig {
                area_width: 800.0,
                area_height: 800.0,
                max_attempts: 200_000,
                ..DeploymentConfig::new(size, derive_seed(0xACC3, size as u64, trial))
            };
            let topo = generate_deployment(&config).unwrap();
            let eccs = oracle_eccentricities(&topo);
            let proposed = eccs[select_root(&topo)];
            let centroid = eccs[root_centroid(&topo)];
            let random = eccs[root_random(&topo, derive_seed(0xACC3 ^ 0xff, size as u64, trial))];

            assert!(proposed <= centroid, "V={} trial {}: centroid beat the proposed root", size, trial);
            assert!(proposed <= random, "V={} trial {}: random beat the proposed root", size, trial);
            if proposed < centroid {
                strict_centroid += 1;
            }
            if proposed < random {
                strict_random += 1;
            }
        }
        if size == 60 || size == 80 {
            let fc = strict_centroid as f64 / trials as f64;
            let fr = strict_random as f64 / trials as f64;
            assert!(fc >= 0.30, "V={}: strict improvement vs centroid only {:.0}%", size, fc * 100.0);
            assert!(fr >= 0.30, "V={}: strict improvement vs random only {:.0}%", size, fr * 100.0);
            strict_focus.push((size, fc, fr));
        }
    }
    println!(
        "[acceptance] criterion 3 (proposed root never worse, strict gap >= 30% at 60/80): PASS \
         (strict vs centroid/random: {})",
        strict_focus
            .iter()
            .map(|(v, fc, fr)| format!("V={}: {:.0}%/{:.0}%", v, fc * 100.0, fr * 100.0))
            .collect::<Vec<_>>()
            .join(", ")
    );
}

#[test]
fn criterion_4_overhead_ratios_at_400_uavs() {
    let seeds = 6u64;
    let mut spf_ratios = Vec::new();
    let mut nb_ratios = Vec::new();
    for trial in 0..seeds {
        let config = DeploymentConfig {
            max_attempts: 10_000,
            ..DeploymentConfig::new(400, derive_seed(0xACC4, 400, trial))
        };
        let topo = generate_deployment(&config).unwrap();
        let root = select_root(&topo);
        let proposed = (topo.num_nodes() - 1) as f64;
        let spf = spf_overhead(&topo, root).messages_sent as f64;
        let radius = *oracle_eccentricities(&topo).iter().min().unwrap();
        let nb = neighbor_broadcast_overhead(&topo, radius.max(1)).messages_sent as f64;
        spf_ratios.push(proposed / spf);
        nb_ratios.push(proposed / nb);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let spf_mean = mean(&spf_ratios);
    let nb_mean = mean(&nb_ratios);
    assert!(spf_mean <= 0.40, "proposed/SPF ratio {:.3} exceeds 0.40", spf_mean);
    assert!(nb_mean <= 0.15, "proposed/neighbor-broadcast ratio {:.3} exceeds 0.15", nb_mean);
    println!(
        "[acceptance] criterion 4 (overhead ratios at V=400 over {} seeds): PASS \
         (proposed/SPF {:.3} <= 0.40, proposed/neighbor-broadcast {:.4} <= 0.15)",
        seeds, spf_mean, nb_mean
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: FL equivalence against a centralized reference.
// ---------------------------------------------------------------------------

use swarmcast_core::flmodel::{
    make_synthetic_problems, run_fl_experiment, weights_from_sizes, DataSplit, FlConfig,
    LocalProblem,
};

/// Independently coded SGD sharing only the seed contract.
fn oracle_sgd(problem: &LocalProblem, start: &[f64], config: &FlConfig, round: usize) -> Vec<f64> {
    let n = problem.data_size;
    let d = problem.dim;
    let mut w = start.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(config.training_stream_seed(round, problem.node));
    for _ in 0..config.local_iterations {
        let batch: Vec<usize> = if config.batch_size >= n {
            (0..n).collect()
        } else {
            (0..config.batch_size).map(|_| rng.random_range(0..n)).collect()
        };
        let scale = config.learning_rate * 2.0 / batch.len() as f64;
        let mut step = vec![0.0; d];
        for &i in &batch {
            let row = &problem.design[i * d..(i + 1) * d];
            let residual = row.iter().zip(&w).map(|(a, x)| a * x).sum::<f64>() - problem.targets[i];
            for (s, a) in step.iter_mut().zip(row) {
                *s += residual * a;
            }
        }
        for (wk, s) in w.iter_mut().zip(&step) {
            *wk -= scale * s;
        }
    }
    w
}

#[test]
fn criterion_5_fl_matches_the_centralized_reference() {
    // Per-round model equivalence, IID and non-IID.
    let mut worst_rel = 0.0f64;
    for (mode, seed) in [(DataSplit::Iid, 0xACC5u64), (DataSplit::NonIid, 0xACC6u64)] {
        let deployment = DeploymentConfig {
            max_attempts: 100_000,
            ..DeploymentConfig::new(50, seed)
        };
        let topology = generate_deployment(&deployment).unwrap();
        let config = FlConfig {
            split: mode,
            ..FlConfig::new(8, seed)
        };
        let problems = make_synthetic_problems(50, &config);
        let weights =
            weights_from_sizes(&problems.iter().map(|p| p.data_size).collect::<Vec<_>>());
        let history = run_fl_experiment(&topology, &problems, &config).unwrap();
        assert_eq!(history.records.len(), 20);

        let mut prev = vec![0.0; config.dim];
        for record in &history.records {
            let mut reference = vec![0.0; config.dim];
            for (v, problem) in problems.iter().enumerate() {
                let local = oracle_sgd(problem, &prev, &config, record.round);
                for (acc, x) in reference.iter_mut().zip(&local) {
                    *acc += weights[v] * x;
                }
            }
            let rel = max_rel_err(record.global_model.values(), &reference);
            assert!(rel < REL_TOL, "{:?} round {}: rel err {}", mode, record.round, rel);
            worst_rel = worst_rel.max(rel);
            prev = record.global_model.values().to_vec();
        }
    }

    // Loss monotonicity pooled over 20 seeds.
    let mut total = 0usize;
    let mut non_increasing = 0usize;
    for seed in 0..20u64 {
        let deployment = DeploymentConfig {
            max_attempts: 100_000,
            ..DeploymentConfig::new(50, derive_seed(0xACC7, seed, 0))
        };
        let topology = generate_deployment(&deployment).unwrap();
        let split = if seed % 2 == 0 { DataSplit::Iid } else { DataSplit::NonIid };
        let config = FlConfig {
            split,
            ..FlConfig::new(8, seed)
        };
        let problems = make_synthetic_problems(50, &config);
        let history = run_fl_experiment(&topology, &problems, &config).unwrap();
        for pair in history.records.windows(2) {
            total += 1;
            if pair[1].global_loss <= pair[0].global_loss {
                non_increasing += 1;
            }
        }
    }
    let fraction = non_increasing as f64 / total as f64;
    assert!(fraction >= 0.95, "loss non-increasing in only {:.1}% of rounds", fraction * 100.0);
    println!(
        "[acceptance] criterion 5 (FL equals centralized reference, loss non-increasing): PASS \
         (worst round rel err {:.2e}, non-increasing {:.1}% of {} rounds over 20 seeds)",
        worst_rel,
        fraction * 100.0,
        total
    );
}

#[test]
fn criterion_6_worked_example_golden_values() {
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
    let topo = SwarmTopology::from_positions(positions, 100.0);
    assert_eq!(topo.num_nodes(), 8);
    assert_eq!(topo.num_edges(), 8);

    let root = select_root(&topo);
    assert_eq!(root, 0);
    assert_eq!(oracle_eccentricities(&topo)[root], 2);

    let tree = build_bfs_tree(&topo, root);
    let schedule = build_schedule(&tree);
    assert_eq!(
        schedule.dump(),
        "slot 1: 2->1, 3->1, 5->6\nslot 2: 1->0, 4->0, 6->0, 7->0\n"
    );

    let mut states: Vec<NodeState> = (0..8)
        .map(|v| NodeState::new(v, 1.0, ModelVector::new(v, vec![v as f64])))
        .collect();
    let result = run_round(&tree, &schedule, &mut states, 1.0).unwrap();
    assert_eq!(result.global_model.values(), &[28.0]);
    assert_eq!(result.delay_slots, 2);
    assert_eq!(result.messages_sent, 7);
    assert_eq!(spf_overhead(&topo, root).messages_sent, 10);

    println!(
        "[acceptance] criterion 6 (worked example: root 0, ecc 2, two-slot schedule, 7 messages, \
         SPF 10, sum 28): PASS"
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: CLI determinism.
// ---------------------------------------------------------------------------

fn swarmcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swarmcast"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> Vec<u8> {
    let output = swarmcast(args);
    assert!(
        output.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&output.stderr)
    );
    output.stdout
}

#[test]
fn criterion_7_cli_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();

    // Experiment sweep CSV.
    let sweep = ["run", "--sizes", "25,40", "--trials", "3", "--area", "600", "--seed", "17"];
    assert_eq!(run_ok(&sweep), run_ok(&sweep));

    // Topology generation, then a full round transcript over it.
    let topo = dir.path().join("det.txt");
    let generate = [
        "generate", "--uavs", "40", "--area", "600", "--seed", "9",
        "--out", topo.to_str().unwrap(),
    ];
    run_ok(&generate);
    let first = std::fs::read(&topo).unwrap();
    run_ok(&generate);
    assert_eq!(first, std::fs::read(&topo).unwrap());
    let simulate = ["inspect", topo.to_str().unwrap(), "simulate"];
    assert_eq!(run_ok(&simulate), run_ok(&simulate));

    // FL history CSV.
    let fl = ["fl", "--uavs", "12", "--area", "400", "--rounds", "5", "--seed", "3"];
    assert_eq!(run_ok(&fl), run_ok(&fl));

    println!("[acceptance] criterion 7 (repeated commands byte-identical): PASS");
}
