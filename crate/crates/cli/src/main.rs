//! Command-line driver: topology generation and inspection, schedule
//! validation, paired scheme sweeps, and synthetic FL runs.

mod config;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use config::{parse_area, parse_file_config, parse_size_list, FileConfig};
use swarmcast_core::baselines::Scheme;
use swarmcast_core::experiment::{run_experiment, ExperimentPlan};
use swarmcast_core::flmodel::{
    encode_model, make_synthetic_problems, run_fl_experiment, DataSplit, FlConfig,
};
use swarmcast_core::schedule::{build_schedule, validate_schedule};
use swarmcast_core::simcore::{run_round, ModelVector, NodeState};
use swarmcast_core::topology::{
    build_bfs_tree, eccentricity, generate_deployment, select_root, DeploymentConfig,
    SwarmTopology,
};

#[derive(Parser)]
#[command(name = "swarmcast", version, about = "Minimum-delay, minimum-overhead convergecast scheduling for FL in UAV swarms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random connected deployment and write its topology file.
    Generate(GenerateArgs),
    /// Report on a topology file: chosen root, tree, schedule, or a
    /// simulated round.
    Inspect(InspectArgs),
    /// Build the schedule for a topology file and run the structural checks.
    Validate { file: PathBuf },
    /// Run a paired comparison sweep across swarm sizes and emit CSV.
    Run(RunArgs),
    /// Run the synthetic FL workload over a generated deployment and emit
    /// the per-round history CSV.
    Fl(FlArgs),
}

#[derive(Args)]
struct DeploymentArgs {
    /// Deployment area, meters: `1000` (square) or `1000x800`.
    #[arg(long, default_value = "1000")]
    area: String,
    /// Communication range, meters.
    #[arg(long, default_value_t = 150.0)]
    range: f64,
    /// Safety distance, meters.
    #[arg(long, default_value_t = 5.0)]
    safety: f64,
    /// Placement retry budget.
    #[arg(long, default_value_t = 1000)]
    attempts: usize,
}

impl DeploymentArgs {
    fn to_config(&self, num_uavs: usize, rng_seed: u64) -> Result<DeploymentConfig> {
        let (area_width, area_height) = parse_area(&self.area)?;
        Ok(DeploymentConfig {
            num_uavs,
            area_width,
            area_height,
            comm_range: self.range,
            safety_distance: self.safety,
            rng_seed,
            max_attempts: self.attempts,
        })
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Swarm size.
    #[arg(long)]
    uavs: usize,
    #[command(flatten)]
    deployment: DeploymentArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum InspectKind {
    Root,
    Tree,
    Schedule,
    Simulate,
}

#[derive(Args)]
struct InspectArgs {
    file: PathBuf,
    #[arg(value_enum)]
    kind: InspectKind,
}

#[derive(Args)]
struct RunArgs {
    /// Key=value config file mirroring these flags; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated swarm sizes, e.g. `20,40,60`.
    #[arg(long)]
    sizes: Option<String>,
    /// Trials per size.
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated schemes
    /// (proposed|spf|neighbor_broadcast|root_random|root_centroid).
    #[arg(long)]
    schemes: Option<String>,
    #[arg(long)]
    area: Option<String>,
    #[arg(long)]
    range: Option<f64>,
    #[arg(long)]
    safety: Option<f64>,
    /// Payload model dimension for byte accounting.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    attempts: Option<usize>,
    /// Output CSV file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlArgs {
    /// Swarm size. At the default geometry, sizes below ~80 need a larger
    /// --attempts budget to find a connected placement.
    #[arg(long, default_value_t = 100)]
    uavs: usize,
    #[command(flatten)]
    deployment: DeploymentArgs,
    #[arg(long, default_value_t = 20)]
    rounds: usize,
    /// Model dimension.
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// Local SGD iterations per round.
    #[arg(long, default_value_t = 5)]
    iters: usize,
    #[arg(long, default_value_t = 10)]
    batch: usize,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    /// Data split: iid or noniid.
    #[arg(long, default_value = "iid")]
    split: String,
    /// Base dataset size per node.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the final global model as a binary checkpoint.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {:#}", err);
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Inspect(args) => inspect(args),
        Command::Validate { file } => validate(&file),
        Command::Run(args) => run(args),
        Command::Fl(args) => fl(args),
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{}", content),
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<()> {
    let config = args.deployment.to_config(args.uavs, args.seed)?;
    let topology = generate_deployment(&config)?;
    write_output(args.out.as_deref(), &topology.to_text())
}

fn load_topology(path: &Path) -> Result<SwarmTopology> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let topology = SwarmTopology::from_text(&text)?;
    if !topology.is_connected() {
        bail!("{}: topology is not connected", path.display());
    }
    Ok(topology)
}

fn inspect(args: InspectArgs) -> Result<()> {
    let topology = load_topology(&args.file)?;
    let root = select_root(&topology);
    let tree = build_bfs_tree(&topology, root);
    match args.kind {
        InspectKind::Root => {
            println!("root: {}", root);
            println!("eccentricity: {}", eccentricity(&topology, root));
        }
        InspectKind::Tree => {
            println!("root: {}", root);
            for v in 0..topology.num_nodes() {
                match tree.parent(v) {
                    Some(p) => println!("node {}: parent {}, tier {}", v, p, tree.tier(v)),
                    None => println!("node {}: root, tier 0", v),
                }
            }
            println!("depth: {}", tree.depth());
        }
        InspectKind::Schedule => {
            print!("{}", build_schedule(&tree).dump());
        }
        InspectKind::Simulate => {
            let schedule = build_schedule(&tree);
            // Unweighted scalar models w_v = v: deterministic and easy to
            // check by hand against the schedule dump.
            let mut states: Vec<NodeState> = (0..topology.num_nodes())
                .map(|v| NodeState::new(v, 1.0, ModelVector::new(v, vec![v as f64])))
                .collect();
            let result = run_round(&tree, &schedule, &mut states, 1.0)?;
            print!("{}", result.transcript_dump());
            println!("delay_slots: {}", result.delay_slots);
            println!("messages: {}", result.messages_sent);
            println!("bytes: {}", result.bytes_transferred());
            let values: Vec<String> =
                result.global_model.values().iter().map(|v| v.to_string()).collect();
            println!("aggregate: [{}]", values.join(", "));
        }
    }
    Ok(())
}

fn validate(file: &Path) -> Result<()> {
    let topology = load_topology(file)?;
    let root = select_root(&topology);
    let tree = build_bfs_tree(&topology, root);
    let schedule = build_schedule(&tree);
    let report = validate_schedule(&schedule, &tree);
    for check in &report.checks {
        if check.passed {
            println!("ok {}", check.name);
        } else {
            println!("FAIL {}: {}", check.name, check.detail);
        }
    }
    if !report.passed() {
        bail!("schedule validation failed");
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_file_config(&text)?
        }
        None => FileConfig::default(),
    };

    let sizes = match args.sizes.as_deref() {
        Some(value) => parse_size_list(value)?,
        None => file
            .sizes
            .ok_or_else(|| anyhow!("--sizes (or a config file with sizes=) is required"))?,
    };
    let scheme_list = args.schemes.or(file.schemes);
    let schemes: Vec<Scheme> = match scheme_list.as_deref() {
        Some(value) => value
            .split(',')
            .map(|s| Scheme::from_str(s.trim()).map_err(|e| anyhow!(e)))
            .collect::<Result<_>>()?,
        None => Scheme::ALL.to_vec(),
    };
    let (area_width, area_height) =
        parse_area(args.area.as_deref().or(file.area.as_deref()).unwrap_or("1000"))?;

    let mut plan = ExperimentPlan::new(sizes, args.seed.or(file.seed).unwrap_or(0));
    plan.trials = args.trials.or(file.trials).unwrap_or(5);
    plan.schemes = schemes;
    plan.area_width = area_width;
    plan.area_height = area_height;
    plan.comm_range = args.range.or(file.range).unwrap_or(150.0);
    plan.safety_distance = args.safety.or(file.safety).unwrap_or(5.0);
    plan.model_dim = args.dim.or(file.dim).unwrap_or(16);
    plan.max_attempts = args.attempts.or(file.attempts).unwrap_or(1000);

    let output = run_experiment(&plan)?;
    for warning in &output.warnings {
        eprintln!("warning: {}", warning);
    }
    let out = args.out.or(file.out.map(PathBuf::from));
    write_output(out.as_deref(), &output.csv)
}

fn fl(args: FlArgs) -> Result<()> {
    let deployment = args.deployment.to_config(args.uavs, args.seed)?;
    let topology = generate_deployment(&deployment)?;
    let config = FlConfig {
        dim: args.dim,
        local_iterations: args.iters,
        batch_size: args.batch,
        learning_rate: args.lr,
        num_rounds: args.rounds,
        rng_seed: args.seed,
        split: DataSplit::from_str(&args.split).map_err(|e| anyhow!(e))?,
        samples_per_node: args.samples,
    };
    let problems = make_synthetic_problems(topology.num_nodes(), &config);
    let history = run_fl_experiment(&topology, &problems, &config)?;
    eprintln!(
        "fl: {} rounds, final loss {:.6}, {} messages per aggregation",
        history.records.len(),
        history.records.last().map(|r| r.global_loss).unwrap_or(f64::NAN),
        history.records.last().map(|r| r.messages).unwrap_or(0),
    );
    if let Some(path) = &args.checkpoint {
        fs::write(path, encode_model(history.final_model()))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    write_output(args.out.as_deref(), &history.to_csv())
}
