//! Command-line interface: scenario validation, single runs, the
//! factorial suite, and the bundled two-server golden check.
//!
//! Exit codes: 0 success, 1 failed check or failed run, 2 usage or
//! parse error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::experiment::{run_factorial, ExperimentConfig, ExperimentError};
use crate::scenario::{builtin_paper_topology, builtin_toy, validate, Scenario, ScenarioError};
use crate::sim::{simulate, RunReport};
use crate::strategy::Strategy;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const SEED_ENV_VAR: &str = "CONTINUUM_SIM_SEED";
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "continuum-sim",
    version,
    about = "Deterministic edge-cloud continuum simulator with SLA-aware placement heuristics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check a scenario against every structural rule.
    Validate {
        /// Path to a scenario file, or a bundled name (paper_topology, toy).
        #[arg(long)]
        scenario: String,
        /// Dotted-path override, e.g. weights.rho=50 (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Simulate one scenario under one strategy and report the response
    /// variables.
    Run {
        /// Path to a scenario file, or a bundled name (paper_topology, toy).
        #[arg(long)]
        scenario: String,
        /// Placement strategy: tetris, proximity, or optimal.
        #[arg(long, default_value = "tetris")]
        strategy: String,
        /// Report label seed; falls back to $CONTINUUM_SIM_SEED, then 42.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for run.csv and ledger.csv.
        #[arg(long, default_value = "out")]
        output: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run the full 2x2x2 factorial suite on the bundled topology.
    Experiment {
        /// Replications per factor combination.
        #[arg(long, default_value_t = 10)]
        replications: usize,
        /// Base seed; replication i uses seed_base + i in every cell.
        /// Falls back to $CONTINUUM_SIM_SEED, then 42.
        #[arg(long)]
        seed_base: Option<u64>,
        /// Directory for raw.csv, summary.csv, influence.csv, report.txt.
        #[arg(long, default_value = "out")]
        output: PathBuf,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Replay the bundled two-server example under both strategies and
    /// verify the expected outcomes.
    Toy,
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Validate { scenario, set } => cmd_validate(&scenario, &set),
        Command::Run {
            scenario,
            strategy,
            seed,
            output,
            set,
        } => cmd_run(&scenario, &strategy, seed, &output, &set),
        Command::Experiment {
            replications,
            seed_base,
            output,
            jobs,
            set,
        } => cmd_experiment(replications, seed_base, &output, jobs, &set),
        Command::Toy => cmd_toy(),
    }
}

fn effective_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text
            .parse()
            .map_err(|_| format!("{SEED_ENV_VAR} must be an unsigned integer (got {text:?})")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Resolve a scenario argument to (name, scenario) without the validity
/// gate; callers decide how violations map to exit codes.
fn resolve_scenario(arg: &str) -> Result<(String, Scenario), ScenarioError> {
    match arg {
        "paper_topology" => Ok((arg.to_owned(), builtin_paper_topology(true))),
        "toy" => Ok((arg.to_owned(), builtin_toy())),
        path => {
            let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
                path: path.to_owned(),
                source,
            })?;
            let scenario = crate::scenario::parse_scenario_unvalidated(&text)?;
            let name = Path::new(path)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.to_owned());
            Ok((name, scenario))
        }
    }
}

fn parse_override(entry: &str) -> Result<(&str, &str), String> {
    entry
        .split_once('=')
        .ok_or_else(|| format!("override {entry:?} is not of the form KEY=VALUE"))
}

pub fn apply_scenario_override(
    scenario: &mut Scenario,
    key: &str,
    value: &str,
) -> Result<(), String> {
    let bad = |what: &str| format!("override {key}={value}: {what}");
    let as_f64 = |v: &str| v.parse::<f64>().map_err(|_| bad("expected a number"));
    let as_u64 = |v: &str| {
        v.parse::<u64>()
            .map_err(|_| bad("expected an unsigned integer"))
    };
    match key {
        "weights.alpha" => scenario.weights.alpha = as_f64(value)?,
        "weights.beta" => scenario.weights.beta = as_f64(value)?,
        "weights.gamma_w" => scenario.weights.gamma_w = as_f64(value)?,
        "weights.omega" => scenario.weights.omega = as_f64(value)?,
        "weights.rho" => scenario.weights.rho = as_f64(value)?,
        "weights.eta" => scenario.weights.eta = as_f64(value)?,
        "horizon_ms" => scenario.horizon_ms = as_u64(value)?,
        "cloud_enabled" => {
            scenario.cloud_enabled = value
                .parse::<bool>()
                .map_err(|_| bad("expected true or false"))?
        }
        _ => return Err(format!("unknown scenario override key: {key}")),
    }
    Ok(())
}

fn apply_workload_override(
    spec: &mut crate::experiment::WorkloadSpec,
    field: &str,
    value: &str,
) -> Result<(), String> {
    let v: u64 = value
        .parse()
        .map_err(|_| format!("workload override {field}={value}: expected an unsigned integer"))?;
    match field {
        "cpu_min" => spec.cpu_range.0 = v,
        "cpu_max" => spec.cpu_range.1 = v,
        "ram_min" => spec.ram_range.0 = v,
        "ram_max" => spec.ram_range.1 = v,
        "deadline_min" => spec.deadline_range.0 = v,
        "deadline_max" => spec.deadline_range.1 = v,
        "data_min" => spec.data_size_range.0 = v,
        "data_max" => spec.data_size_range.1 = v,
        "processing_min" => spec.processing_time_range.0 = v,
        "processing_max" => spec.processing_time_range.1 = v,
        "tasks_per_user" => spec.tasks_per_user = v,
        "arrival_max" => spec.arrival_max = v,
        _ => return Err(format!("unknown workload override field: {field}")),
    }
    Ok(())
}

pub fn apply_experiment_override(
    cfg: &mut ExperimentConfig,
    key: &str,
    value: &str,
) -> Result<(), String> {
    if let Some(rest) = key.strip_prefix("workload.low.") {
        return apply_workload_override(&mut cfg.workload_low, rest, value);
    }
    if let Some(rest) = key.strip_prefix("workload.high.") {
        return apply_workload_override(&mut cfg.workload_high, rest, value);
    }
    if let Some(rest) = key.strip_prefix("workload.") {
        // Shared field: apply to both levels.
        apply_workload_override(&mut cfg.workload_low, rest, value)?;
        return apply_workload_override(&mut cfg.workload_high, rest, value);
    }
    match key {
        "horizon_ms" => {
            cfg.horizon_ms = value
                .parse()
                .map_err(|_| format!("override {key}={value}: expected an unsigned integer"))?
        }
        _ if key.starts_with("weights.") => {
            // Weights ride on a scratch scenario to share the parser.
            let mut scratch = builtin_toy();
            scratch.weights = cfg.weights.clone();
            apply_scenario_override(&mut scratch, key, value)?;
            cfg.weights = scratch.weights;
        }
        _ => return Err(format!("unknown experiment override key: {key}")),
    }
    Ok(())
}

fn usage_error(message: &str) -> i32 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn cmd_validate(scenario_arg: &str, set: &[String]) -> i32 {
    let (_, mut scenario) = match resolve_scenario(scenario_arg) {
        Ok(pair) => pair,
        Err(e) => return usage_error(&e.to_string()),
    };
    for entry in set {
        let (key, value) = match parse_override(entry) {
            Ok(pair) => pair,
            Err(e) => return usage_error(&e),
        };
        if let Err(e) = apply_scenario_override(&mut scenario, key, value) {
            return usage_error(&e);
        }
    }
    let violations = validate(&scenario);
    if violations.is_empty() {
        println!("ok: scenario passes all structural checks");
        EXIT_OK
    } else {
        for violation in &violations {
            println!("violation: {violation}");
        }
        println!("{} violation(s)", violations.len());
        EXIT_CHECK_FAILED
    }
}

fn cmd_run(
    scenario_arg: &str,
    strategy_arg: &str,
    seed: Option<u64>,
    output: &Path,
    set: &[String],
) -> i32 {
    let strategy: Strategy = match strategy_arg.parse() {
        Ok(s) => s,
        Err(e) => return usage_error(&e),
    };
    let seed = match effective_seed(seed) {
        Ok(s) => s,
        Err(e) => return usage_error(&e),
    };
    let (name, mut scenario) = match resolve_scenario(scenario_arg) {
        Ok(pair) => pair,
        Err(e) => return usage_error(&e.to_string()),
    };
    for entry in set {
        let (key, value) = match parse_override(entry) {
            Ok(pair) => pair,
            Err(e) => return usage_error(&e),
        };
        if let Err(e) = apply_scenario_override(&mut scenario, key, value) {
            return usage_error(&e);
        }
    }

    let report = match simulate(&scenario, strategy, seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CHECK_FAILED;
        }
    };

    if let Err(e) = write_run_outputs(&report, &name, strategy, seed, output) {
        eprintln!("error: {e}");
        return EXIT_CHECK_FAILED;
    }

    print_response_variables(&report);
    EXIT_OK
}

fn print_response_variables(report: &RunReport) {
    println!("latency_violations: {}", report.latency_sla_violations);
    println!("drops: {}", report.drop_sla_violations);
    println!("avg_latency_ms: {:.6}", report.average_latency_ms);
    println!("power_w: {:.6}", report.power_consumption_w);
}

fn write_run_outputs(
    report: &RunReport,
    scenario_name: &str,
    strategy: Strategy,
    seed: u64,
    output: &Path,
) -> std::io::Result<()> {
    std::fs::create_dir_all(output)?;
    let cloud = "-";
    let row = report.csv_row(scenario_name, &strategy.to_string(), "-", cloud, seed);
    std::fs::write(
        output.join("run.csv"),
        format!("{}\n{row}\n", RunReport::CSV_HEADER),
    )?;
    std::fs::write(output.join("ledger.csv"), report.ledger_csv())?;
    Ok(())
}

fn cmd_experiment(
    replications: usize,
    seed_base: Option<u64>,
    output: &Path,
    jobs: usize,
    set: &[String],
) -> i32 {
    if replications < 2 {
        return usage_error("--replications must be at least 2");
    }
    let seed_base = match effective_seed(seed_base) {
        Ok(s) => s,
        Err(e) => return usage_error(&e),
    };
    let mut cfg = ExperimentConfig {
        replications,
        seed_base,
        jobs,
        ..Default::default()
    };
    for entry in set {
        let (key, value) = match parse_override(entry) {
            Ok(pair) => pair,
            Err(e) => return usage_error(&e),
        };
        if let Err(e) = apply_experiment_override(&mut cfg, key, value) {
            return usage_error(&e);
        }
    }

    let report = match run_factorial(&cfg) {
        Ok(r) => r,
        Err(ExperimentError::Config(message)) => return usage_error(&message),
        Err(e @ ExperimentError::Runs(_)) => {
            eprintln!("error: {e}");
            return EXIT_CHECK_FAILED;
        }
    };

    let write = || -> std::io::Result<()> {
        std::fs::create_dir_all(output)?;
        std::fs::write(output.join("raw.csv"), report.raw_csv())?;
        std::fs::write(output.join("summary.csv"), report.summary_csv())?;
        std::fs::write(output.join("influence.csv"), report.influence_csv())?;
        std::fs::write(output.join("report.txt"), report.text_report())?;
        Ok(())
    };
    if let Err(e) = write() {
        eprintln!("error: {e}");
        return EXIT_CHECK_FAILED;
    }

    println!(
        "{} runs ({} combinations x {} replications, seeds {}..={})",
        report.rows.len(),
        8,
        replications,
        seed_base,
        seed_base + replications as u64 - 1
    );
    println!(
        "wrote raw.csv, summary.csv, influence.csv, report.txt to {}",
        output.display()
    );
    for group in &report.summary.by_algorithm {
        let lat = group.stats[0];
        let drops = group.stats[1];
        println!(
            "  {:<10} latency_violations={:.1} drops={:.1}",
            group.label, lat.mean, drops.mean
        );
    }
    EXIT_OK
}

fn cmd_toy() -> i32 {
    let scenario = builtin_toy();
    let tetris = match simulate(&scenario, Strategy::Tetris, 0) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CHECK_FAILED;
        }
    };
    let proximity = match simulate(&scenario, Strategy::Proximity, 0) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CHECK_FAILED;
        }
    };

    // First placement wave at strategy level: the golden outcome pins the
    // processing order too, so a broken urgency or capacity ordering
    // cannot sneak through on hosts alone.
    let routes = crate::routing::build_routes(&scenario);
    let request = crate::strategy::PlacementRequest {
        pending: scenario.tasks.iter().collect(),
        node_states: scenario
            .active_nodes()
            .map(|n| crate::metrics::NodeState::new(n.clone()))
            .collect(),
        network: &routes,
        weights: &scenario.weights,
        now: 0,
    };
    let tetris_wave = crate::strategy::tetris_place(&request);
    let proximity_wave = crate::strategy::proximity_place(&request);

    println!(
        "toy scenario: S1(5 cpu, 5 ram) and S2(4 cpu, 4 ram), horizon {} ms",
        scenario.horizon_ms
    );
    println!("{:<8} {:<12} {:<12}", "task", "tetris", "proximity");
    for task in &scenario.tasks {
        let host = |report: &RunReport| {
            report
                .ledger
                .iter()
                .find(|e| e.task == task.id)
                .and_then(|e| {
                    if e.timing.dropped {
                        None
                    } else {
                        e.node.clone()
                    }
                })
                .map(|n| n.to_string())
                .unwrap_or_else(|| "dropped".into())
        };
        println!(
            "{:<8} {:<12} {:<12}",
            task.id.to_string(),
            host(&tetris),
            host(&proximity)
        );
    }
    println!(
        "{:<8} {:<12} {:<12}",
        "drops", tetris.drop_sla_violations, proximity.drop_sla_violations
    );

    let mut failures = Vec::new();
    if tetris.drop_sla_violations != 0 {
        failures.push(format!(
            "expected tetris to place all three tasks, saw {} drop(s)",
            tetris.drop_sla_violations
        ));
    }
    let dropped: Vec<String> = proximity
        .ledger
        .iter()
        .filter(|e| e.timing.dropped)
        .map(|e| e.task.to_string())
        .collect();
    if dropped != ["APP3"] {
        failures.push(format!(
            "expected proximity to drop exactly APP3, saw {dropped:?}"
        ));
    }

    let golden_tetris = [("APP2", "S2"), ("APP1", "S2"), ("APP3", "S1")];
    let tetris_seq: Vec<(String, String)> = tetris_wave
        .assignments
        .iter()
        .map(|(t, n)| (t.to_string(), n.to_string()))
        .collect();
    if tetris_seq
        != golden_tetris
            .iter()
            .map(|(t, n)| (t.to_string(), n.to_string()))
            .collect::<Vec<_>>()
    {
        failures.push(format!(
            "expected tetris wave {golden_tetris:?}, saw {tetris_seq:?}"
        ));
    }
    let golden_proximity = [("APP1", "S1"), ("APP2", "S2")];
    let proximity_seq: Vec<(String, String)> = proximity_wave
        .assignments
        .iter()
        .map(|(t, n)| (t.to_string(), n.to_string()))
        .collect();
    if proximity_seq
        != golden_proximity
            .iter()
            .map(|(t, n)| (t.to_string(), n.to_string()))
            .collect::<Vec<_>>()
        || proximity_wave.unplaced != [crate::scenario::Id::from("APP3")]
    {
        failures.push(format!(
            "expected proximity wave {golden_proximity:?} with APP3 unplaced, saw {proximity_seq:?} / {:?}",
            proximity_wave.unplaced
        ));
    }

    if failures.is_empty() {
        println!("golden outcome reproduced");
        EXIT_OK
    } else {
        for failure in &failures {
            println!("mismatch: {failure}");
        }
        EXIT_CHECK_FAILED
    }
}
