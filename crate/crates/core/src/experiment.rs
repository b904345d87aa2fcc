//! The 2x2x2 factorial suite on the bundled topology: seeded workload
//! synthesis, run orchestration, summary statistics with confidence
//! intervals, and allocation of variation.
//!
//! Replication `i` reuses seed `seed_base + i` across every factor
//! combination, and each task field draws from its own substream, so
//! cells differ only where their factors differ (common random numbers).

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::scenario::{builtin_paper_topology, Id, ModelWeights, ResourceVector, Task, User};
use crate::sim::{simulate, RunReport};
use crate::strategy::Strategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgorithmLevel {
    Tetris,
    Proximity,
}

impl AlgorithmLevel {
    pub fn strategy(&self) -> Strategy {
        match self {
            AlgorithmLevel::Tetris => Strategy::Tetris,
            AlgorithmLevel::Proximity => Strategy::Proximity,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            AlgorithmLevel::Tetris => "tetris",
            AlgorithmLevel::Proximity => "proximity",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorkloadLevel {
    Low,
    High,
}

impl WorkloadLevel {
    pub fn label(&self) -> &'static str {
        match self {
            WorkloadLevel::Low => "low",
            WorkloadLevel::High => "high",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CloudLevel {
    On,
    Off,
}

impl CloudLevel {
    pub fn label(&self) -> &'static str {
        match self {
            CloudLevel::On => "on",
            CloudLevel::Off => "off",
        }
    }
}

/// One of the eight factor combinations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorConfig {
    pub algorithm: AlgorithmLevel,
    pub workload: WorkloadLevel,
    pub cloud: CloudLevel,
}

impl FactorConfig {
    /// All eight combinations in experiment order: the algorithm varies
    /// slowest, then workload, then cloud (on before off).
    pub fn all() -> [FactorConfig; 8] {
        let mut out = [FactorConfig {
            algorithm: AlgorithmLevel::Tetris,
            workload: WorkloadLevel::Low,
            cloud: CloudLevel::On,
        }; 8];
        let mut i = 0;
        for algorithm in [AlgorithmLevel::Tetris, AlgorithmLevel::Proximity] {
            for workload in [WorkloadLevel::Low, WorkloadLevel::High] {
                for cloud in [CloudLevel::On, CloudLevel::Off] {
                    out[i] = FactorConfig {
                        algorithm,
                        workload,
                        cloud,
                    };
                    i += 1;
                }
            }
        }
        out
    }

    /// Canonical cell index 0..8 matching [`FactorConfig::all`].
    pub fn index(&self) -> usize {
        let a = matches!(self.algorithm, AlgorithmLevel::Proximity) as usize;
        let b = matches!(self.workload, WorkloadLevel::High) as usize;
        let c = matches!(self.cloud, CloudLevel::Off) as usize;
        a * 4 + b * 2 + c
    }
}

impl fmt::Display for FactorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}",
            self.algorithm.label(),
            self.workload.label(),
            self.cloud.label()
        )
    }
}

/// Ranges the workload generator draws from, all inclusive integers.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkloadSpec {
    pub cpu_range: (u64, u64),
    pub ram_range: (u64, u64),
    pub tasks_per_user: u64,
    pub deadline_range: (u64, u64),
    pub data_size_range: (u64, u64),
    pub processing_time_range: (u64, u64),
    /// Arrivals are drawn uniformly from `[0, arrival_max]`.
    pub arrival_max: u64,
}

impl WorkloadSpec {
    pub fn low() -> Self {
        WorkloadSpec {
            cpu_range: (2, 8),
            ram_range: (2048, 8192),
            tasks_per_user: 1,
            deadline_range: (60, 150),
            data_size_range: (1, 14),
            processing_time_range: (30, 55),
            arrival_max: 0,
        }
    }

    pub fn high() -> Self {
        WorkloadSpec {
            cpu_range: (6, 12),
            ram_range: (2048, 16384),
            ..Self::low()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, (lo, hi)) in [
            ("cpu_range", self.cpu_range),
            ("ram_range", self.ram_range),
            ("deadline_range", self.deadline_range),
            ("data_size_range", self.data_size_range),
            ("processing_time_range", self.processing_time_range),
        ] {
            if lo > hi {
                return Err(format!("{name}: min {lo} exceeds max {hi}"));
            }
        }
        if self.cpu_range.0 == 0 && self.ram_range.0 == 0 {
            return Err("cpu_range and ram_range cannot both start at zero".into());
        }
        if self.deadline_range.0 == 0 {
            return Err("deadline_range must start at 1 or above".into());
        }
        if self.tasks_per_user == 0 {
            return Err("tasks_per_user must be positive".into());
        }
        Ok(())
    }
}

/// Independent, order-free substream per (seed, user, task index, field).
///
/// Drawing each field from its own stream keeps the shared fields
/// (deadline, payload, processing time, arrival) identical across
/// workload levels for a given seed, so factor contrasts are paired.
fn field_stream(seed: u64, user: &Id, index: u64, field: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(&seed.to_le_bytes());
    eat(user.as_str().as_bytes());
    eat(&[0x1f]);
    eat(&index.to_le_bytes());
    eat(field.as_bytes());
    ChaCha8Rng::seed_from_u64(h)
}

fn draw(seed: u64, user: &Id, index: u64, field: &str, range: (u64, u64)) -> u64 {
    if range.0 == range.1 {
        return range.0;
    }
    field_stream(seed, user, index, field).random_range(range.0..=range.1)
}

/// Synthesize `tasks_per_user` tasks per user with uniformly drawn
/// integer fields. Deterministic per seed.
pub fn generate_workload(spec: &WorkloadSpec, users: &[User], seed: u64) -> Vec<Task> {
    let mut tasks = Vec::new();
    for user in users {
        for index in 0..spec.tasks_per_user {
            tasks.push(Task {
                id: format!("{}-t{}", user.id, index + 1).into(),
                user: user.id.clone(),
                demand: ResourceVector::new(
                    draw(seed, &user.id, index, "cpu", spec.cpu_range),
                    draw(seed, &user.id, index, "ram", spec.ram_range),
                    0,
                ),
                processing_time: draw(seed, &user.id, index, "proc", spec.processing_time_range),
                data_size: draw(seed, &user.id, index, "data", spec.data_size_range),
                arrival: draw(seed, &user.id, index, "arrival", (0, spec.arrival_max)),
                deadline: draw(seed, &user.id, index, "deadline", spec.deadline_range),
                penalty: crate::scenario::DEFAULT_TASK_PENALTY,
            });
        }
    }
    tasks
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub replications: usize,
    pub seed_base: u64,
    pub workload_low: WorkloadSpec,
    pub workload_high: WorkloadSpec,
    pub weights: ModelWeights,
    pub horizon_ms: u64,
    /// Worker threads for the run grid; 0 picks the rayon default.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            replications: 10,
            seed_base: 42,
            workload_low: WorkloadSpec::low(),
            workload_high: WorkloadSpec::high(),
            weights: ModelWeights::default(),
            horizon_ms: crate::scenario::DEFAULT_HORIZON_MS,
            jobs: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.replications as u64)
            .map(|i| self.seed_base + i)
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("{} run(s) failed:\n{}", .0.len(), .0.join("\n"))]
    Runs(Vec<String>),
}

/// Response variables a run is scored on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Response {
    LatencyViolations,
    DropViolations,
    AvgLatencyMs,
    PowerW,
}

impl Response {
    pub const ALL: [Response; 4] = [
        Response::LatencyViolations,
        Response::DropViolations,
        Response::AvgLatencyMs,
        Response::PowerW,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Response::LatencyViolations => "latency_violations",
            Response::DropViolations => "drop_violations",
            Response::AvgLatencyMs => "avg_latency_ms",
            Response::PowerW => "power_w",
        }
    }

    pub fn pos(&self) -> usize {
        match self {
            Response::LatencyViolations => 0,
            Response::DropViolations => 1,
            Response::AvgLatencyMs => 2,
            Response::PowerW => 3,
        }
    }
}

/// One simulated run of one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct RawRow {
    pub scenario: String,
    pub combo: FactorConfig,
    pub seed: u64,
    pub latency_violations: u64,
    pub drop_violations: u64,
    pub avg_latency_ms: f64,
    pub power_w: f64,
    pub energy_j: f64,
    pub objective: f64,
}

impl RawRow {
    fn from_report(scenario: &str, combo: FactorConfig, seed: u64, report: &RunReport) -> Self {
        RawRow {
            scenario: scenario.to_owned(),
            combo,
            seed,
            latency_violations: report.latency_sla_violations,
            drop_violations: report.drop_sla_violations,
            avg_latency_ms: report.average_latency_ms,
            power_w: report.power_consumption_w,
            energy_j: report.energy_joules,
            objective: report.objective,
        }
    }

    pub fn response(&self, response: Response) -> f64 {
        match response {
            Response::LatencyViolations => self.latency_violations as f64,
            Response::DropViolations => self.drop_violations as f64,
            Response::AvgLatencyMs => self.avg_latency_ms,
            Response::PowerW => self.power_w,
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            self.scenario,
            self.combo.algorithm.label(),
            self.combo.workload.label(),
            self.combo.cloud.label(),
            self.seed,
            self.latency_violations,
            self.drop_violations,
            self.avg_latency_ms,
            self.power_w,
            self.energy_j,
            self.objective
        )
    }
}

/// Mean, sample standard deviation, and 95% half-width over one group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub ci95_half: f64,
}

/// Values are sorted before accumulation so the result is invariant
/// under input order.
pub fn stat_of(values: &[f64]) -> Stat {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n == 0 {
        return Stat {
            n: 0,
            mean: 0.0,
            std: 0.0,
            ci95_half: 0.0,
        };
    }
    let mean = sorted.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Stat {
            n,
            mean,
            std: 0.0,
            ci95_half: 0.0,
        };
    }
    let var = sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let std = var.sqrt();
    Stat {
        n,
        mean,
        std,
        ci95_half: ci95_half_width(std, n),
    }
}

/// Two-sided 95% half-width from the t distribution with n-1 degrees of
/// freedom.
pub fn ci95_half_width(std: f64, n: usize) -> f64 {
    if n < 2 || std == 0.0 {
        return 0.0;
    }
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("valid t distribution")
        .inverse_cdf(0.975);
    t * std / (n as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupStat {
    pub label: String,
    pub stats: [Stat; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryTables {
    pub by_algorithm: Vec<GroupStat>,
    pub by_cloud: Vec<GroupStat>,
    pub by_cell: Vec<GroupStat>,
}

fn group_stat(label: String, rows: &[&RawRow]) -> GroupStat {
    let stats = Response::ALL.map(|r| {
        let values: Vec<f64> = rows.iter().map(|row| row.response(r)).collect();
        stat_of(&values)
    });
    GroupStat { label, stats }
}

/// Mean/std tables grouped by algorithm, by cloud availability, and per
/// cell. A pure function of the row multiset: shuffling rows changes
/// nothing.
pub fn summarize(rows: &[RawRow]) -> SummaryTables {
    let by = |pred: &dyn Fn(&RawRow) -> bool| -> Vec<&RawRow> {
        rows.iter().filter(|r| pred(r)).collect()
    };
    let by_algorithm = vec![
        group_stat(
            "tetris".into(),
            &by(&|r| r.combo.algorithm == AlgorithmLevel::Tetris),
        ),
        group_stat(
            "proximity".into(),
            &by(&|r| r.combo.algorithm == AlgorithmLevel::Proximity),
        ),
    ];
    let by_cloud = vec![
        group_stat("on".into(), &by(&|r| r.combo.cloud == CloudLevel::On)),
        group_stat("off".into(), &by(&|r| r.combo.cloud == CloudLevel::Off)),
    ];
    let by_cell = FactorConfig::all()
        .iter()
        .enumerate()
        .map(|(i, combo)| {
            group_stat(
                format!("exp{} {}", i + 1, combo),
                &by(&|r| r.combo == *combo),
            )
        })
        .collect();
    SummaryTables {
        by_algorithm,
        by_cloud,
        by_cell,
    }
}

// ---------------------------------------------------------------------------
// Allocation of variation
// ---------------------------------------------------------------------------

pub const EFFECT_LABELS: [&str; 8] = [
    "algorithm",
    "workload",
    "cloud",
    "algorithm:workload",
    "algorithm:cloud",
    "workload:cloud",
    "algorithm:workload:cloud",
    "error",
];

/// Percentage of the total sum of squares attributed to each main
/// effect, interaction, and the replication error.
#[derive(Clone, Debug, PartialEq)]
pub struct InfluenceBreakdown {
    /// Shares in [`EFFECT_LABELS`] order, in percent. All zero when
    /// `no_variation` is set.
    pub shares: [f64; 8],
    /// Set when every observation is identical, leaving nothing to
    /// attribute.
    pub no_variation: bool,
}

/// Sign-table decomposition for a replicated 2^3 design.
///
/// Cells are indexed canonically (see [`FactorConfig::index`]) and must
/// hold the same number of observations. Effects are estimated from
/// coded +-1 levels; each effect contributes `8 * r * effect^2` to the
/// total sum of squares, and the residual within-cell variance is the
/// error share.
pub fn allocation_of_variation(cells: &[Vec<f64>; 8]) -> Result<InfluenceBreakdown, String> {
    let r = cells[0].len();
    if r == 0 {
        return Err("cells must not be empty".into());
    }
    if cells.iter().any(|c| c.len() != r) {
        return Err("all cells must hold the same number of replications".into());
    }

    let mut means = [0.0f64; 8];
    let mut sse = 0.0;
    for (i, cell) in cells.iter().enumerate() {
        let mut sorted = cell.clone();
        sorted.sort_by(f64::total_cmp);
        means[i] = sorted.iter().sum::<f64>() / r as f64;
        sse += sorted.iter().map(|v| (v - means[i]).powi(2)).sum::<f64>();
    }

    // Effect signs: cell index = a*4 + b*2 + c, coded level -1 for bit 0.
    let coded = |bit: usize, i: usize| if i >> bit & 1 == 1 { 1.0 } else { -1.0 };
    let sign = |effect: usize, i: usize| -> f64 {
        // effect order: A, B, C, AB, AC, BC, ABC over bits a=2, b=1, c=0
        match effect {
            0 => coded(2, i),
            1 => coded(1, i),
            2 => coded(0, i),
            3 => coded(2, i) * coded(1, i),
            4 => coded(2, i) * coded(0, i),
            5 => coded(1, i) * coded(0, i),
            6 => coded(2, i) * coded(1, i) * coded(0, i),
            _ => unreachable!(),
        }
    };

    let mut ss = [0.0f64; 8];
    for (effect, slot) in ss.iter_mut().take(7).enumerate() {
        let q: f64 = (0..8).map(|i| sign(effect, i) * means[i]).sum::<f64>() / 8.0;
        *slot = 8.0 * r as f64 * q * q;
    }
    ss[7] = sse;

    let sst: f64 = ss.iter().sum();
    if sst <= f64::EPSILON {
        return Ok(InfluenceBreakdown {
            shares: [0.0; 8],
            no_variation: true,
        });
    }
    let shares = ss.map(|s| s / sst * 100.0);
    Ok(InfluenceBreakdown {
        shares,
        no_variation: false,
    })
}

// ---------------------------------------------------------------------------
// The full factorial
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub rows: Vec<RawRow>,
    /// Per-response influence breakdown, indexed by [`Response::pos`].
    pub influence: [InfluenceBreakdown; 4],
    pub summary: SummaryTables,
}

pub const PAPER_SCENARIO_NAME: &str = "paper_topology";

/// Run every combination of the 2^3 design `replications` times and
/// aggregate. Replication `i` uses seed `seed_base + i` in all cells.
pub fn run_factorial(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    if cfg.replications < 2 {
        return Err(ExperimentError::Config(format!(
            "replications must be at least 2 (got {})",
            cfg.replications
        )));
    }
    cfg.workload_low
        .validate()
        .map_err(ExperimentError::Config)?;
    cfg.workload_high
        .validate()
        .map_err(ExperimentError::Config)?;

    let grid: Vec<(FactorConfig, u64)> = FactorConfig::all()
        .iter()
        .flat_map(|combo| cfg.seeds().into_iter().map(move |s| (*combo, s)))
        .collect();

    let run_one = |&(combo, seed): &(FactorConfig, u64)| -> Result<RawRow, String> {
        let mut scenario = builtin_paper_topology(combo.cloud == CloudLevel::On);
        scenario.weights = cfg.weights.clone();
        scenario.horizon_ms = cfg.horizon_ms;
        let spec = match combo.workload {
            WorkloadLevel::Low => &cfg.workload_low,
            WorkloadLevel::High => &cfg.workload_high,
        };
        scenario.tasks = generate_workload(spec, &scenario.users, seed);
        let report = simulate(&scenario, combo.algorithm.strategy(), seed)
            .map_err(|e| format!("{combo} seed {seed}: {e}"))?;
        Ok(RawRow::from_report(
            PAPER_SCENARIO_NAME,
            combo,
            seed,
            &report,
        ))
    };

    let results: Vec<Result<RawRow, String>> = if cfg.jobs == 1 {
        grid.iter().map(run_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        pool.install(|| grid.par_iter().map(run_one).collect())
    };

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for result in results {
        match result {
            Ok(row) => rows.push(row),
            Err(message) => failures.push(message),
        }
    }
    if !failures.is_empty() {
        return Err(ExperimentError::Runs(failures));
    }

    rows.sort_by(|a, b| {
        a.combo
            .index()
            .cmp(&b.combo.index())
            .then(a.seed.cmp(&b.seed))
    });
    Ok(report_from_rows(rows))
}

/// Aggregate rows into the report tables. Pure: row order is irrelevant
/// beyond the stored `rows` field itself.
pub fn report_from_rows(rows: Vec<RawRow>) -> ExperimentReport {
    let influence = Response::ALL.map(|response| {
        let mut cells: [Vec<f64>; 8] = Default::default();
        for row in &rows {
            cells[row.combo.index()].push(row.response(response));
        }
        allocation_of_variation(&cells).unwrap_or(InfluenceBreakdown {
            shares: [0.0; 8],
            no_variation: true,
        })
    });
    let summary = summarize(&rows);
    ExperimentReport {
        rows,
        influence,
        summary,
    }
}

impl ExperimentReport {
    pub fn raw_csv(&self) -> String {
        let mut out = String::from(RunReport::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv());
            out.push('\n');
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("table,group,response,n,mean,std,ci95_half\n");
        for (table, groups) in [
            ("algorithm", &self.summary.by_algorithm),
            ("cloud", &self.summary.by_cloud),
            ("experiment", &self.summary.by_cell),
        ] {
            for group in groups {
                for response in Response::ALL {
                    let s = group.stats[response.pos()];
                    out.push_str(&format!(
                        "{table},{},{},{},{:.6},{:.6},{:.6}\n",
                        group.label,
                        response.label(),
                        s.n,
                        s.mean,
                        s.std,
                        s.ci95_half
                    ));
                }
            }
        }
        out
    }

    pub fn influence_csv(&self) -> String {
        let mut out = String::from("response,effect,influence_pct\n");
        for response in Response::ALL {
            let breakdown = &self.influence[response.pos()];
            if breakdown.no_variation {
                out.push_str(&format!("{},none,no_variation\n", response.label()));
                continue;
            }
            for (effect, share) in EFFECT_LABELS.iter().zip(breakdown.shares) {
                out.push_str(&format!("{},{effect},{share:.6}\n", response.label()));
            }
        }
        out
    }

    pub fn text_report(&self) -> String {
        let mut out = String::new();
        out.push_str("FACTORIAL RESULTS\n=================\n\n");

        out.push_str("Per-experiment cells (mean / std):\n");
        for group in &self.summary.by_cell {
            out.push_str(&format!("  {:<28}", group.label));
            for response in Response::ALL {
                let s = group.stats[response.pos()];
                out.push_str(&format!(" {}={:.1}/{:.1}", response.label(), s.mean, s.std));
            }
            out.push('\n');
        }

        for (title, groups) in [
            ("By algorithm", &self.summary.by_algorithm),
            ("By architecture (cloud)", &self.summary.by_cloud),
        ] {
            out.push_str(&format!("\n{title} (mean / std / ci95):\n"));
            for group in groups {
                out.push_str(&format!("  {:<10}", group.label));
                for response in Response::ALL {
                    let s = group.stats[response.pos()];
                    out.push_str(&format!(
                        " {}={:.1}/{:.1}/{:.1}",
                        response.label(),
                        s.mean,
                        s.std,
                        s.ci95_half
                    ));
                }
                out.push('\n');
            }
        }

        out.push_str("\nAllocation of variation (% of total sum of squares):\n");
        for response in Response::ALL {
            let breakdown = &self.influence[response.pos()];
            out.push_str(&format!("  {}:\n", response.label()));
            if breakdown.no_variation {
                out.push_str("    no variation\n");
                continue;
            }
            for (effect, share) in EFFECT_LABELS.iter().zip(breakdown.shares) {
                out.push_str(&format!("    {effect:<26} {share:6.2}%\n"));
            }
        }
        out
    }

    /// Observations per canonical cell for one response.
    pub fn cell_observations(&self, response: Response) -> [Vec<f64>; 8] {
        let mut cells: [Vec<f64>; 8] = Default::default();
        for row in &self.rows {
            cells[row.combo.index()].push(row.response(response));
        }
        cells
    }
}
