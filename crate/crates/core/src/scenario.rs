//! Static domain model: infrastructure, workload, model weights, and the
//! scenario file format with its structural validation rules.
//!
//! A [`Scenario`] is immutable once constructed and safe to share across
//! concurrently running simulations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier shared by servers, network elements, users, and tasks.
///
/// Ordering is lexicographic; every deterministic tie-break in the crate
/// falls back to it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Id(pub String);

impl Id {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for Id {
    fn from(s: &str) -> Self {
        Id(s.to_owned())
    }
}

impl From<String> for Id {
    fn from(s: String) -> Self {
        Id(s)
    }
}

/// CPU cores plus RAM and storage in megabytes. All components are
/// non-negative integers; comparison is componentwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceVector {
    pub cpu: u64,
    pub ram: u64,
    pub storage: u64,
}

impl ResourceVector {
    pub const ZERO: ResourceVector = ResourceVector {
        cpu: 0,
        ram: 0,
        storage: 0,
    };

    pub fn new(cpu: u64, ram: u64, storage: u64) -> Self {
        ResourceVector { cpu, ram, storage }
    }

    /// Componentwise `self <= other`.
    pub fn fits_within(&self, other: &ResourceVector) -> bool {
        self.cpu <= other.cpu && self.ram <= other.ram && self.storage <= other.storage
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn saturating_sub(&self, other: &ResourceVector) -> ResourceVector {
        ResourceVector {
            cpu: self.cpu.saturating_sub(other.cpu),
            ram: self.ram.saturating_sub(other.ram),
            storage: self.storage.saturating_sub(other.storage),
        }
    }

    pub fn add(&self, other: &ResourceVector) -> ResourceVector {
        ResourceVector {
            cpu: self.cpu + other.cpu,
            ram: self.ram + other.ram,
            storage: self.storage + other.storage,
        }
    }

    /// Product of the three components, used for exact capacity-score
    /// ordering (the cube root is monotone in it).
    pub fn product(&self) -> u128 {
        self.cpu as u128 * self.ram as u128 * self.storage as u128
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeTier {
    Edge,
    Cloud,
}

/// A server that can host tasks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComputeNode {
    pub id: Id,
    pub tier: NodeTier,
    pub capacity: ResourceVector,
    /// Draw in watts at zero CPU utilization.
    pub power_idle: f64,
    /// Draw in watts at full CPU utilization.
    pub power_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Switch,
    BaseStation,
}

/// A network vertex that cannot host tasks: a switch or a base station.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkElement {
    pub id: Id,
    pub kind: ElementKind,
}

/// Sentinel for links whose aggregated-delay ceiling is effectively
/// unconstrained.
pub const MAX_DELAY_UNBOUNDED_MS: f64 = 1.0e15;

/// Bidirectional link between two nodes/elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub endpoint_a: Id,
    pub endpoint_b: Id,
    /// Megabits per second.
    pub bandwidth: u64,
    /// Propagation latency in milliseconds.
    pub latency: u64,
    /// Ceiling on the aggregated transfer delay routed over this link,
    /// in milliseconds.
    pub max_delay: f64,
}

impl Link {
    /// Normalized (smaller id first) endpoint pair identifying the link.
    pub fn key(&self) -> (Id, Id) {
        if self.endpoint_a <= self.endpoint_b {
            (self.endpoint_a.clone(), self.endpoint_b.clone())
        } else {
            (self.endpoint_b.clone(), self.endpoint_a.clone())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub id: Id,
    pub base_station: Id,
}

/// One application request issued by a user.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: Id,
    pub user: Id,
    pub demand: ResourceVector,
    /// Milliseconds of compute once started.
    pub processing_time: u64,
    /// Input payload in megabits.
    pub data_size: u64,
    /// Absolute arrival time in milliseconds.
    pub arrival: u64,
    /// Relative deadline in milliseconds (absolute deadline is
    /// `arrival + deadline`).
    pub deadline: u64,
    /// Penalty coefficient applied per millisecond of deadline breach.
    pub penalty: f64,
}

/// Coefficients of the urgency score and of the run objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_w: f64,
    /// Cost per millisecond of delivery latency.
    pub omega: f64,
    /// Cost per dropped task.
    pub rho: f64,
    /// Cost per joule.
    pub eta: f64,
}

impl Default for ModelWeights {
    fn default() -> Self {
        ModelWeights {
            alpha: 1.0,
            beta: 1.0,
            gamma_w: 1.0,
            omega: 1.0,
            rho: 100.0,
            eta: 0.001,
        }
    }
}

/// The full static world handed to the simulator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub nodes: Vec<ComputeNode>,
    pub elements: Vec<NetworkElement>,
    pub links: Vec<Link>,
    pub users: Vec<User>,
    pub tasks: Vec<Task>,
    pub weights: ModelWeights,
    pub horizon_ms: u64,
    pub cloud_enabled: bool,
}

impl Scenario {
    pub fn node(&self, id: &Id) -> Option<&ComputeNode> {
        self.nodes.iter().find(|n| &n.id == id)
    }

    /// Nodes eligible for placement: cloud-tier servers only count when
    /// the cloud is enabled.
    pub fn active_nodes(&self) -> impl Iterator<Item = &ComputeNode> {
        self.nodes
            .iter()
            .filter(|n| self.cloud_enabled || n.tier != NodeTier::Cloud)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// A named breach of a structural rule. Violations are data, not errors:
/// [`validate`] reports them all, in deterministic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Id of the offending entity, or a section name for global rules.
    pub entity: String,
    pub rule: String,
}

impl Violation {
    fn new(entity: impl Into<String>, rule: impl Into<String>) -> Self {
        Violation {
            entity: entity.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Invalid(Violation),
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------
//
// The on-disk document mirrors `Scenario`, with optional fields resolved to
// documented defaults at load time. Unknown keys are rejected so typos
// surface as parse errors instead of silently ignored settings.

pub const DEFAULT_HORIZON_MS: u64 = 1000;
pub const DEFAULT_EDGE_LINK_BANDWIDTH_MBPS: u64 = 100;
pub const DEFAULT_EDGE_LINK_LATENCY_MS: u64 = 1;
pub const DEFAULT_CLOUD_LINK_BANDWIDTH_MBPS: u64 = 1000;
pub const DEFAULT_CLOUD_LINK_LATENCY_MS: u64 = 10;
pub const DEFAULT_EDGE_POWER_IDLE_W: f64 = 90.0;
pub const DEFAULT_EDGE_POWER_MAX_W: f64 = 180.0;
pub const DEFAULT_CLOUD_POWER_IDLE_W: f64 = 300.0;
pub const DEFAULT_CLOUD_POWER_MAX_W: f64 = 600.0;
pub const DEFAULT_TASK_PENALTY: f64 = 1.0;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    nodes: Vec<NodeEntry>,
    #[serde(default)]
    elements: Vec<NetworkElement>,
    #[serde(default)]
    links: Vec<LinkEntry>,
    #[serde(default)]
    users: Vec<User>,
    #[serde(default)]
    tasks: Vec<TaskEntry>,
    #[serde(default)]
    weights: Option<ModelWeights>,
    #[serde(default)]
    horizon_ms: Option<u64>,
    #[serde(default = "default_true")]
    cloud_enabled: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeEntry {
    id: Id,
    tier: NodeTier,
    capacity: ResourceVector,
    #[serde(default)]
    power_idle: Option<f64>,
    #[serde(default)]
    power_max: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkEntry {
    endpoint_a: Id,
    endpoint_b: Id,
    #[serde(default)]
    bandwidth: Option<u64>,
    #[serde(default)]
    latency: Option<u64>,
    #[serde(default)]
    max_delay: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskEntry {
    id: Id,
    user: Id,
    demand: ResourceVector,
    processing_time: u64,
    #[serde(default)]
    data_size: u64,
    #[serde(default)]
    arrival: u64,
    deadline: u64,
    #[serde(default)]
    penalty: Option<f64>,
}

fn resolve(file: ScenarioFile) -> Scenario {
    let nodes: Vec<ComputeNode> = file
        .nodes
        .into_iter()
        .map(|n| {
            let (idle, max) = match n.tier {
                NodeTier::Edge => (DEFAULT_EDGE_POWER_IDLE_W, DEFAULT_EDGE_POWER_MAX_W),
                NodeTier::Cloud => (DEFAULT_CLOUD_POWER_IDLE_W, DEFAULT_CLOUD_POWER_MAX_W),
            };
            ComputeNode {
                id: n.id,
                tier: n.tier,
                capacity: n.capacity,
                power_idle: n.power_idle.unwrap_or(idle),
                power_max: n.power_max.unwrap_or(max),
            }
        })
        .collect();

    let cloud_ids: BTreeSet<&Id> = nodes
        .iter()
        .filter(|n| n.tier == NodeTier::Cloud)
        .map(|n| &n.id)
        .collect();

    let links = file
        .links
        .into_iter()
        .map(|l| {
            let cloud_adjacent =
                cloud_ids.contains(&l.endpoint_a) || cloud_ids.contains(&l.endpoint_b);
            let (bw, lat) = if cloud_adjacent {
                (
                    DEFAULT_CLOUD_LINK_BANDWIDTH_MBPS,
                    DEFAULT_CLOUD_LINK_LATENCY_MS,
                )
            } else {
                (
                    DEFAULT_EDGE_LINK_BANDWIDTH_MBPS,
                    DEFAULT_EDGE_LINK_LATENCY_MS,
                )
            };
            Link {
                endpoint_a: l.endpoint_a,
                endpoint_b: l.endpoint_b,
                bandwidth: l.bandwidth.unwrap_or(bw),
                latency: l.latency.unwrap_or(lat),
                max_delay: l.max_delay.unwrap_or(MAX_DELAY_UNBOUNDED_MS),
            }
        })
        .collect();

    let tasks = file
        .tasks
        .into_iter()
        .map(|t| Task {
            id: t.id,
            user: t.user,
            demand: t.demand,
            processing_time: t.processing_time,
            data_size: t.data_size,
            arrival: t.arrival,
            deadline: t.deadline,
            penalty: t.penalty.unwrap_or(DEFAULT_TASK_PENALTY),
        })
        .collect();

    Scenario {
        nodes,
        elements: file.elements,
        links,
        users: file.users,
        tasks,
        weights: file.weights.unwrap_or_default(),
        horizon_ms: file.horizon_ms.unwrap_or(DEFAULT_HORIZON_MS),
        cloud_enabled: file.cloud_enabled,
    }
}

/// Parse a scenario document and resolve defaults without the validity
/// gate. Callers that want to report every violation (rather than fail
/// on the first) go through this and [`validate`] themselves.
pub fn parse_scenario_unvalidated(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    Ok(resolve(file))
}

/// Parse a scenario document from a string, resolve defaults, and reject
/// it on the first violated invariant.
pub fn scenario_from_json(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario = parse_scenario_unvalidated(text)?;
    match validate(&scenario).into_iter().next() {
        None => Ok(scenario),
        Some(v) => Err(ScenarioError::Invalid(v)),
    }
}

/// Load and validate a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    scenario_from_json(&text)
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Check every structural rule and return the violations in a fixed order.
///
/// Connectivity is assessed over the link graph: every compute node, every
/// base station serving a user, and every link endpoint must sit in one
/// connected component. Elements that carry neither links nor users are
/// inert catalog entries and do not break connectivity. With the cloud
/// disabled, cloud-tier nodes and their links are ignored.
pub fn validate(scenario: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();

    for node in &scenario.nodes {
        if node.capacity.cpu == 0 || node.capacity.ram == 0 || node.capacity.storage == 0 {
            out.push(Violation::new(
                node.id.as_str(),
                "node capacity must be positive in every component",
            ));
        }
        if node.power_idle < 0.0 {
            out.push(Violation::new(
                node.id.as_str(),
                "power_idle must be non-negative",
            ));
        }
        if node.power_idle > node.power_max {
            out.push(Violation::new(
                node.id.as_str(),
                "power_idle must not exceed power_max",
            ));
        }
    }

    // Ids must be unique across nodes and elements together, and within
    // users and tasks.
    let mut seen: BTreeSet<&Id> = BTreeSet::new();
    for id in scenario
        .nodes
        .iter()
        .map(|n| &n.id)
        .chain(scenario.elements.iter().map(|e| &e.id))
    {
        if !seen.insert(id) {
            out.push(Violation::new(id.as_str(), "duplicate node/element id"));
        }
    }
    let mut seen_users: BTreeSet<&Id> = BTreeSet::new();
    for user in &scenario.users {
        if !seen_users.insert(&user.id) {
            out.push(Violation::new(user.id.as_str(), "duplicate user id"));
        }
    }
    let mut seen_tasks: BTreeSet<&Id> = BTreeSet::new();
    for task in &scenario.tasks {
        if !seen_tasks.insert(&task.id) {
            out.push(Violation::new(task.id.as_str(), "duplicate task id"));
        }
    }

    let known: BTreeSet<&Id> = scenario
        .nodes
        .iter()
        .map(|n| &n.id)
        .chain(scenario.elements.iter().map(|e| &e.id))
        .collect();

    for link in &scenario.links {
        let label = format!("link {}~{}", link.endpoint_a, link.endpoint_b);
        if link.bandwidth == 0 {
            out.push(Violation::new(
                label.clone(),
                "link bandwidth must be positive",
            ));
        }
        if link.max_delay <= 0.0 {
            out.push(Violation::new(
                label.clone(),
                "link max_delay must be positive",
            ));
        }
        for endpoint in [&link.endpoint_a, &link.endpoint_b] {
            if !known.contains(endpoint) {
                out.push(Violation::new(
                    label.clone(),
                    format!("endpoint {endpoint} does not exist"),
                ));
            }
        }
    }

    let base_stations: BTreeSet<&Id> = scenario
        .elements
        .iter()
        .filter(|e| e.kind == ElementKind::BaseStation)
        .map(|e| &e.id)
        .collect();
    for user in &scenario.users {
        if !base_stations.contains(&user.base_station) {
            out.push(Violation::new(
                user.id.as_str(),
                format!(
                    "base station {} does not exist or is not a base station",
                    user.base_station
                ),
            ));
        }
    }

    let user_ids: BTreeSet<&Id> = scenario.users.iter().map(|u| &u.id).collect();
    for task in &scenario.tasks {
        if task.deadline == 0 {
            out.push(Violation::new(
                task.id.as_str(),
                "task deadline must be positive",
            ));
        }
        if task.demand.is_zero() {
            out.push(Violation::new(
                task.id.as_str(),
                "task demand must not be all-zero",
            ));
        }
        if !user_ids.contains(&task.user) {
            out.push(Violation::new(
                task.id.as_str(),
                format!("user {} does not exist", task.user),
            ));
        }
    }

    out.extend(connectivity_violations(scenario));
    out
}

fn connectivity_violations(scenario: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();

    let excluded: BTreeSet<&Id> = if scenario.cloud_enabled {
        BTreeSet::new()
    } else {
        scenario
            .nodes
            .iter()
            .filter(|n| n.tier == NodeTier::Cloud)
            .map(|n| &n.id)
            .collect()
    };

    let mut adjacency: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    for link in &scenario.links {
        if excluded.contains(&link.endpoint_a) || excluded.contains(&link.endpoint_b) {
            continue;
        }
        adjacency
            .entry(&link.endpoint_a)
            .or_default()
            .push(&link.endpoint_b);
        adjacency
            .entry(&link.endpoint_b)
            .or_default()
            .push(&link.endpoint_a);
    }

    // Entities that are required to be mutually reachable.
    let mut required: BTreeSet<&Id> = scenario
        .nodes
        .iter()
        .filter(|n| !excluded.contains(&n.id))
        .map(|n| &n.id)
        .collect();
    for user in &scenario.users {
        required.insert(&user.base_station);
    }
    for id in adjacency.keys() {
        required.insert(id);
    }

    if required.is_empty() {
        return out;
    }

    let start = *required.iter().next().unwrap();
    let mut reached: BTreeSet<&Id> = BTreeSet::new();
    let mut queue = VecDeque::from([start]);
    reached.insert(start);
    while let Some(v) = queue.pop_front() {
        for next in adjacency.get(v).into_iter().flatten() {
            if reached.insert(next) {
                queue.push_back(next);
            }
        }
    }

    for id in &required {
        if !reached.contains(*id) {
            out.push(Violation::new(
                id.as_str(),
                format!("topology is disconnected: not reachable from {start}"),
            ));
        }
    }

    // Every user must reach at least one eligible compute node.
    let node_ids: BTreeSet<&Id> = scenario
        .nodes
        .iter()
        .filter(|n| !excluded.contains(&n.id))
        .map(|n| &n.id)
        .collect();
    for user in &scenario.users {
        let mut seen: BTreeSet<&Id> = BTreeSet::from([&user.base_station]);
        let mut queue = VecDeque::from([&user.base_station]);
        let mut reachable = false;
        while let Some(v) = queue.pop_front() {
            if node_ids.contains(v) {
                reachable = true;
                break;
            }
            for next in adjacency.get(v).into_iter().flatten() {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        if !reachable {
            out.push(Violation::new(
                user.id.as_str(),
                "user cannot reach any compute node via links",
            ));
        }
    }

    out
}

// ---------------------------------------------------------------------------
// Built-in scenarios
// ---------------------------------------------------------------------------

fn edge_node(id: &str, cpu: u64, ram: u64, storage: u64) -> ComputeNode {
    ComputeNode {
        id: id.into(),
        tier: NodeTier::Edge,
        capacity: ResourceVector::new(cpu, ram, storage),
        power_idle: DEFAULT_EDGE_POWER_IDLE_W,
        power_max: DEFAULT_EDGE_POWER_MAX_W,
    }
}

fn link(a: &str, b: &str, bandwidth: u64, latency: u64) -> Link {
    Link {
        endpoint_a: a.into(),
        endpoint_b: b.into(),
        bandwidth,
        latency,
        max_delay: MAX_DELAY_UNBOUNDED_MS,
    }
}

/// Bottleneck bandwidth of the wide-area hop in the built-in topology.
///
/// The uplink is the slowest stretch of any cloud path, so offloading to
/// the cloud trades transfer time for the edge's scarcer capacity.
pub const PAPER_CLOUD_UPLINK_MBPS: u64 = 34;

/// The bundled 16-base-station metro topology: a 4x4 switch fabric with
/// six edge servers, one remote cloud server behind an aggregation
/// switch, and six stationary users. 35 links in total when the cloud
/// is present.
///
/// With `cloud_enabled = false` the cloud server and its uplink are
/// absent and the six edge servers stand alone.
pub fn builtin_paper_topology(cloud_enabled: bool) -> Scenario {
    let mut nodes = vec![
        edge_node("ES1", 8, 16_384, 131_072),
        edge_node("ES2", 8, 16_384, 131_072),
        edge_node("ES3", 8, 8_192, 131_072),
        edge_node("ES4", 8, 8_192, 131_072),
        edge_node("ES5", 12, 16_384, 131_072),
        edge_node("ES6", 12, 16_384, 131_072),
    ];
    if cloud_enabled {
        nodes.push(ComputeNode {
            id: "CLOUD".into(),
            tier: NodeTier::Cloud,
            capacity: ResourceVector::new(9_000, 9_000_000, 90_000_000),
            power_idle: DEFAULT_CLOUD_POWER_IDLE_W,
            power_max: DEFAULT_CLOUD_POWER_MAX_W,
        });
    }

    let mut elements = Vec::new();
    for i in 1..=17 {
        elements.push(NetworkElement {
            id: format!("NS{i}").into(),
            kind: ElementKind::Switch,
        });
    }
    for i in 1..=16 {
        elements.push(NetworkElement {
            id: format!("BS{i}").into(),
            kind: ElementKind::BaseStation,
        });
    }

    // 4x4 switch fabric (NS1..NS16 row-major), with two redundant rungs
    // omitted, plus the aggregation switch NS17 behind NS16.
    let bw = DEFAULT_EDGE_LINK_BANDWIDTH_MBPS;
    let lat = DEFAULT_EDGE_LINK_LATENCY_MS;
    let mut links = Vec::new();
    for row in 0..4u32 {
        for col in 0..3u32 {
            let a = row * 4 + col + 1;
            let b = a + 1;
            if (a, b) == (2, 3) {
                continue;
            }
            links.push(link(&format!("NS{a}"), &format!("NS{b}"), bw, lat));
        }
    }
    for row in 0..3u32 {
        for col in 0..4u32 {
            let a = row * 4 + col + 1;
            let b = a + 4;
            if (a, b) == (9, 13) {
                continue;
            }
            links.push(link(&format!("NS{a}"), &format!("NS{b}"), bw, lat));
        }
    }
    for (bs, ns) in [(4, 4), (6, 6), (10, 10), (11, 11), (14, 14)] {
        links.push(link(&format!("BS{bs}"), &format!("NS{ns}"), bw, lat));
    }
    // The big-CPU servers ES5/ES6 sit at the busiest access points, so a
    // purely proximity-driven policy is tempted to fill them first.
    for (es, ns) in [(1, 10), (2, 1), (3, 6), (4, 11), (5, 4), (6, 4)] {
        links.push(link(&format!("ES{es}"), &format!("NS{ns}"), bw, lat));
    }
    links.push(link(
        "NS16",
        "NS17",
        DEFAULT_CLOUD_LINK_BANDWIDTH_MBPS,
        DEFAULT_CLOUD_LINK_LATENCY_MS,
    ));
    if cloud_enabled {
        links.push(link(
            "NS17",
            "CLOUD",
            PAPER_CLOUD_UPLINK_MBPS,
            DEFAULT_CLOUD_LINK_LATENCY_MS,
        ));
    }

    let users = [
        ("us1", "BS4"),
        ("us2", "BS6"),
        ("us3", "BS10"),
        ("us4", "BS4"),
        ("us5", "BS11"),
        ("us6", "BS14"),
    ]
    .into_iter()
    .map(|(u, bs)| User {
        id: u.into(),
        base_station: bs.into(),
    })
    .collect();

    Scenario {
        nodes,
        elements,
        links,
        users,
        tasks: Vec::new(),
        weights: ModelWeights::default(),
        horizon_ms: DEFAULT_HORIZON_MS,
        cloud_enabled,
    }
}

/// The bundled two-server demo: three applications whose placement
/// separates a packing-aware policy from a proximity-first one.
///
/// `u1` sits next to `S1`, `u2` next to `S2`; the short horizon means a
/// request that cannot be placed in the first wave is lost.
pub fn builtin_toy() -> Scenario {
    let task = |id: &str, user: &str, cpu: u64, ram: u64, deadline: u64| Task {
        id: id.into(),
        user: user.into(),
        demand: ResourceVector::new(cpu, ram, 0),
        processing_time: 5,
        data_size: 0,
        arrival: 0,
        deadline,
        penalty: DEFAULT_TASK_PENALTY,
    };
    Scenario {
        nodes: vec![edge_node("S1", 5, 5, 1), edge_node("S2", 4, 4, 1)],
        elements: vec![
            NetworkElement {
                id: "BS1".into(),
                kind: ElementKind::BaseStation,
            },
            NetworkElement {
                id: "BS2".into(),
                kind: ElementKind::BaseStation,
            },
        ],
        links: vec![
            link("BS1", "S1", 100, 0),
            link("BS2", "S2", 100, 0),
            link("BS1", "BS2", 100, 1),
        ],
        users: vec![
            User {
                id: "u1".into(),
                base_station: "BS1".into(),
            },
            User {
                id: "u2".into(),
                base_station: "BS2".into(),
            },
            User {
                id: "u3".into(),
                base_station: "BS1".into(),
            },
        ],
        tasks: vec![
            task("APP1", "u1", 2, 2, 20),
            task("APP2", "u2", 1, 2, 10),
            task("APP3", "u3", 4, 1, 30),
        ],
        weights: ModelWeights::default(),
        horizon_ms: 8,
        cloud_enabled: false,
    }
}
