//! Placement policies behind one pluggable contract: urgency-ordered
//! tightest-fit packing, a proximity-first baseline, and an exhaustive
//! optimum for desk-size instances.
//!
//! Strategies are pure functions of a [`PlacementRequest`]: identical
//! requests produce identical plans, and independent requests may be
//! evaluated concurrently.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::metrics::{comm_delay_exact_ms, urgency_score, NodeState};
use crate::scenario::{Id, ModelWeights, Task};

/// Read-only network facts a strategy may consult.
pub trait NetworkView {
    /// Bottleneck bandwidth between a user and a node, in megabits per
    /// second. `None` means unreachable.
    fn bandwidth_mbps(&self, user: &Id, node: &Id) -> Option<u64>;

    /// Total path latency in milliseconds. `None` means unreachable.
    fn path_latency_ms(&self, user: &Id, node: &Id) -> Option<u64>;

    /// The user's closest reachable node by path latency, ties by id.
    fn nearest_node(&self, user: &Id) -> Option<Id>;

    /// Same bandwidth in megabits per millisecond, the unit scores use.
    fn bandwidth_mbit_per_ms(&self, user: &Id, node: &Id) -> Option<f64> {
        self.bandwidth_mbps(user, node).map(|b| b as f64 / 1000.0)
    }

    /// Whether routing `data_megabits` between the pair keeps every link
    /// on the path within its aggregated-delay ceiling. Defaults to
    /// unconstrained.
    fn admits(&self, _user: &Id, _node: &Id, _data_megabits: u64) -> bool {
        true
    }
}

/// Snapshot handed to a strategy: the tasks still waiting, the current
/// residual capacities, and the network facts, at one instant.
pub struct PlacementRequest<'a> {
    pub pending: Vec<&'a Task>,
    pub node_states: Vec<NodeState>,
    pub network: &'a dyn NetworkView,
    pub weights: &'a ModelWeights,
    pub now: u64,
}

/// Ordered task-to-node assignments plus the tasks nothing could host.
/// Together they partition the request's pending set, and replaying the
/// assignments in order never overdraws a node.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlacementPlan {
    pub assignments: Vec<(Id, Id)>,
    pub unplaced: Vec<Id>,
}

#[derive(Debug, Error, PartialEq)]
pub enum PlaceError {
    #[error("instance too large for exhaustive search: {tasks} tasks, {nodes} nodes (limits {max_tasks}/{max_nodes})")]
    InstanceTooLarge {
        tasks: usize,
        nodes: usize,
        max_tasks: usize,
        max_nodes: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Tetris,
    Proximity,
    Optimal,
}

impl Strategy {
    pub fn place(&self, request: &PlacementRequest<'_>) -> Result<PlacementPlan, PlaceError> {
        match self {
            Strategy::Tetris => Ok(tetris_place(request)),
            Strategy::Proximity => Ok(proximity_place(request)),
            Strategy::Optimal => optimal_place(request),
        }
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tetris" => Ok(Strategy::Tetris),
            "proximity" => Ok(Strategy::Proximity),
            "optimal" => Ok(Strategy::Optimal),
            other => Err(format!(
                "unknown strategy: {other} (expected tetris, proximity, or optimal)"
            )),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Tetris => "tetris",
            Strategy::Proximity => "proximity",
            Strategy::Optimal => "optimal",
        })
    }
}

fn feasible(state: &NodeState, task: &Task, network: &dyn NetworkView) -> bool {
    task.demand.fits_within(&state.free)
        && network.bandwidth_mbps(&task.user, &state.node.id).is_some()
        && network.admits(&task.user, &state.node.id, task.data_size)
}

/// Urgency-ordered tightest-fit packing.
///
/// Tasks are processed in ascending order of their composite urgency
/// (bandwidth taken towards the user's nearest node). For each task the
/// residual capacities are re-scored and the candidate list re-sorted
/// ascending, so the task lands on the fullest node that still fits it.
/// Packing tight nodes first keeps balanced capacity blocks free for the
/// demanding tasks that come later, which is what keeps drops away.
pub fn tetris_place(request: &PlacementRequest<'_>) -> PlacementPlan {
    debug_assert!(
        request
            .pending
            .iter()
            .map(|t| &t.id)
            .collect::<BTreeSet<_>>()
            .len()
            == request.pending.len(),
        "pending tasks must not repeat: already-provisioned tasks are never re-offered"
    );

    let mut ordered: Vec<(f64, &Task)> = request
        .pending
        .iter()
        .map(|task| {
            let bandwidth = request
                .network
                .nearest_node(&task.user)
                .and_then(|n| request.network.bandwidth_mbit_per_ms(&task.user, &n));
            let score = match bandwidth {
                Some(b) => urgency_score(task, b, request.weights).unwrap_or(f64::INFINITY),
                None => f64::INFINITY, // unreachable user: processed last, lands unplaced
            };
            (score, *task)
        })
        .collect();
    ordered.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)));

    let mut states = request.node_states.clone();
    let mut plan = PlacementPlan::default();
    for (_, task) in ordered {
        let mut candidates: Vec<usize> = (0..states.len()).collect();
        candidates.sort_by_key(|&i| (states[i].free.product(), states[i].node.id.clone()));
        let chosen = candidates
            .into_iter()
            .find(|&i| feasible(&states[i], task, request.network));
        match chosen {
            Some(i) => {
                let fit = states[i].allocate(&task.demand);
                debug_assert!(fit);
                plan.assignments
                    .push((task.id.clone(), states[i].node.id.clone()));
            }
            None => plan.unplaced.push(task.id.clone()),
        }
    }
    plan
}

/// Proximity-first baseline: tasks in arrival order, each to the
/// feasible node with the shortest path from its user. Greedy delay
/// minimization, blind to the capacity shapes it leaves behind.
pub fn proximity_place(request: &PlacementRequest<'_>) -> PlacementPlan {
    let mut ordered: Vec<&Task> = request.pending.clone();
    ordered.sort_by(|a, b| a.arrival.cmp(&b.arrival).then_with(|| a.id.cmp(&b.id)));

    let mut states = request.node_states.clone();
    let mut plan = PlacementPlan::default();
    for task in ordered {
        let mut candidates: Vec<(u64, usize)> = states
            .iter()
            .enumerate()
            .filter_map(|(i, s)| {
                request
                    .network
                    .path_latency_ms(&task.user, &s.node.id)
                    .map(|lat| (lat, i))
            })
            .collect();
        candidates.sort_by_key(|&(lat, i)| (lat, states[i].node.id.clone()));
        let chosen = candidates
            .into_iter()
            .map(|(_, i)| i)
            .find(|&i| feasible(&states[i], task, request.network));
        match chosen {
            Some(i) => {
                let fit = states[i].allocate(&task.demand);
                debug_assert!(fit);
                plan.assignments
                    .push((task.id.clone(), states[i].node.id.clone()));
            }
            None => plan.unplaced.push(task.id.clone()),
        }
    }
    plan
}

pub const OPTIMAL_MAX_TASKS: usize = 8;
pub const OPTIMAL_MAX_NODES: usize = 4;

/// Exhaustive minimum over every capacity-respecting assignment of each
/// task to a node or to the drop bucket, ranked by drop count first and
/// total cost second. Ties resolve to the lexicographically first
/// assignment vector (tasks in id order, node options in id order, drop
/// last), so the result is deterministic.
///
/// Only instances within [`OPTIMAL_MAX_TASKS`] x [`OPTIMAL_MAX_NODES`]
/// are accepted; the search is factorial in both.
pub fn optimal_place(request: &PlacementRequest<'_>) -> Result<PlacementPlan, PlaceError> {
    if request.pending.len() > OPTIMAL_MAX_TASKS || request.node_states.len() > OPTIMAL_MAX_NODES {
        return Err(PlaceError::InstanceTooLarge {
            tasks: request.pending.len(),
            nodes: request.node_states.len(),
            max_tasks: OPTIMAL_MAX_TASKS,
            max_nodes: OPTIMAL_MAX_NODES,
        });
    }

    let mut tasks: Vec<&Task> = request.pending.clone();
    tasks.sort_by(|a, b| a.id.cmp(&b.id));
    let mut nodes: Vec<NodeState> = request.node_states.clone();
    nodes.sort_by(|a, b| a.node.id.cmp(&b.node.id));

    // choice per task: Some(node index) or None for drop.
    struct Search<'s, 'a> {
        tasks: &'s [&'a Task],
        nodes: &'s mut Vec<NodeState>,
        network: &'a dyn NetworkView,
        weights: &'a ModelWeights,
        now: u64,
        choices: Vec<Option<usize>>,
        best: Option<(usize, f64, Vec<Option<usize>>)>,
    }

    impl Search<'_, '_> {
        fn run(&mut self, depth: usize, drops: usize, cost: f64) {
            if let Some((best_drops, best_cost, _)) = &self.best {
                // The partial (drops, cost) only grows; prune dominated branches.
                if drops > *best_drops || (drops == *best_drops && cost > *best_cost) {
                    return;
                }
            }
            if depth == self.tasks.len() {
                let candidate = (drops, cost, self.choices.clone());
                let better = match &self.best {
                    None => true,
                    Some((d, c, _)) => drops < *d || (drops == *d && cost < *c),
                };
                if better {
                    self.best = Some(candidate);
                }
                return;
            }
            let task = self.tasks[depth];
            for i in 0..self.nodes.len() {
                let Some(bandwidth) = self
                    .network
                    .bandwidth_mbps(&task.user, &self.nodes[i].node.id)
                else {
                    continue;
                };
                if !self.nodes[i].allocate(&task.demand) {
                    continue;
                }
                let finish = self.now
                    + task.processing_time
                    + comm_delay_exact_ms(task.data_size, bandwidth);
                let violation = finish.saturating_sub(task.arrival + task.deadline);
                let step_cost = task.penalty * violation as f64
                    + self.weights.omega * (finish - task.arrival) as f64;
                self.choices[depth] = Some(i);
                self.run(depth + 1, drops, cost + step_cost);
                self.choices[depth] = None;
                self.nodes[i].release(&task.demand);
            }
            self.choices[depth] = None;
            self.run(depth + 1, drops + 1, cost + self.weights.rho);
        }
    }

    let task_count = tasks.len();
    let mut search = Search {
        tasks: &tasks,
        nodes: &mut nodes,
        network: request.network,
        weights: request.weights,
        now: request.now,
        choices: vec![None; task_count],
        best: None,
    };
    search.run(0, 0, 0.0);

    let (_, _, choices) = search.best.expect("the all-drop assignment always exists");
    let mut plan = PlacementPlan::default();
    for (task, choice) in tasks.iter().zip(&choices) {
        match choice {
            Some(i) => plan
                .assignments
                .push((task.id.clone(), nodes[*i].node.id.clone())),
            None => plan.unplaced.push(task.id.clone()),
        }
    }
    Ok(plan)
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use std::collections::BTreeMap;

    /// Map-backed network for strategy-level tests: every (user, node)
    /// pair gets an explicit (latency, bandwidth) entry.
    #[derive(Default)]
    pub struct TableNetwork {
        pub entries: BTreeMap<(Id, Id), (u64, u64)>,
    }

    impl TableNetwork {
        /// Blanket network: every listed user reaches every listed node at
        /// the same latency/bandwidth.
        pub fn blanket(users: &[&str], nodes: &[&str], latency: u64, mbps: u64) -> Self {
            let mut entries = BTreeMap::new();
            for u in users {
                for n in nodes {
                    entries.insert((Id::from(*u), Id::from(*n)), (latency, mbps));
                }
            }
            TableNetwork { entries }
        }

        pub fn set(&mut self, user: &str, node: &str, latency: u64, mbps: u64) {
            self.entries
                .insert((user.into(), node.into()), (latency, mbps));
        }
    }

    impl NetworkView for TableNetwork {
        fn bandwidth_mbps(&self, user: &Id, node: &Id) -> Option<u64> {
            self.entries
                .get(&(user.clone(), node.clone()))
                .map(|&(_, b)| b)
        }

        fn path_latency_ms(&self, user: &Id, node: &Id) -> Option<u64> {
            self.entries
                .get(&(user.clone(), node.clone()))
                .map(|&(l, _)| l)
        }

        fn nearest_node(&self, user: &Id) -> Option<Id> {
            self.entries
                .iter()
                .filter(|((u, _), _)| u == user)
                .map(|((_, n), (l, _))| (*l, n.clone()))
                .min()
                .map(|(_, n)| n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::TableNetwork;
    use super::Strategy as Strat;
    use super::*;
    use crate::scenario::{builtin_toy, ComputeNode, NodeTier, ResourceVector};
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn node(id: &str, cpu: u64, ram: u64) -> NodeState {
        NodeState::new(ComputeNode {
            id: id.into(),
            tier: NodeTier::Edge,
            capacity: ResourceVector::new(cpu, ram, 1),
            power_idle: 90.0,
            power_max: 180.0,
        })
    }

    fn toy_request<'a>(
        tasks: &'a [Task],
        network: &'a dyn NetworkView,
        weights: &'a ModelWeights,
    ) -> PlacementRequest<'a> {
        PlacementRequest {
            pending: tasks.iter().collect(),
            node_states: vec![node("S1", 5, 5), node("S2", 4, 4)],
            network,
            weights,
            now: 0,
        }
    }

    fn toy_network() -> TableNetwork {
        let mut n = TableNetwork::blanket(&["u1", "u2", "u3"], &["S1", "S2"], 1, 100);
        n.set("u1", "S1", 0, 100);
        n.set("u2", "S2", 0, 100);
        n.set("u3", "S1", 0, 100);
        n
    }

    #[test]
    fn tetris_places_all_three_toy_tasks() {
        let scenario = builtin_toy();
        let network = toy_network();
        let weights = ModelWeights::default();
        let request = toy_request(&scenario.tasks, &network, &weights);
        let plan = tetris_place(&request);
        assert!(plan.unplaced.is_empty());
        assert_eq!(
            plan.assignments,
            vec![
                (Id::from("APP2"), Id::from("S2")),
                (Id::from("APP1"), Id::from("S2")),
                (Id::from("APP3"), Id::from("S1")),
            ]
        );
    }

    #[test]
    fn proximity_strands_the_wide_task() {
        let scenario = builtin_toy();
        let network = toy_network();
        let weights = ModelWeights::default();
        let request = toy_request(&scenario.tasks, &network, &weights);
        let plan = proximity_place(&request);
        assert_eq!(
            plan.assignments,
            vec![
                (Id::from("APP1"), Id::from("S1")),
                (Id::from("APP2"), Id::from("S2"))
            ]
        );
        assert_eq!(plan.unplaced, vec![Id::from("APP3")]);
    }

    #[test]
    fn empty_pending_list_yields_empty_plan() {
        let network = toy_network();
        let weights = ModelWeights::default();
        let request = toy_request(&[], &network, &weights);
        for strategy in [Strat::Tetris, Strat::Proximity, Strat::Optimal] {
            let plan = strategy.place(&request).unwrap();
            assert_eq!(plan, PlacementPlan::default());
        }
    }

    fn simple_task(id: &str, user: &str, cpu: u64, ram: u64, deadline: u64) -> Task {
        Task {
            id: id.into(),
            user: user.into(),
            demand: ResourceVector::new(cpu, ram, 0),
            processing_time: 5,
            data_size: 0,
            arrival: 0,
            deadline,
            penalty: 1.0,
        }
    }

    #[test]
    fn proximity_single_feasible_node() {
        let tasks = [simple_task("t", "u1", 2, 2, 10)];
        let network = TableNetwork::blanket(&["u1"], &["S1"], 1, 100);
        let weights = ModelWeights::default();
        let request = PlacementRequest {
            pending: tasks.iter().collect(),
            node_states: vec![node("S1", 2, 2)],
            network: &network,
            weights: &weights,
            now: 0,
        };
        let plan = proximity_place(&request);
        assert_eq!(plan.assignments, vec![(Id::from("t"), Id::from("S1"))]);
    }

    #[test]
    fn oversized_task_is_unplaced_everywhere() {
        let tasks = vec![simple_task("t", "u1", 100, 100, 10)];
        let network = TableNetwork::blanket(&["u1"], &["S1", "S2"], 1, 100);
        let weights = ModelWeights::default();
        let request = toy_request(&tasks, &network, &weights);
        assert_eq!(proximity_place(&request).unplaced, vec![Id::from("t")]);
        assert_eq!(tetris_place(&request).unplaced, vec![Id::from("t")]);
    }

    #[test]
    fn optimal_certifies_toy_is_drop_free() {
        let scenario = builtin_toy();
        let network = toy_network();
        let weights = ModelWeights::default();
        let request = toy_request(&scenario.tasks, &network, &weights);
        let plan = optimal_place(&request).unwrap();
        assert!(plan.unplaced.is_empty());
    }

    #[test]
    fn optimal_drops_what_cannot_fit() {
        let tasks = [simple_task("t", "u1", 9, 9, 10)];
        let network = TableNetwork::blanket(&["u1"], &["S1"], 1, 100);
        let weights = ModelWeights::default();
        let request = PlacementRequest {
            pending: tasks.iter().collect(),
            node_states: vec![node("S1", 2, 2)],
            network: &network,
            weights: &weights,
            now: 0,
        };
        let plan = optimal_place(&request).unwrap();
        assert_eq!(plan.unplaced, vec![Id::from("t")]);
    }

    #[test]
    fn optimal_enforces_instance_guards() {
        let tasks: Vec<Task> = (0..9)
            .map(|i| simple_task(&format!("t{i}"), "u1", 1, 1, 10))
            .collect();
        let network = TableNetwork::blanket(&["u1"], &["S1"], 1, 100);
        let weights = ModelWeights::default();
        let request = PlacementRequest {
            pending: tasks.iter().collect(),
            node_states: vec![node("S1", 100, 100)],
            network: &network,
            weights: &weights,
            now: 0,
        };
        assert!(matches!(
            optimal_place(&request),
            Err(PlaceError::InstanceTooLarge { tasks: 9, .. })
        ));
    }

    #[test]
    fn strategy_names_parse() {
        assert_eq!("tetris".parse::<Strat>().unwrap(), Strat::Tetris);
        assert_eq!("proximity".parse::<Strat>().unwrap(), Strat::Proximity);
        assert_eq!("optimal".parse::<Strat>().unwrap(), Strat::Optimal);
        assert!("nearest".parse::<Strat>().is_err());
    }

    // ---- property suite ---------------------------------------------------

    prop_compose! {
        fn arb_instance()(
            node_caps in proptest::collection::vec((1u64..20, 1u64..20), 1..10),
            task_demands in proptest::collection::vec((0u64..15, 0u64..15, 0u64..100, 1u64..60), 0..50),
        ) -> (Vec<(u64, u64)>, Vec<(u64, u64, u64, u64)>) {
            (node_caps, task_demands)
        }
    }

    fn build_instance(
        node_caps: &[(u64, u64)],
        task_demands: &[(u64, u64, u64, u64)],
    ) -> (Vec<NodeState>, Vec<Task>) {
        let states: Vec<NodeState> = node_caps
            .iter()
            .enumerate()
            .map(|(i, &(cpu, ram))| node(&format!("n{i:02}"), cpu, ram))
            .collect();
        let tasks: Vec<Task> = task_demands
            .iter()
            .enumerate()
            .map(|(i, &(cpu, ram, arrival, deadline))| Task {
                id: format!("t{i:02}").into(),
                user: "u".into(),
                demand: ResourceVector::new(cpu.max(1), ram, 0),
                processing_time: 1,
                data_size: 0,
                arrival,
                deadline,
                penalty: 1.0,
            })
            .collect();
        (states, tasks)
    }

    fn replay_respects_capacity(plan: &PlacementPlan, states: &[NodeState], tasks: &[Task]) {
        let mut free: BTreeMap<&Id, ResourceVector> =
            states.iter().map(|s| (&s.node.id, s.free)).collect();
        for (task_id, node_id) in &plan.assignments {
            let task = tasks.iter().find(|t| &t.id == task_id).expect("known task");
            let slot = free.get_mut(node_id).expect("known node");
            assert!(task.demand.fits_within(slot), "overdraw on {node_id}");
            *slot = slot.saturating_sub(&task.demand);
        }
    }

    fn assert_partition(plan: &PlacementPlan, tasks: &[Task]) {
        let mut seen: Vec<&Id> = plan
            .assignments
            .iter()
            .map(|(t, _)| t)
            .chain(plan.unplaced.iter())
            .collect();
        seen.sort();
        assert_eq!(seen.len(), tasks.len());
        let mut expected: Vec<&Id> = tasks.iter().map(|t| &t.id).collect();
        expected.sort();
        assert_eq!(seen, expected);
    }

    proptest! {
        #[test]
        fn plans_partition_and_respect_capacity((node_caps, task_demands) in arb_instance()) {
            let (states, tasks) = build_instance(&node_caps, &task_demands);
            let node_names: Vec<String> =
                states.iter().map(|s| s.node.id.to_string()).collect();
            let node_refs: Vec<&str> = node_names.iter().map(|s| s.as_str()).collect();
            let network = TableNetwork::blanket(&["u"], &node_refs, 1, 100);
            let weights = ModelWeights::default();
            let request = PlacementRequest {
                pending: tasks.iter().collect(),
                node_states: states.clone(),
                network: &network,
                weights: &weights,
                now: 0,
            };
            for plan in [tetris_place(&request), proximity_place(&request)] {
                assert_partition(&plan, &tasks);
                replay_respects_capacity(&plan, &states, &tasks);
            }
        }

        #[test]
        fn tetris_processes_in_nondecreasing_urgency((node_caps, task_demands) in arb_instance()) {
            let (states, tasks) = build_instance(&node_caps, &task_demands);
            let node_names: Vec<String> =
                states.iter().map(|s| s.node.id.to_string()).collect();
            let node_refs: Vec<&str> = node_names.iter().map(|s| s.as_str()).collect();
            let network = TableNetwork::blanket(&["u"], &node_refs, 1, 100);
            let weights = ModelWeights::default();
            let request = PlacementRequest {
                pending: tasks.iter().collect(),
                node_states: states,
                network: &network,
                weights: &weights,
                now: 0,
            };
            let plan = tetris_place(&request);
            let score = |id: &Id| {
                let task = tasks.iter().find(|t| &t.id == id).unwrap();
                urgency_score(task, 0.1, &weights).unwrap()
            };
            let assigned: Vec<f64> = plan.assignments.iter().map(|(t, _)| score(t)).collect();
            for pair in assigned.windows(2) {
                prop_assert!(pair[0] <= pair[1]);
            }
        }

        #[test]
        fn tetris_picks_minimal_capacity_fit((node_caps, task_demands) in arb_instance()) {
            let (states, tasks) = build_instance(&node_caps, &task_demands);
            let node_names: Vec<String> =
                states.iter().map(|s| s.node.id.to_string()).collect();
            let node_refs: Vec<&str> = node_names.iter().map(|s| s.as_str()).collect();
            let network = TableNetwork::blanket(&["u"], &node_refs, 1, 100);
            let weights = ModelWeights::default();
            let request = PlacementRequest {
                pending: tasks.iter().collect(),
                node_states: states.clone(),
                network: &network,
                weights: &weights,
                now: 0,
            };
            let plan = tetris_place(&request);
            // Replay: at each assignment, no fitting node scores lower than
            // the chosen one.
            let mut free: BTreeMap<&Id, ResourceVector> =
                states.iter().map(|s| (&s.node.id, s.free)).collect();
            for (task_id, node_id) in &plan.assignments {
                let task = tasks.iter().find(|t| &t.id == task_id).unwrap();
                let chosen = (free[node_id].product(), node_id.clone());
                for (id, vec) in &free {
                    if task.demand.fits_within(vec) {
                        prop_assert!((vec.product(), (*id).clone()) >= chosen);
                    }
                }
                let slot = free.get_mut(node_id).unwrap();
                *slot = slot.saturating_sub(&task.demand);
            }
        }

        #[test]
        fn strategies_are_deterministic((node_caps, task_demands) in arb_instance()) {
            let (states, tasks) = build_instance(&node_caps, &task_demands);
            let node_names: Vec<String> =
                states.iter().map(|s| s.node.id.to_string()).collect();
            let node_refs: Vec<&str> = node_names.iter().map(|s| s.as_str()).collect();
            let network = TableNetwork::blanket(&["u"], &node_refs, 1, 100);
            let weights = ModelWeights::default();
            let request = PlacementRequest {
                pending: tasks.iter().collect(),
                node_states: states,
                network: &network,
                weights: &weights,
                now: 0,
            };
            prop_assert_eq!(tetris_place(&request), tetris_place(&request));
            prop_assert_eq!(proximity_place(&request), proximity_place(&request));
        }
    }
}
