//! Discrete-time execution of a scenario: arrival waves, per-step
//! placement, resource occupancy, delivery, horizon drops, and
//! power/energy accounting.
//!
//! One run is strictly single-threaded and deterministic; concurrent
//! runs share only the immutable [`Scenario`].

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::metrics::{comm_delay_exact_ms, objective_cost, NodeState, TaskTiming};
use crate::routing::{build_routes, RouteTable};
use crate::scenario::{ComputeNode, Id, Scenario, Task, Violation};
use crate::strategy::{NetworkView, PlaceError, PlacementRequest, Strategy};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("unknown strategy: {0}")]
    UnknownStrategy(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(Violation),
    #[error("cpu_in_use {cpu_in_use} outside 0..={capacity} on {node}")]
    PowerDomain {
        node: Id,
        cpu_in_use: u64,
        capacity: u64,
    },
    #[error("strategy returned an infeasible plan: {0}")]
    InfeasiblePlan(String),
    #[error(transparent)]
    Place(#[from] PlaceError),
}

/// Electrical draw of a server at a given CPU allocation: idle draw plus
/// the dynamic band scaled linearly with utilization.
pub fn power_draw(node: &ComputeNode, cpu_in_use: u64) -> Result<f64, SimError> {
    if cpu_in_use > node.capacity.cpu {
        return Err(SimError::PowerDomain {
            node: node.id.clone(),
            cpu_in_use,
            capacity: node.capacity.cpu,
        });
    }
    let utilization = cpu_in_use as f64 / node.capacity.cpu as f64;
    Ok(node.power_idle + (node.power_max - node.power_idle) * utilization)
}

/// Final state of one task after a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub task: Id,
    pub user: Id,
    /// Hosting node; `None` for tasks that never started.
    pub node: Option<Id>,
    pub timing: TaskTiming,
}

/// The response variables of one run plus the per-task ledger.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    /// Tasks delivered after their absolute deadline.
    pub latency_sla_violations: u64,
    /// Tasks never delivered within the horizon.
    pub drop_sla_violations: u64,
    /// Mean delivery latency (finish minus arrival) over delivered tasks.
    pub average_latency_ms: f64,
    /// Time-averaged draw of all servers over the horizon.
    pub power_consumption_w: f64,
    pub energy_joules: f64,
    pub objective: f64,
    pub ledger: Vec<LedgerEntry>,
}

impl RunReport {
    pub const CSV_HEADER: &'static str = "scenario,strategy,workload,cloud,seed,latency_violations,drop_violations,avg_latency_ms,power_w,energy_j,objective";

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn csv_row(
        &self,
        scenario: &str,
        strategy: &str,
        workload: &str,
        cloud: &str,
        seed: u64,
    ) -> String {
        format!(
            "{scenario},{strategy},{workload},{cloud},{seed},{},{},{:.6},{:.6},{:.6},{:.6}",
            self.latency_sla_violations,
            self.drop_sla_violations,
            self.average_latency_ms,
            self.power_consumption_w,
            self.energy_joules,
            self.objective
        )
    }

    pub fn ledger_csv(&self) -> String {
        let mut out = String::from(
            "task,user,node,start_ms,finish_ms,comm_delay_ms,violation_ms,dropped,energy_j\n",
        );
        for entry in &self.ledger {
            let node = entry
                .node
                .as_ref()
                .map(|n| n.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.6}\n",
                entry.task,
                entry.user,
                node,
                entry.timing.start,
                entry.timing.finish,
                entry.timing.comm_delay,
                entry.timing.violation,
                entry.timing.dropped,
                entry.timing.energy
            ));
        }
        out
    }
}

/// Route table plus cumulative per-link transfer load; placements that
/// would push any link past its aggregated-delay ceiling are refused at
/// admission.
struct EngineNetwork<'a> {
    routes: &'a RouteTable,
    link_delay_cap: BTreeMap<(Id, Id), (u64, f64)>, // (bandwidth_mbps, max_delay)
    link_load_ms: BTreeMap<(Id, Id), f64>,
}

impl<'a> EngineNetwork<'a> {
    fn new(scenario: &Scenario, routes: &'a RouteTable) -> Self {
        let link_delay_cap = scenario
            .links
            .iter()
            .map(|l| (l.key(), (l.bandwidth, l.max_delay)))
            .collect();
        EngineNetwork {
            routes,
            link_delay_cap,
            link_load_ms: BTreeMap::new(),
        }
    }

    fn commit(&mut self, user: &Id, node: &Id, data_megabits: u64) {
        let Some(route) = self.routes.route(user, node) else {
            return;
        };
        for key in &route.links {
            let (bandwidth, _) = self.link_delay_cap[key];
            *self.link_load_ms.entry(key.clone()).or_default() +=
                data_megabits as f64 * 1000.0 / bandwidth as f64;
        }
    }
}

impl NetworkView for EngineNetwork<'_> {
    fn bandwidth_mbps(&self, user: &Id, node: &Id) -> Option<u64> {
        self.routes.bandwidth_mbps(user, node)
    }

    fn path_latency_ms(&self, user: &Id, node: &Id) -> Option<u64> {
        self.routes.path_latency_ms(user, node)
    }

    fn nearest_node(&self, user: &Id) -> Option<Id> {
        self.routes.nearest_node(user)
    }

    fn admits(&self, user: &Id, node: &Id, data_megabits: u64) -> bool {
        let Some(route) = self.routes.route(user, node) else {
            return false;
        };
        route.links.iter().all(|key| {
            let (bandwidth, max_delay) = self.link_delay_cap[key];
            let load = self.link_load_ms.get(key).copied().unwrap_or(0.0);
            load + data_megabits as f64 * 1000.0 / bandwidth as f64 <= max_delay + 1e-9
        })
    }
}

/// Convenience wrapper resolving the strategy by its public name.
pub fn simulate_named(
    scenario: &Scenario,
    strategy: &str,
    seed: u64,
) -> Result<RunReport, SimError> {
    let strategy: Strategy = strategy
        .parse()
        .map_err(|_| SimError::UnknownStrategy(strategy.to_owned()))?;
    simulate(scenario, strategy, seed)
}

/// Run the scenario to its horizon under one placement strategy.
///
/// Time advances in 1 ms steps. Each step delivers finished tasks,
/// admits the arrivals, re-offers everything still pending to the
/// strategy against current residuals, and accrues power. Tasks not
/// delivered by the horizon - still pending or still in flight - count
/// as drops.
///
/// The run itself is deterministic; `seed` only labels the report so
/// upstream workload generators and result tables stay aligned.
pub fn simulate(scenario: &Scenario, strategy: Strategy, seed: u64) -> Result<RunReport, SimError> {
    let _ = seed;
    if let Some(first) = crate::scenario::validate(scenario).into_iter().next() {
        return Err(SimError::InvalidScenario(first));
    }

    let routes = build_routes(scenario);
    let mut network = EngineNetwork::new(scenario, &routes);

    let mut states: BTreeMap<Id, NodeState> = scenario
        .active_nodes()
        .map(|n| (n.id.clone(), NodeState::new(n.clone())))
        .collect();

    let horizon = scenario.horizon_ms;
    let mut arrivals: BTreeMap<u64, Vec<&Task>> = BTreeMap::new();
    for task in &scenario.tasks {
        if task.arrival < horizon {
            arrivals.entry(task.arrival).or_default().push(task);
        }
    }
    for batch in arrivals.values_mut() {
        batch.sort_by(|a, b| a.id.cmp(&b.id));
    }

    struct InFlight<'a> {
        task: &'a Task,
        node: Id,
        start: u64,
        finish: u64,
        comm_delay: u64,
        energy: f64,
    }

    let mut pending: Vec<&Task> = Vec::new();
    let mut in_flight: BTreeMap<Id, InFlight> = BTreeMap::new();
    let mut done: BTreeMap<Id, LedgerEntry> = BTreeMap::new();
    let mut energy_joules = 0.0;

    let deliver = |flight: InFlight<'_>, done: &mut BTreeMap<Id, LedgerEntry>| {
        let violation = flight
            .finish
            .saturating_sub(flight.task.arrival + flight.task.deadline);
        done.insert(
            flight.task.id.clone(),
            LedgerEntry {
                task: flight.task.id.clone(),
                user: flight.task.user.clone(),
                node: Some(flight.node),
                timing: TaskTiming {
                    start: flight.start,
                    finish: flight.finish,
                    comm_delay: flight.comm_delay,
                    violation,
                    dropped: false,
                    energy: flight.energy,
                },
            },
        );
    };

    for now in 0..=horizon {
        // Finished tasks release their slots before anything else happens
        // this step, so freed capacity is immediately placeable.
        let finished: Vec<Id> = in_flight
            .iter()
            .filter(|(_, f)| f.finish == now)
            .map(|(id, _)| id.clone())
            .collect();
        for id in finished {
            let flight = in_flight.remove(&id).expect("listed above");
            states
                .get_mut(&flight.node)
                .expect("node exists")
                .release(&flight.task.demand);
            deliver(flight, &mut done);
        }

        if now == horizon {
            break;
        }

        if let Some(batch) = arrivals.remove(&now) {
            pending.extend(batch);
        }

        if !pending.is_empty() {
            let request = PlacementRequest {
                pending: pending.clone(),
                node_states: states.values().cloned().collect(),
                network: &network,
                weights: &scenario.weights,
                now,
            };
            let plan = strategy.place(&request)?;
            for (task_id, node_id) in &plan.assignments {
                let position = pending
                    .iter()
                    .position(|t| &t.id == task_id)
                    .ok_or_else(|| SimError::InfeasiblePlan(format!("{task_id} is not pending")))?;
                // The strategy's admission snapshot predates this wave's own
                // link commitments; an assignment that no longer fits the
                // budget stays pending and is re-offered against the updated
                // loads next step.
                if !network.admits(
                    &pending[position].user,
                    node_id,
                    pending[position].data_size,
                ) {
                    continue;
                }
                let task = pending.remove(position);
                let state = states
                    .get_mut(node_id)
                    .ok_or_else(|| SimError::InfeasiblePlan(format!("unknown node {node_id}")))?;
                if !state.allocate(&task.demand) {
                    return Err(SimError::InfeasiblePlan(format!(
                        "{task_id} does not fit on {node_id}"
                    )));
                }
                let bandwidth = routes.bandwidth_mbps(&task.user, node_id).ok_or_else(|| {
                    SimError::InfeasiblePlan(format!("{} cannot reach {node_id}", task.user))
                })?;
                network.commit(&task.user, node_id, task.data_size);
                let comm_delay = comm_delay_exact_ms(task.data_size, bandwidth);
                let finish = now + task.processing_time + comm_delay;
                let flight = InFlight {
                    task,
                    node: node_id.clone(),
                    start: now,
                    finish,
                    comm_delay,
                    energy: 0.0,
                };
                if finish == now {
                    states
                        .get_mut(node_id)
                        .expect("node exists")
                        .release(&task.demand);
                    deliver(flight, &mut done);
                } else {
                    in_flight.insert(task.id.clone(), flight);
                }
            }
        }

        // Power accounting for [now, now+1): idle draw everywhere plus the
        // dynamic band, attributed to residents by their CPU share.
        for state in states.values() {
            let draw = power_draw(&state.node, state.cpu_in_use())?;
            energy_joules += draw * 1e-3;
        }
        for flight in in_flight.values_mut() {
            let node = &states[&flight.node].node;
            let dynamic = node.power_max - node.power_idle;
            flight.energy +=
                dynamic * (flight.task.demand.cpu as f64 / node.capacity.cpu as f64) * 1e-3;
        }
    }

    // Whatever is still waiting or in flight at the horizon was never
    // delivered.
    for task in pending {
        done.insert(
            task.id.clone(),
            LedgerEntry {
                task: task.id.clone(),
                user: task.user.clone(),
                node: None,
                timing: TaskTiming {
                    start: 0,
                    finish: 0,
                    comm_delay: 0,
                    violation: 0,
                    dropped: true,
                    energy: 0.0,
                },
            },
        );
    }
    for (id, flight) in in_flight {
        done.insert(
            id,
            LedgerEntry {
                task: flight.task.id.clone(),
                user: flight.task.user.clone(),
                node: Some(flight.node),
                timing: TaskTiming {
                    start: flight.start,
                    finish: flight.finish,
                    comm_delay: flight.comm_delay,
                    violation: 0,
                    dropped: true,
                    energy: flight.energy,
                },
            },
        );
    }
    for task in &scenario.tasks {
        // Tasks arriving at or past the horizon never joined a wave.
        done.entry(task.id.clone()).or_insert_with(|| LedgerEntry {
            task: task.id.clone(),
            user: task.user.clone(),
            node: None,
            timing: TaskTiming {
                start: 0,
                finish: 0,
                comm_delay: 0,
                violation: 0,
                dropped: true,
                energy: 0.0,
            },
        });
    }

    let ledger: Vec<LedgerEntry> = done.into_values().collect();
    let delivered: Vec<&LedgerEntry> = ledger.iter().filter(|e| !e.timing.dropped).collect();
    let latency_sla_violations = delivered.iter().filter(|e| e.timing.violation > 0).count() as u64;
    let drop_sla_violations = ledger.len() as u64 - delivered.len() as u64;
    let average_latency_ms = if delivered.is_empty() {
        0.0
    } else {
        let task_by_id: BTreeMap<&Id, &Task> = scenario.tasks.iter().map(|t| (&t.id, t)).collect();
        delivered
            .iter()
            .map(|e| (e.timing.finish - task_by_id[&e.task].arrival) as f64)
            .sum::<f64>()
            / delivered.len() as f64
    };
    let power_consumption_w = if horizon == 0 {
        0.0
    } else {
        energy_joules / (horizon as f64 * 1e-3)
    };

    let objective = {
        let task_by_id: BTreeMap<&Id, &Task> = scenario.tasks.iter().map(|t| (&t.id, t)).collect();
        let pairs: Vec<(Task, TaskTiming)> = ledger
            .iter()
            .map(|e| ((*task_by_id[&e.task]).clone(), e.timing.clone()))
            .collect();
        objective_cost(&pairs, &scenario.weights)
    };

    Ok(RunReport {
        latency_sla_violations,
        drop_sla_violations,
        average_latency_ms,
        power_consumption_w,
        energy_joules,
        objective,
        ledger,
    })
}
