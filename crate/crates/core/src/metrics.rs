//! Pure cost-model primitives: the urgency and capacity scores, task
//! timing, the run objective, and the capacity / network constraint
//! checks. Everything here is reentrant and side-effect free.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::scenario::{ComputeNode, Id, ModelWeights, ResourceVector, Scenario, Task, Violation};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("effective bandwidth must be positive (got {0})")]
    NonPositiveBandwidth(f64),
}

/// A server together with its residual capacity.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeState {
    pub node: ComputeNode,
    pub free: ResourceVector,
}

impl NodeState {
    /// Fresh state with the whole capacity available.
    pub fn new(node: ComputeNode) -> Self {
        let free = node.capacity;
        NodeState { node, free }
    }

    /// Reserve `demand` if it fits; returns whether it did.
    pub fn allocate(&mut self, demand: &ResourceVector) -> bool {
        if demand.fits_within(&self.free) {
            self.free = self.free.saturating_sub(demand);
            true
        } else {
            false
        }
    }

    pub fn release(&mut self, demand: &ResourceVector) {
        self.free = self.free.add(demand);
        debug_assert!(self.free.fits_within(&self.node.capacity));
    }

    pub fn cpu_in_use(&self) -> u64 {
        self.node.capacity.cpu - self.free.cpu
    }
}

/// Timing ledger for one task. `violation` is meaningful only for
/// delivered tasks; `energy` covers every step the task was resident,
/// including tasks cut off by the horizon.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct TaskTiming {
    pub start: u64,
    pub finish: u64,
    pub comm_delay: u64,
    pub violation: u64,
    pub dropped: bool,
    pub energy: f64,
}

/// Composite urgency of a task: `alpha*deadline + beta*processing_time
/// + gamma_w*(data_size/bandwidth)`. Lower means more urgent.
///
/// `bandwidth` is in megabits per millisecond.
pub fn urgency_score(
    task: &Task,
    bandwidth: f64,
    weights: &ModelWeights,
) -> Result<f64, MetricsError> {
    if bandwidth <= 0.0 {
        return Err(MetricsError::NonPositiveBandwidth(bandwidth));
    }
    Ok(weights.alpha * task.deadline as f64
        + weights.beta * task.processing_time as f64
        + weights.gamma_w * (task.data_size as f64 / bandwidth))
}

/// Composite capacity of a node: geometric mean of the residual CPU,
/// RAM, and storage. Zero whenever any component is exhausted; filling
/// nodes in ascending order of this score packs tight nodes first and
/// keeps balanced blocks free.
pub fn capacity_score(free: &ResourceVector) -> f64 {
    (free.product() as f64).cbrt()
}

/// Transfer delay in whole milliseconds, rounded up.
///
/// `bandwidth` is in megabits per millisecond. Quotients within 1e-9 of
/// an integer are snapped to it first so that binary noise in, say,
/// `9.0 / 0.1` does not buy an extra millisecond.
pub fn comm_delay_ms(data_megabits: u64, bandwidth: f64) -> Result<u64, MetricsError> {
    if bandwidth <= 0.0 {
        return Err(MetricsError::NonPositiveBandwidth(bandwidth));
    }
    if data_megabits == 0 {
        return Ok(0);
    }
    let q = data_megabits as f64 / bandwidth;
    let nearest = q.round();
    let snapped = if (q - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        q.ceil()
    };
    Ok(snapped as u64)
}

/// Exact integer variant of [`comm_delay_ms`] for link-rate bandwidths
/// given in megabits per second.
pub fn comm_delay_exact_ms(data_megabits: u64, bandwidth_mbps: u64) -> u64 {
    debug_assert!(bandwidth_mbps > 0);
    (data_megabits * 1000).div_ceil(bandwidth_mbps)
}

/// Completion time: start plus processing plus the rounded-up transfer
/// delay of the task's payload.
pub fn finish_time(start: u64, task: &Task, bandwidth: f64) -> Result<u64, MetricsError> {
    Ok(start + task.processing_time + comm_delay_ms(task.data_size, bandwidth)?)
}

/// Milliseconds past the absolute deadline, clamped at zero.
pub fn deadline_violation(finish: u64, task: &Task) -> u64 {
    finish.saturating_sub(task.arrival + task.deadline)
}

/// Total run cost over a finalized ledger.
///
/// Delivered tasks pay `penalty * violation + omega * (finish - arrival)`;
/// dropped tasks pay `rho` instead (their finish time is undefined).
/// Energy is charged for every task at `eta` per joule.
pub fn objective_cost(ledger: &[(Task, TaskTiming)], weights: &ModelWeights) -> f64 {
    let mut total = 0.0;
    for (task, timing) in ledger {
        if timing.dropped {
            total += weights.rho;
        } else {
            total += task.penalty * timing.violation as f64
                + weights.omega * (timing.finish - task.arrival) as f64;
        }
        total += weights.eta * timing.energy;
    }
    total
}

/// One violation per node and resource dimension whose summed demand
/// exceeds capacity.
pub fn check_capacity(
    assignments: &BTreeMap<Id, Vec<Task>>,
    scenario: &Scenario,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for (node_id, tasks) in assignments {
        let Some(node) = scenario.node(node_id) else {
            out.push(Violation {
                entity: node_id.to_string(),
                rule: "assignment references an unknown node".into(),
            });
            continue;
        };
        let mut total = ResourceVector::ZERO;
        for task in tasks {
            total = total.add(&task.demand);
        }
        for (dim, used, cap) in [
            ("cpu", total.cpu, node.capacity.cpu),
            ("ram", total.ram, node.capacity.ram),
            ("storage", total.storage, node.capacity.storage),
        ] {
            if used > cap {
                out.push(Violation {
                    entity: node_id.to_string(),
                    rule: format!("{dim} demand {used} exceeds capacity {cap}"),
                });
            }
        }
    }
    out
}

/// Per-task routes as ordered lists of normalized link keys.
pub type TaskRoutes = BTreeMap<Id, Vec<(Id, Id)>>;

/// One violation per link whose aggregated transfer delay exceeds its
/// ceiling. The bound is inclusive: a load exactly at `max_delay` is
/// fine.
pub fn check_network(
    assignments: &BTreeMap<Id, Vec<Task>>,
    routes: &TaskRoutes,
    scenario: &Scenario,
) -> Vec<Violation> {
    let mut load: BTreeMap<(Id, Id), f64> = BTreeMap::new();
    for tasks in assignments.values() {
        for task in tasks {
            for key in routes.get(&task.id).into_iter().flatten() {
                let Some(link) = scenario.links.iter().find(|l| &l.key() == key) else {
                    continue;
                };
                *load.entry(key.clone()).or_default() +=
                    task.data_size as f64 * 1000.0 / link.bandwidth as f64;
            }
        }
    }

    let mut out = Vec::new();
    for (key, delay) in &load {
        let Some(link) = scenario.links.iter().find(|l| &l.key() == key) else {
            continue;
        };
        if *delay > link.max_delay + 1e-9 {
            out.push(Violation {
                entity: format!("link {}~{}", key.0, key.1),
                rule: format!(
                    "aggregated transfer delay {delay:.3} ms exceeds max_delay {} ms",
                    link.max_delay
                ),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{builtin_toy, Link};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn task(deadline: u64, processing: u64, data: u64) -> Task {
        Task {
            id: "t".into(),
            user: "u".into(),
            demand: ResourceVector::new(1, 1, 0),
            processing_time: processing,
            data_size: data,
            arrival: 0,
            deadline,
            penalty: 1.0,
        }
    }

    fn unit_weights() -> ModelWeights {
        ModelWeights {
            alpha: 1.0,
            beta: 1.0,
            gamma_w: 1.0,
            omega: 1.0,
            rho: 100.0,
            eta: 0.0,
        }
    }

    #[test]
    fn urgency_deadline_only() {
        let w = unit_weights();
        let score = urgency_score(&task(10, 0, 0), 3.0, &w).unwrap();
        assert_relative_eq!(score, 10.0, max_relative = 1e-9);
    }

    #[test]
    fn urgency_all_terms() {
        let w = unit_weights();
        let score = urgency_score(&task(20, 5, 8), 4.0, &w).unwrap();
        assert_relative_eq!(score, 27.0, max_relative = 1e-9);
    }

    #[test]
    fn urgency_orders_toy_tasks_by_deadline() {
        // Equal processing time and payload leave only the deadline term.
        let w = unit_weights();
        let app1 = urgency_score(&task(20, 5, 4), 2.0, &w).unwrap();
        let app2 = urgency_score(&task(10, 5, 4), 2.0, &w).unwrap();
        let app3 = urgency_score(&task(30, 5, 4), 2.0, &w).unwrap();
        assert!(app2 < app1 && app1 < app3);
    }

    #[test]
    fn urgency_rejects_nonpositive_bandwidth() {
        let w = unit_weights();
        assert_eq!(
            urgency_score(&task(1, 1, 1), 0.0, &w),
            Err(MetricsError::NonPositiveBandwidth(0.0))
        );
    }

    #[test]
    fn capacity_score_equal_components() {
        assert_relative_eq!(
            capacity_score(&ResourceVector::new(8, 8, 8)),
            8.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn capacity_score_zero_component_annihilates() {
        assert_eq!(capacity_score(&ResourceVector::new(0, 16384, 131072)), 0.0);
    }

    #[test]
    fn capacity_score_pinned_cube_root() {
        // 8 * 16384 * 131072 = 17_179_869_184; cube root pinned from a
        // high-precision oracle to nine significant digits.
        let free = ResourceVector::new(8, 16384, 131072);
        assert_eq!(free.product(), 17_179_869_184);
        assert_relative_eq!(capacity_score(&free), 2580.31831, max_relative = 1e-9);
    }

    #[test]
    fn finish_time_rounds_transfer_up() {
        assert_eq!(finish_time(0, &task(100, 3, 10), 5.0).unwrap(), 5);
        assert_eq!(finish_time(7, &task(100, 0, 0), 1.0).unwrap(), 7);
        assert_eq!(finish_time(0, &task(100, 3, 9), 5.0).unwrap(), 5);
    }

    #[test]
    fn comm_delay_matches_exact_rational_arithmetic() {
        // Oracle: ceil(data * 1000 / mbps) in integer arithmetic.
        for mbps in [1u64, 3, 5, 10, 35, 40, 100, 1000] {
            for data in 0u64..=50 {
                let oracle = if data == 0 {
                    0
                } else {
                    (data * 1000).div_ceil(mbps)
                };
                assert_eq!(
                    comm_delay_exact_ms(data, mbps),
                    oracle,
                    "exact {data}/{mbps}"
                );
                let float = comm_delay_ms(data, mbps as f64 / 1000.0).unwrap();
                assert_eq!(float, oracle, "float {data}/{mbps}");
            }
        }
    }

    #[test]
    fn deadline_violation_examples() {
        assert_eq!(deadline_violation(25, &task(20, 0, 0)), 5);
        assert_eq!(deadline_violation(15, &task(20, 0, 0)), 0);
        let mut late_arrival = task(20, 0, 0);
        late_arrival.arrival = 10;
        assert_eq!(deadline_violation(30, &late_arrival), 0);
    }

    #[test]
    fn objective_examples() {
        let w = unit_weights();
        let delivered = (
            task(20, 0, 0),
            TaskTiming {
                start: 0,
                finish: 25,
                comm_delay: 0,
                violation: 5,
                dropped: false,
                energy: 0.0,
            },
        );
        assert_relative_eq!(objective_cost(&[delivered], &w), 30.0, max_relative = 1e-9);

        let dropped = (
            task(20, 0, 0),
            TaskTiming {
                start: 0,
                finish: 0,
                comm_delay: 0,
                violation: 0,
                dropped: true,
                energy: 0.0,
            },
        );
        assert_relative_eq!(objective_cost(&[dropped], &w), 100.0, max_relative = 1e-9);

        assert_eq!(objective_cost(&[], &w), 0.0);
    }

    fn toy_task(id: &str, cpu: u64, ram: u64) -> Task {
        Task {
            id: id.into(),
            user: "u1".into(),
            demand: ResourceVector::new(cpu, ram, 0),
            processing_time: 5,
            data_size: 0,
            arrival: 0,
            deadline: 20,
            penalty: 1.0,
        }
    }

    #[test]
    fn capacity_check_on_two_server_split() {
        let scenario = builtin_toy();
        let mut assignments = BTreeMap::new();
        assignments.insert(
            Id::from("S2"),
            vec![toy_task("APP1", 2, 2), toy_task("APP2", 1, 2)],
        );
        assignments.insert(Id::from("S1"), vec![toy_task("APP3", 4, 1)]);
        assert_eq!(check_capacity(&assignments, &scenario), vec![]);
    }

    #[test]
    fn capacity_check_flags_overloaded_cpu() {
        let scenario = builtin_toy();
        let mut assignments = BTreeMap::new();
        assignments.insert(
            Id::from("S2"),
            vec![
                toy_task("APP1", 2, 2),
                toy_task("APP2", 1, 2),
                toy_task("APP3", 4, 1),
            ],
        );
        let violations = check_capacity(&assignments, &scenario);
        assert_eq!(violations.len(), 2); // cpu 7 > 4 and ram 5 > 4
        assert!(violations[0].entity == "S2" && violations[0].rule.contains("cpu demand 7"));
    }

    #[test]
    fn capacity_check_empty_is_clean() {
        assert_eq!(check_capacity(&BTreeMap::new(), &builtin_toy()), vec![]);
    }

    fn network_fixture(max_delay: f64) -> Scenario {
        let mut s = builtin_toy();
        s.tasks.clear();
        s.links = vec![Link {
            endpoint_a: "BS1".into(),
            endpoint_b: "S1".into(),
            bandwidth: 10_000, // 10 Mbit per millisecond
            latency: 0,
            max_delay,
        }];
        s.nodes.truncate(1);
        s.elements.truncate(1);
        s.users.truncate(1);
        s
    }

    #[test]
    fn network_check_no_routes_is_clean() {
        let s = network_fixture(5.0);
        assert_eq!(
            check_network(&BTreeMap::new(), &TaskRoutes::new(), &s),
            vec![]
        );
    }

    #[test]
    fn network_check_flags_overloaded_link() {
        let s = network_fixture(5.0);
        let mut t = toy_task("big", 1, 1);
        t.data_size = 100; // 10 ms of occupancy at 10 Mbit/ms vs 5 allowed
        let mut assignments = BTreeMap::new();
        assignments.insert(Id::from("S1"), vec![t]);
        let mut routes = TaskRoutes::new();
        routes.insert("big".into(), vec![(Id::from("BS1"), Id::from("S1"))]);
        let violations = check_network(&assignments, &routes, &s);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].entity.contains("BS1~S1"));
    }

    #[test]
    fn network_check_boundary_is_inclusive() {
        let s = network_fixture(4.0);
        let mut a = toy_task("a", 1, 1);
        a.data_size = 20; // 2 ms each at 10 Mbit/ms
        let mut b = toy_task("b", 1, 1);
        b.data_size = 20;
        let mut assignments = BTreeMap::new();
        assignments.insert(Id::from("S1"), vec![a, b]);
        let mut routes = TaskRoutes::new();
        routes.insert("a".into(), vec![(Id::from("BS1"), Id::from("S1"))]);
        routes.insert("b".into(), vec![(Id::from("BS1"), Id::from("S1"))]);
        assert_eq!(check_network(&assignments, &routes, &s), vec![]);
    }

    proptest! {
        #[test]
        fn urgency_is_monotone(
            d in 0u64..1000, t in 0u64..1000, delta in 0u64..1000,
            b in 1u64..100, bump in 1u64..50,
        ) {
            let w = unit_weights();
            let base = urgency_score(&task(d, t, delta), b as f64, &w).unwrap();
            prop_assert!(urgency_score(&task(d + bump, t, delta), b as f64, &w).unwrap() >= base);
            prop_assert!(urgency_score(&task(d, t + bump, delta), b as f64, &w).unwrap() >= base);
            prop_assert!(urgency_score(&task(d, t, delta + bump), b as f64, &w).unwrap() >= base);
            prop_assert!(urgency_score(&task(d, t, delta), (b + bump) as f64, &w).unwrap() <= base);
        }

        #[test]
        fn capacity_score_is_symmetric_and_homogeneous(
            a in 0u64..100_000, b in 0u64..100_000, c in 0u64..100_000, k in 1u64..50,
        ) {
            let base = capacity_score(&ResourceVector::new(a, b, c));
            for (x, y, z) in [(a, c, b), (b, a, c), (c, b, a)] {
                let permuted = capacity_score(&ResourceVector::new(x, y, z));
                prop_assert!((permuted - base).abs() <= 1e-9 * base.max(1.0));
            }
            let scaled = capacity_score(&ResourceVector::new(k * a, k * b, k * c));
            prop_assert!((scaled - k as f64 * base).abs() <= 1e-9 * scaled.max(1.0));
        }

        #[test]
        fn uniform_scaling_preserves_capacity_ordering(
            frees in proptest::collection::vec((0u64..1000, 0u64..1000, 0u64..1000), 1..8),
            k in 1u64..20,
        ) {
            // Ascending order of the score, including ties, is invariant
            // under scaling every node's residual vector by the same factor.
            let order = |vs: &[ResourceVector]| {
                let mut idx: Vec<usize> = (0..vs.len()).collect();
                idx.sort_by_key(|&i| (vs[i].product(), i));
                idx
            };
            let base: Vec<ResourceVector> =
                frees.iter().map(|&(a, b, c)| ResourceVector::new(a, b, c)).collect();
            let scaled: Vec<ResourceVector> =
                frees.iter().map(|&(a, b, c)| ResourceVector::new(k * a, k * b, k * c)).collect();
            prop_assert_eq!(order(&base), order(&scaled));
        }

        #[test]
        fn deadline_violation_is_nonnegative_and_tight(
            finish in 0u64..10_000, arrival in 0u64..5_000, deadline in 1u64..5_000,
        ) {
            let mut t = task(deadline, 0, 0);
            t.arrival = arrival;
            let v = deadline_violation(finish, &t);
            if finish <= arrival + deadline {
                prop_assert_eq!(v, 0);
            } else {
                prop_assert_eq!(v, finish - (arrival + deadline));
            }
        }

        #[test]
        fn objective_is_additive(
            finishes_a in proptest::collection::vec(0u64..500, 0..6),
            finishes_b in proptest::collection::vec(0u64..500, 0..6),
        ) {
            let w = unit_weights();
            let entry = |f: u64| {
                (
                    task(20, 0, 0),
                    TaskTiming {
                        start: 0,
                        finish: f,
                        comm_delay: 0,
                        violation: f.saturating_sub(20),
                        dropped: false,
                        energy: 0.0,
                    },
                )
            };
            let a: Vec<_> = finishes_a.iter().copied().map(entry).collect();
            let b: Vec<_> = finishes_b.iter().copied().map(entry).collect();
            let mut both = a.clone();
            both.extend(b.clone());
            let lhs = objective_cost(&both, &w);
            let rhs = objective_cost(&a, &w) + objective_cost(&b, &w);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
        }
    }
}
