//! Shortest-latency routing over the scenario graph, and the
//! per-(user, server) path table the engine and strategies consult.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::scenario::{Id, Scenario};
use crate::strategy::NetworkView;

/// One routing path from a base station to a compute node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Route {
    /// Vertex sequence, source base station first, server last.
    pub path: Vec<Id>,
    /// Normalized link keys along the path.
    pub links: Vec<(Id, Id)>,
    /// Sum of link latencies in milliseconds.
    pub latency_ms: u64,
    /// Bottleneck (minimum) link bandwidth in megabits per second.
    pub bandwidth_mbps: u64,
}

/// Pre-computed routes for every reachable (user, compute node) pair.
///
/// Paths are shortest by total latency with ties broken by the
/// lexicographically smallest vertex-id sequence, so the table is a pure
/// function of the scenario. Pairs that cannot reach each other simply
/// have no entry.
#[derive(Clone, Debug, Default)]
pub struct RouteTable {
    routes: BTreeMap<(Id, Id), Route>,
    user_base: BTreeMap<Id, Id>,
    nearest: BTreeMap<Id, Id>,
}

impl RouteTable {
    pub fn route(&self, user: &Id, node: &Id) -> Option<&Route> {
        let bs = self.user_base.get(user)?;
        self.routes.get(&(bs.clone(), node.clone()))
    }

    pub fn is_reachable(&self, user: &Id, node: &Id) -> bool {
        self.route(user, node).is_some()
    }

    /// The compute node with the smallest path latency from this user,
    /// ties broken by node id.
    pub fn nearest_node_id(&self, user: &Id) -> Option<&Id> {
        self.nearest.get(user)
    }
}

impl NetworkView for RouteTable {
    fn bandwidth_mbps(&self, user: &Id, node: &Id) -> Option<u64> {
        self.route(user, node).map(|r| r.bandwidth_mbps)
    }

    fn path_latency_ms(&self, user: &Id, node: &Id) -> Option<u64> {
        self.route(user, node).map(|r| r.latency_ms)
    }

    fn nearest_node(&self, user: &Id) -> Option<Id> {
        self.nearest_node_id(user).cloned()
    }
}

/// Build the route table for a scenario.
///
/// Compute nodes terminate paths (servers do not forward traffic);
/// cloud-tier servers are left out entirely when the cloud is disabled.
pub fn build_routes(scenario: &Scenario) -> RouteTable {
    let node_ids: Vec<Id> = scenario.active_nodes().map(|n| n.id.clone()).collect();
    let is_node = |id: &Id| node_ids.contains(id);

    let mut adjacency: BTreeMap<&Id, Vec<(&Id, u64, u64)>> = BTreeMap::new();
    for link in &scenario.links {
        if !scenario.cloud_enabled {
            let inactive = |id: &Id| {
                scenario
                    .node(id)
                    .is_some_and(|n| n.tier == crate::scenario::NodeTier::Cloud)
            };
            if inactive(&link.endpoint_a) || inactive(&link.endpoint_b) {
                continue;
            }
        }
        adjacency.entry(&link.endpoint_a).or_default().push((
            &link.endpoint_b,
            link.latency,
            link.bandwidth,
        ));
        adjacency.entry(&link.endpoint_b).or_default().push((
            &link.endpoint_a,
            link.latency,
            link.bandwidth,
        ));
    }

    let mut table = RouteTable::default();
    for user in &scenario.users {
        table
            .user_base
            .insert(user.id.clone(), user.base_station.clone());
    }

    let sources: Vec<Id> = {
        let mut bs: Vec<Id> = scenario
            .users
            .iter()
            .map(|u| u.base_station.clone())
            .collect();
        bs.sort();
        bs.dedup();
        bs
    };

    for source in &sources {
        // Dijkstra ordered by (latency, vertex-id path): appending the same
        // hop preserves the ordering, so the first settlement of a vertex
        // carries the lexicographically smallest shortest path.
        let mut settled: BTreeMap<Id, (u64, Vec<Id>)> = BTreeMap::new();
        let mut heap: BinaryHeap<Reverse<(u64, Vec<Id>)>> = BinaryHeap::new();
        heap.push(Reverse((0, vec![source.clone()])));
        while let Some(Reverse((dist, path))) = heap.pop() {
            let here = path.last().expect("path is never empty").clone();
            if settled.contains_key(&here) {
                continue;
            }
            settled.insert(here.clone(), (dist, path.clone()));
            if is_node(&here) && here != *source {
                continue; // servers are sinks
            }
            for (next, latency, _) in adjacency.get(&here).into_iter().flatten() {
                if settled.contains_key(*next) {
                    continue;
                }
                let mut longer = path.clone();
                longer.push((*next).clone());
                heap.push(Reverse((dist + latency, longer)));
            }
        }

        for node_id in &node_ids {
            let Some((latency, path)) = settled.get(node_id) else {
                continue;
            };
            let mut links = Vec::new();
            let mut bandwidth = u64::MAX;
            for pair in path.windows(2) {
                let key = if pair[0] <= pair[1] {
                    (pair[0].clone(), pair[1].clone())
                } else {
                    (pair[1].clone(), pair[0].clone())
                };
                let link = scenario
                    .links
                    .iter()
                    .find(|l| l.key() == key)
                    .expect("settled path uses scenario links");
                bandwidth = bandwidth.min(link.bandwidth);
                links.push(key);
            }
            if path.len() == 1 {
                // User co-located with the server: no links traversed, so
                // transfer is bandwidth-unconstrained in practice.
                bandwidth = u64::MAX;
            }
            table.routes.insert(
                (source.clone(), node_id.clone()),
                Route {
                    path: path.clone(),
                    links,
                    latency_ms: *latency,
                    bandwidth_mbps: bandwidth,
                },
            );
        }
    }

    for user in &scenario.users {
        let best = node_ids
            .iter()
            .filter_map(|n| table.route(&user.id, n).map(|r| (r.latency_ms, n.clone())))
            .min();
        if let Some((_, node)) = best {
            table.nearest.insert(user.id.clone(), node);
        }
    }

    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{
        builtin_paper_topology, builtin_toy, ComputeNode, ElementKind, Link, ModelWeights,
        NetworkElement, NodeTier, ResourceVector, Scenario, User, MAX_DELAY_UNBOUNDED_MS,
    };

    fn two_hop_fixture() -> Scenario {
        Scenario {
            nodes: vec![ComputeNode {
                id: "N".into(),
                tier: NodeTier::Edge,
                capacity: ResourceVector::new(4, 4, 4),
                power_idle: 90.0,
                power_max: 180.0,
            }],
            elements: vec![
                NetworkElement {
                    id: "B".into(),
                    kind: ElementKind::BaseStation,
                },
                NetworkElement {
                    id: "X".into(),
                    kind: ElementKind::Switch,
                },
            ],
            links: vec![
                Link {
                    endpoint_a: "B".into(),
                    endpoint_b: "X".into(),
                    bandwidth: 10,
                    latency: 1,
                    max_delay: MAX_DELAY_UNBOUNDED_MS,
                },
                Link {
                    endpoint_a: "X".into(),
                    endpoint_b: "N".into(),
                    bandwidth: 5,
                    latency: 2,
                    max_delay: MAX_DELAY_UNBOUNDED_MS,
                },
            ],
            users: vec![User {
                id: "u".into(),
                base_station: "B".into(),
            }],
            tasks: vec![],
            weights: ModelWeights::default(),
            horizon_ms: 100,
            cloud_enabled: true,
        }
    }

    #[test]
    fn two_hop_path_sums_latency_and_takes_min_bandwidth() {
        let table = build_routes(&two_hop_fixture());
        let route = table.route(&"u".into(), &"N".into()).expect("reachable");
        assert_eq!(route.latency_ms, 3);
        assert_eq!(route.bandwidth_mbps, 5);
        assert_eq!(
            route.path,
            vec![Id::from("B"), Id::from("X"), Id::from("N")]
        );
    }

    #[test]
    fn zero_latency_colocation() {
        let table = build_routes(&builtin_toy());
        assert_eq!(table.path_latency_ms(&"u1".into(), &"S1".into()), Some(0));
        assert_eq!(table.path_latency_ms(&"u3".into(), &"S2".into()), Some(1));
        assert_eq!(table.nearest_node_id(&"u1".into()), Some(&Id::from("S1")));
        assert_eq!(table.nearest_node_id(&"u2".into()), Some(&Id::from("S2")));
    }

    #[test]
    fn paper_topology_users_reach_all_seven_nodes() {
        let scenario = builtin_paper_topology(true);
        let table = build_routes(&scenario);
        for user in &scenario.users {
            for node in &scenario.nodes {
                assert!(
                    table.is_reachable(&user.id, &node.id),
                    "{} cannot reach {}",
                    user.id,
                    node.id
                );
            }
        }
    }

    #[test]
    fn cloud_paths_bottleneck_on_the_uplink() {
        let scenario = builtin_paper_topology(true);
        let table = build_routes(&scenario);
        for user in &scenario.users {
            assert_eq!(
                table.bandwidth_mbps(&user.id, &"CLOUD".into()),
                Some(crate::scenario::PAPER_CLOUD_UPLINK_MBPS)
            );
            // The wide-area hop keeps the cloud the farthest choice.
            let cloud_latency = table.path_latency_ms(&user.id, &"CLOUD".into()).unwrap();
            for es in 1..=6 {
                let edge_latency = table
                    .path_latency_ms(&user.id, &format!("ES{es}").into())
                    .unwrap();
                assert!(edge_latency < cloud_latency);
            }
        }
    }

    #[test]
    fn disabled_cloud_drops_routes_to_it() {
        let mut scenario = builtin_paper_topology(true);
        scenario.cloud_enabled = false;
        let table = build_routes(&scenario);
        assert!(!table.is_reachable(&"us1".into(), &"CLOUD".into()));
        assert!(table.is_reachable(&"us1".into(), &"ES1".into()));
    }

    #[test]
    fn equal_latency_ties_break_lexicographically() {
        let mut s = two_hop_fixture();
        // Second parallel switch Y with identical latencies: the path via X
        // wins because ["B","X","N"] < ["B","Y","N"].
        s.elements.push(NetworkElement {
            id: "Y".into(),
            kind: ElementKind::Switch,
        });
        s.links.push(Link {
            endpoint_a: "B".into(),
            endpoint_b: "Y".into(),
            bandwidth: 50,
            latency: 1,
            max_delay: MAX_DELAY_UNBOUNDED_MS,
        });
        s.links.push(Link {
            endpoint_a: "Y".into(),
            endpoint_b: "N".into(),
            bandwidth: 50,
            latency: 2,
            max_delay: MAX_DELAY_UNBOUNDED_MS,
        });
        let table = build_routes(&s);
        let route = table.route(&"u".into(), &"N".into()).unwrap();
        assert_eq!(
            route.path,
            vec![Id::from("B"), Id::from("X"), Id::from("N")]
        );
    }
}
