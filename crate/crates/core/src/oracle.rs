//! Event-driven simulation of the physical network.
//!
//! This module knows nothing about matrices. It moves customers around:
//! joins consume one staged customer from every predecessor, the server
//! works FCFS, departures fork one customer to every successor, and all of
//! that takes zero time. Its departure epochs are the reference the
//! max-plus engines are checked against.
//!
//! Buffer room is tracked per arc: node `i` may hand its `k`-th customer to
//! a successor `j` with finite `s_j` once `j` has released at least
//! `k − s_j − 1` customers, so at most `s_j + 1` customers sent along the arc
//! are inside `j` at any time. Manufacturing blocking applies the check when
//! the served customer wants to leave (the server stays occupied meanwhile);
//! communication blocking applies it before service starts.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{Method, Trajectory};
use crate::network::{Blocking, Count, Network, ServiceError, ServiceTimeSource};
use crate::Time;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    /// No event can fire and the listed nodes (0-based) are short of their
    /// departures.
    #[error("deadlock: nodes {} cannot complete their departures", one_based(.blocked))]
    Deadlock {
        blocked: Vec<usize>,
        departed: Vec<usize>,
    },
    #[error(transparent)]
    Service(#[from] ServiceError),
}

fn one_based(nodes: &[usize]) -> String {
    nodes
        .iter()
        .map(|v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Order in which nodes are visited while settling events at one instant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeOrder {
    Ascending,
    Descending,
}

/// Per-node epochs, list index `k − 1` for customer `k`.
///
/// Arrivals of pre-loaded customers are recorded at time 0; nodes with an
/// unbounded backlog record ε arrivals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EventLog {
    pub arrivals: Vec<Vec<Time>>,
    pub starts: Vec<Vec<Time>>,
    pub completions: Vec<Vec<Time>>,
    pub departures: Vec<Vec<Time>>,
}

impl EventLog {
    pub fn node_count(&self) -> usize {
        self.departures.len()
    }

    /// Fewest departures recorded at any node.
    pub fn steps(&self) -> usize {
        self.departures.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Departures as a trajectory `d(0) = e, d(1), …, d(K)`, truncated to the
    /// shortest node list.
    pub fn to_trajectory(&self) -> Trajectory {
        let n = self.node_count();
        let steps = self.steps();
        let mut rows = vec![vec![Time::e(); n]];
        rows.extend((0..steps).map(|k| (0..n).map(|i| self.departures[i][k]).collect()));
        Trajectory::from_departures(Method::Oracle, rows)
    }
}

#[derive(Clone, Debug)]
struct NodeState {
    /// Forked customers waiting to be joined, one counter per predecessor.
    staging: Vec<u64>,
    /// Customers admitted to the queue so far; `None` means unbounded backlog.
    joined: Option<u64>,
    started: u64,
    completed: u64,
    departed: u64,
    busy_until: i64,
}

impl NodeState {
    fn in_service(&self) -> bool {
        self.started > self.completed
    }

    fn holding(&self) -> bool {
        self.completed > self.departed
    }

    fn idle(&self) -> bool {
        self.started == self.departed
    }
}

struct Simulator<'a> {
    network: &'a Network,
    source: &'a ServiceTimeSource,
    steps: u64,
    nodes: Vec<NodeState>,
    /// `slot[i][x]` is the position of `i` in the predecessor list of its x-th successor.
    slot: Vec<Vec<usize>>,
    log: EventLog,
}

impl<'a> Simulator<'a> {
    fn new(network: &'a Network, source: &'a ServiceTimeSource, steps: usize) -> Self {
        let n = network.node_count();
        let mut log = EventLog {
            arrivals: vec![Vec::new(); n],
            starts: vec![Vec::new(); n],
            completions: vec![Vec::new(); n],
            departures: vec![Vec::new(); n],
        };
        let nodes = (0..n)
            .map(|i| {
                let joined = match network.initial(i) {
                    Count::Finite(r) => {
                        log.arrivals[i].extend(std::iter::repeat_n(Time::e(), r as usize));
                        Some(r as u64)
                    }
                    Count::Infinite => None,
                };
                NodeState {
                    staging: vec![0; network.predecessors(i).len()],
                    joined,
                    started: 0,
                    completed: 0,
                    departed: 0,
                    busy_until: 0,
                }
            })
            .collect();
        let slot = (0..n)
            .map(|i| {
                network
                    .successors(i)
                    .iter()
                    .map(|&j| {
                        network
                            .predecessors(j)
                            .iter()
                            .position(|&p| p == i)
                            .unwrap()
                    })
                    .collect()
            })
            .collect();
        Simulator {
            network,
            source,
            steps: steps as u64,
            nodes,
            slot,
            log,
        }
    }

    /// Whether node `i` may pass its `k`-th customer on to every successor.
    fn room_downstream(&self, i: usize, k: u64) -> bool {
        self.network
            .successors(i)
            .iter()
            .all(|&j| match self.network.capacity(j) {
                Count::Finite(s) => self.nodes[j].departed + s as u64 + 1 >= k,
                Count::Infinite => true,
            })
    }

    /// Fires every event of node `i` that is enabled at `now`.
    fn settle_node(&mut self, i: usize, now: i64) -> Result<bool, ServiceError> {
        let blocking = self.network.blocking();
        let mut changed = false;

        let node = &self.nodes[i];
        if node.in_service() && node.busy_until == now {
            self.nodes[i].completed += 1;
            self.log.completions[i].push(Time::Fin(now));
            changed = true;
        }

        if self.nodes[i].holding() {
            let k = self.nodes[i].departed + 1;
            if blocking != Blocking::Manufacturing || self.room_downstream(i, k) {
                self.nodes[i].departed = k;
                self.log.departures[i].push(Time::Fin(now));
                for (x, &j) in self.network.successors(i).iter().enumerate() {
                    let pos = self.slot[i][x];
                    self.nodes[j].staging[pos] += 1;
                }
                changed = true;
            }
        }

        let node = &mut self.nodes[i];
        if let Some(joined) = node.joined.as_mut() {
            while !node.staging.is_empty() && node.staging.iter().all(|&c| c > 0) {
                node.staging.iter_mut().for_each(|c| *c -= 1);
                *joined += 1;
                self.log.arrivals[i].push(Time::Fin(now));
                changed = true;
            }
        }

        let node = &self.nodes[i];
        let k = node.started + 1;
        let waiting = node.joined.is_none_or(|joined| joined >= k);
        if node.idle()
            && node.started < self.steps
            && waiting
            && (blocking != Blocking::Communication || self.room_downstream(i, k))
        {
            let tau = self.source.service_time(i, k as usize)?;
            let node = &mut self.nodes[i];
            node.started = k;
            node.busy_until = now + tau;
            if node.joined.is_none() {
                self.log.arrivals[i].push(Time::Eps);
            }
            self.log.starts[i].push(Time::Fin(now));
            changed = true;
        }
        Ok(changed)
    }

    fn run(mut self, order: NodeOrder) -> Result<EventLog, OracleError> {
        let n = self.network.node_count();
        let visit: Vec<usize> = match order {
            NodeOrder::Ascending => (0..n).collect(),
            NodeOrder::Descending => (0..n).rev().collect(),
        };
        let mut now = 0i64;
        loop {
            // settle everything that happens at `now` before time moves on
            loop {
                let mut changed = false;
                for &i in &visit {
                    changed |= self.settle_node(i, now)?;
                }
                if !changed {
                    break;
                }
            }
            if self.nodes.iter().all(|s| s.departed >= self.steps) {
                return Ok(self.log);
            }
            let next = self
                .nodes
                .iter()
                .filter(|s| s.in_service())
                .map(|s| s.busy_until)
                .min();
            match next {
                Some(t) => now = t,
                None => {
                    let blocked = (0..n)
                        .filter(|&i| self.nodes[i].departed < self.steps)
                        .collect();
                    let departed = self.nodes.iter().map(|s| s.departed as usize).collect();
                    return Err(OracleError::Deadlock { blocked, departed });
                }
            }
        }
    }
}

/// Simulates until every node has `steps` departures.
pub fn simulate(
    network: &Network,
    source: &ServiceTimeSource,
    steps: usize,
) -> Result<EventLog, OracleError> {
    simulate_with_order(network, source, steps, NodeOrder::Ascending)
}

pub fn simulate_with_order(
    network: &Network,
    source: &ServiceTimeSource,
    steps: usize,
    order: NodeOrder,
) -> Result<EventLog, OracleError> {
    source.check_nodes(network.node_count())?;
    Simulator::new(network, source, steps).run(order)
}

/// First point where two departure histories disagree. Nodes are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Divergence {
    Length {
        node: usize,
        expected: usize,
        found: usize,
    },
    Value {
        node: usize,
        k: usize,
        expected: Time,
        found: Time,
    },
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Length {
                node,
                expected,
                found,
            } => write!(
                f,
                "node {}: expected {expected} departures, found {found}",
                node + 1
            ),
            Divergence::Value {
                node,
                k,
                expected,
                found,
            } => write!(f, "node {}, k = {k}: {expected} vs {found}", node + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchReport {
    pub first: Option<Divergence>,
    /// Number of differing entries (0 when lengths already disagree).
    pub mismatches: usize,
}

impl MatchReport {
    pub fn is_match(&self) -> bool {
        self.first.is_none()
    }
}

/// Entrywise comparison of a trajectory against the oracle's departures.
pub fn compare(trajectory: &Trajectory, log: &EventLog) -> MatchReport {
    let steps = trajectory.steps();
    if let Some(node) = (0..log.node_count()).find(|&i| log.departures[i].len() < steps) {
        return MatchReport {
            first: Some(Divergence::Length {
                node,
                expected: steps,
                found: log.departures[node].len(),
            }),
            mismatches: 0,
        };
    }
    let mut first = None;
    let mut mismatches = 0;
    for k in 1..=steps {
        for (node, &expected) in trajectory.d(k).iter().enumerate() {
            let found = log.departures[node][k - 1];
            if expected != found {
                mismatches += 1;
                first.get_or_insert(Divergence::Value {
                    node,
                    k,
                    expected,
                    found,
                });
            }
        }
    }
    MatchReport { first, mismatches }
}

/// Entrywise comparison of two trajectories.
pub fn compare_trajectories(expected: &Trajectory, found: &Trajectory) -> MatchReport {
    if let Some(node) = (found.steps() < expected.steps()).then_some(0) {
        return MatchReport {
            first: Some(Divergence::Length {
                node,
                expected: expected.steps(),
                found: found.steps(),
            }),
            mismatches: 0,
        };
    }
    let mut first = None;
    let mut mismatches = 0;
    for k in 1..=expected.steps() {
        for (node, (&e, &f)) in expected.d(k).iter().zip(found.d(k)).enumerate() {
            if e != f {
                mismatches += 1;
                first.get_or_insert(Divergence::Value {
                    node,
                    k,
                    expected: e,
                    found: f,
                });
            }
        }
    }
    MatchReport { first, mismatches }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxplus::Fin;
    use crate::network::tests::fork_join_spec;
    use crate::network::NetworkSpec;
    use Count::{Finite, Infinite};

    fn tandem(capacity: Count, blocking: Blocking) -> Network {
        NetworkSpec {
            node_count: 2,
            arcs: [(0, 1)].into_iter().collect(),
            initial: vec![Infinite, Finite(0)],
            capacity: vec![Infinite, capacity],
            blocking,
        }
        .validate()
        .unwrap()
    }

    fn fins(xs: &[i64]) -> Vec<Time> {
        xs.iter().map(|&x| Fin(x)).collect()
    }

    #[test]
    fn tandem_by_hand() {
        let src = ServiceTimeSource::table(vec![vec![1; 4], vec![2; 4]]).unwrap();
        let log = simulate(&tandem(Infinite, Blocking::None), &src, 4).unwrap();
        assert_eq!(log.departures[0], fins(&[1, 2, 3, 4]));
        assert_eq!(log.departures[1], fins(&[3, 5, 7, 9]));
        assert_eq!(log.starts[1], fins(&[1, 3, 5, 7]));
    }

    #[test]
    fn manufacturing_holds_the_server() {
        // s_2 = 0: node 1 may release customer k only after node 2 released k − 1
        let src = ServiceTimeSource::table(vec![vec![1; 3], vec![5; 3]]).unwrap();
        let log = simulate(&tandem(Finite(0), Blocking::Manufacturing), &src, 3).unwrap();
        assert_eq!(log.completions[0], fins(&[1, 2, 7]));
        assert_eq!(log.departures[0], fins(&[1, 6, 11]));
        assert_eq!(log.departures[1], fins(&[6, 11, 16]));
    }

    #[test]
    fn communication_delays_the_start() {
        let src = ServiceTimeSource::table(vec![vec![1; 3], vec![5; 3]]).unwrap();
        let log = simulate(&tandem(Finite(0), Blocking::Communication), &src, 3).unwrap();
        assert_eq!(log.starts[0], fins(&[0, 6, 12]));
        assert_eq!(log.departures[0], fins(&[1, 7, 13]));
        assert_eq!(log.departures[1], fins(&[6, 12, 18]));
    }

    #[test]
    fn single_source_accumulates() {
        let net = NetworkSpec {
            node_count: 1,
            arcs: Default::default(),
            initial: vec![Infinite],
            capacity: vec![Infinite],
            blocking: Blocking::None,
        }
        .validate()
        .unwrap();
        let src = ServiceTimeSource::table(vec![vec![4; 3]]).unwrap();
        assert_eq!(
            simulate(&net, &src, 3).unwrap().departures[0],
            fins(&[4, 8, 12])
        );
    }

    #[test]
    fn fork_join_circuit_deadlocks() {
        let net = fork_join_spec(0, Blocking::Manufacturing).validate().unwrap();
        let src = ServiceTimeSource::seeded(3, 9).unwrap();
        match simulate(&net, &src, 5) {
            Err(OracleError::Deadlock { blocked, .. }) => {
                for node in [1, 2, 3] {
                    assert!(blocked.contains(&node));
                }
            }
            other => panic!("expected deadlock, got {other:?}"),
        }
    }

    #[test]
    fn order_invariance() {
        for blocking in [
            Blocking::None,
            Blocking::Manufacturing,
            Blocking::Communication,
        ] {
            let net = fork_join_spec(1, blocking).validate().unwrap();
            // small service range makes ties frequent
            let src = ServiceTimeSource::seeded(17, 2).unwrap();
            let up = simulate_with_order(&net, &src, 30, NodeOrder::Ascending).unwrap();
            let down = simulate_with_order(&net, &src, 30, NodeOrder::Descending).unwrap();
            assert_eq!(up.departures, down.departures);
            assert_eq!(up.starts, down.starts);
        }
    }

    #[test]
    fn compare_reports() {
        let src = ServiceTimeSource::table(vec![vec![1; 4], vec![2; 4]]).unwrap();
        let net = tandem(Infinite, Blocking::None);
        let log = simulate(&net, &src, 4).unwrap();
        let traj = log.to_trajectory();
        assert!(compare(&traj, &log).is_match());

        let short = simulate(&net, &src, 3).unwrap();
        assert_eq!(
            compare(&traj, &short).first,
            Some(Divergence::Length {
                node: 0,
                expected: 4,
                found: 3
            })
        );

        let mut rows = traj.departures().to_vec();
        rows[3][1] = Fin(99);
        let corrupted = Trajectory::from_departures(Method::Explicit, rows);
        let report = compare(&corrupted, &log);
        assert_eq!(report.mismatches, 1);
        assert_eq!(
            report.first,
            Some(Divergence::Value {
                node: 1,
                k: 3,
                expected: Fin(99),
                found: Fin(7)
            })
        );
        assert!(!compare_trajectories(&traj, &corrupted).is_match());
    }
}
