//! Queueing network description: topology, buffers, blocking, service times.
//!
//! Nodes are 0-based in the library. Every user-facing rendering (error
//! messages, files, CLI output) is 1-based.

mod file;
mod service;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use file::{FileError, NetworkFile, ServiceSpec};
pub use service::{ServiceError, ServiceTimeSource, DEFAULT_SEEDED_MAX};

/// Initial buffer content `r_i` or buffer capacity `s_i`.
///
/// `Finite(_) < Infinite` in the derived order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Count {
    Finite(u32),
    Infinite,
}

impl Count {
    pub fn finite(self) -> Option<u32> {
        match self {
            Count::Finite(x) => Some(x),
            Count::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Count::Infinite
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(x) => x.fmt(f),
            Count::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Blocking {
    None,
    /// A served customer holds the server until every successor has room.
    Manufacturing,
    /// Service does not start until every successor has room.
    Communication,
}

impl fmt::Display for Blocking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Blocking::None => "none",
            Blocking::Manufacturing => "manufacturing",
            Blocking::Communication => "communication",
        })
    }
}

/// Unvalidated network description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkSpec {
    pub node_count: usize,
    /// Set semantics: parallel arcs collapse.
    pub arcs: BTreeSet<(usize, usize)>,
    /// `r_i`, customers waiting in the buffer at time zero.
    pub initial: Vec<Count>,
    /// `s_i`, buffer capacity (excluding the server).
    pub capacity: Vec<Count>,
    pub blocking: Blocking,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node {} out of range for a network of {count} nodes", .node + 1)]
pub struct NodeOutOfRange {
    pub node: usize,
    pub count: usize,
}

/// One broken constraint found by [`NetworkSpec::validate`]. Display is 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    DanglingArc {
        from: usize,
        to: usize,
    },
    SelfLoop {
        node: usize,
    },
    InitialExceedsCapacity {
        node: usize,
    },
    SourceNotInfinite {
        node: usize,
    },
    FiniteCapacityWithoutBlocking {
        node: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LengthMismatch {
                field,
                expected,
                found,
            } => write!(f, "{field} has {found} entries, expected {expected}"),
            Violation::DanglingArc { from, to } => {
                write!(
                    f,
                    "arc ({}, {}) has an endpoint outside the network",
                    from + 1,
                    to + 1
                )
            }
            Violation::SelfLoop { node } => write!(f, "self-loop arc at node {}", node + 1),
            Violation::InitialExceedsCapacity { node } => {
                write!(f, "r exceeds s at node {}", node + 1)
            }
            Violation::SourceNotInfinite { node } => write!(
                f,
                "node {} has no predecessors and must have r = s = inf",
                node + 1
            ),
            Violation::FiniteCapacityWithoutBlocking { node } => write!(
                f,
                "node {} has a finite buffer but blocking is none",
                node + 1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationErrors(pub Vec<Violation>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, v) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str("; ")?;
            }
            v.fmt(f)?;
        }
        Ok(())
    }
}

impl NetworkSpec {
    fn check_node(&self, i: usize) -> Result<(), NodeOutOfRange> {
        if i < self.node_count {
            Ok(())
        } else {
            Err(NodeOutOfRange {
                node: i,
                count: self.node_count,
            })
        }
    }

    /// `P(i) = { j | (j, i) ∈ A }`, ascending.
    pub fn predecessors(&self, i: usize) -> Result<Vec<usize>, NodeOutOfRange> {
        self.check_node(i)?;
        Ok(self
            .arcs
            .iter()
            .filter(|&&(_, to)| to == i)
            .map(|&(from, _)| from)
            .collect())
    }

    /// `S(i) = { j | (i, j) ∈ A }`, ascending.
    pub fn successors(&self, i: usize) -> Result<Vec<usize>, NodeOutOfRange> {
        self.check_node(i)?;
        Ok(self
            .arcs
            .iter()
            .filter(|&&(from, _)| from == i)
            .map(|&(_, to)| to)
            .collect())
    }

    /// Collects every violation rather than stopping at the first.
    pub fn violations(&self) -> Vec<Violation> {
        let n = self.node_count;
        let mut out = Vec::new();
        for (field, list) in [("r", &self.initial), ("s", &self.capacity)] {
            if list.len() != n {
                out.push(Violation::LengthMismatch {
                    field,
                    expected: n,
                    found: list.len(),
                });
            }
        }
        let mut has_pred = vec![false; n];
        for &(from, to) in &self.arcs {
            if from >= n || to >= n {
                out.push(Violation::DanglingArc { from, to });
                continue;
            }
            if from == to {
                out.push(Violation::SelfLoop { node: from });
            }
            has_pred[to] = true;
        }
        if out
            .iter()
            .any(|v| matches!(v, Violation::LengthMismatch { .. }))
        {
            return out;
        }
        for (i, &pred) in has_pred.iter().enumerate() {
            let (r, s) = (self.initial[i], self.capacity[i]);
            if r > s {
                out.push(Violation::InitialExceedsCapacity { node: i });
            }
            if !pred && !(r.is_infinite() && s.is_infinite()) {
                out.push(Violation::SourceNotInfinite { node: i });
            }
            if self.blocking == Blocking::None && !s.is_infinite() {
                out.push(Violation::FiniteCapacityWithoutBlocking { node: i });
            }
        }
        out
    }

    pub fn validate(self) -> Result<Network, ValidationErrors> {
        let violations = self.violations();
        if !violations.is_empty() {
            return Err(ValidationErrors(violations));
        }
        let n = self.node_count;
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(from, to) in &self.arcs {
            preds[to].push(from);
            succs[from].push(to);
        }
        Ok(Network {
            spec: self,
            preds,
            succs,
        })
    }
}

/// A network that passed validation. Accessors take 0-based node indices and
/// panic when out of range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    spec: NetworkSpec,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl Network {
    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn into_spec(self) -> NetworkSpec {
        self.spec
    }

    pub fn node_count(&self) -> usize {
        self.spec.node_count
    }

    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.preds[i]
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succs[i]
    }

    pub fn initial(&self, i: usize) -> Count {
        self.spec.initial[i]
    }

    pub fn capacity(&self, i: usize) -> Count {
        self.spec.capacity[i]
    }

    pub fn blocking(&self) -> Blocking {
        self.spec.blocking
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.spec.arcs.iter().copied()
    }

    /// Returns a copy of this network under another discipline. Switching to
    /// [`Blocking::None`] requires every capacity to be infinite.
    pub fn with_blocking(&self, blocking: Blocking) -> Result<Network, ValidationErrors> {
        NetworkSpec {
            blocking,
            ..self.spec.clone()
        }
        .validate()
    }

    /// Same topology, initial contents and discipline, with every buffer infinite.
    pub fn with_infinite_buffers(&self) -> Network {
        let spec = NetworkSpec {
            capacity: vec![Count::Infinite; self.node_count()],
            ..self.spec.clone()
        };
        spec.validate()
            .expect("relaxing capacities keeps a network valid")
    }
}
