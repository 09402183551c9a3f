//! Topology-derived matrices and state transition matrices.
//!
//! `G_m` marks arcs `(i, j)` whose receiving node starts with `r_j = m`
//! customers, `H_m` marks arcs whose receiving node has `s_j + 1 = m`. From
//! these and the diagonal service matrix `𝒯_k`, the implicit equation in
//! `d(k)` is solved once per `k` into matrices `T_1(k) … T_M(k)` with
//! `d(k) = ⊕_m T_m(k) ⊗ d(k − m)`.

use serde::Serialize;
use thiserror::Error;

use crate::maxplus::{Acyclicity, AssociatedGraph, Matrix, MaxPlusError};
use crate::network::{Blocking, Count, Network, ServiceError, ServiceTimeSource};
use crate::Time;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("explicit state equation does not exist: G_0 has a circuit through nodes {}", format_cycle(.circuit))]
    Unsolvable { circuit: Vec<usize> },
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error(transparent)]
    Algebra(#[from] MaxPlusError),
}

/// Renders a 0-based node cycle 1-based, joined by arrows.
pub fn format_cycle(cycle: &[usize]) -> String {
    cycle
        .iter()
        .map(|v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(" → ")
}

/// `G_0 … G_M` and `H_1 … H_M`, padded with ℰ to a common horizon `M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DelayedAdjacency {
    #[serde(skip)]
    node_count: usize,
    #[serde(rename = "M_r")]
    max_initial: usize,
    #[serde(rename = "M_s")]
    max_capacity_shift: usize,
    #[serde(rename = "G")]
    g: Vec<Matrix>,
    #[serde(rename = "H")]
    h: Vec<Matrix>,
}

impl DelayedAdjacency {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// `M = max(M_r, M_s)`; 0 when no node has a finite `r` or `s`.
    pub fn horizon(&self) -> usize {
        self.g.len() - 1
    }

    pub fn max_initial(&self) -> usize {
        self.max_initial
    }

    pub fn max_capacity_shift(&self) -> usize {
        self.max_capacity_shift
    }

    /// `G_m` for `0 ≤ m ≤ M`.
    pub fn g(&self, m: usize) -> &Matrix {
        &self.g[m]
    }

    /// `H_m` for `1 ≤ m ≤ M`.
    pub fn h(&self, m: usize) -> &Matrix {
        assert!(m >= 1, "H_m starts at m = 1");
        &self.h[m - 1]
    }

    pub fn g_all(&self) -> &[Matrix] {
        &self.g
    }

    pub fn h_all(&self) -> &[Matrix] {
        &self.h
    }

    fn g_or_null(&self, m: usize) -> Matrix {
        self.g
            .get(m)
            .cloned()
            .unwrap_or_else(|| Matrix::null(self.node_count, self.node_count))
    }

    fn h_or_null(&self, m: usize) -> Matrix {
        self.h
            .get(m - 1)
            .cloned()
            .unwrap_or_else(|| Matrix::null(self.node_count, self.node_count))
    }

    /// Graph `𝒢_0` associated with `G_0`.
    pub fn g0_graph(&self) -> AssociatedGraph {
        AssociatedGraph::of_matrix(&self.g[0]).expect("G_0 is square")
    }
}

pub fn build_delayed_adjacency(network: &Network) -> DelayedAdjacency {
    let n = network.node_count();
    let max_initial = (0..n)
        .filter_map(|i| network.initial(i).finite())
        .max()
        .unwrap_or(0) as usize;
    let max_capacity_shift = (0..n)
        .filter_map(|i| network.capacity(i).finite())
        .map(|s| s as usize + 1)
        .max()
        .unwrap_or(0);
    // M_r > M_s only happens when the node holding the largest r has an
    // infinite buffer; both lists are padded to the larger horizon.
    let horizon = max_initial.max(max_capacity_shift);

    let mut g = vec![Matrix::null(n, n); horizon + 1];
    let mut h = vec![Matrix::null(n, n); horizon];
    for (i, j) in network.arcs() {
        if let Count::Finite(r) = network.initial(j) {
            g[r as usize].set(i, j, Time::e());
        }
        if let Count::Finite(s) = network.capacity(j) {
            h[s as usize].set(i, j, Time::e());
        }
    }
    DelayedAdjacency {
        node_count: n,
        max_initial,
        max_capacity_shift,
        g,
        h,
    }
}

/// Suggested change of initial conditions that removes arcs from `𝒢_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Remediation {
    pub node: usize,
    /// Smallest admissible `r_node`; every arc into the node then leaves `𝒢_0`.
    pub min_initial: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvabilityReport {
    /// Longest path `p` of `𝒢_0`, present exactly when it is acyclic.
    pub longest_path: Option<usize>,
    /// First circuit found in `𝒢_0`, as a closed walk.
    pub circuit: Option<Vec<usize>>,
    pub remediation: Vec<Remediation>,
}

impl SolvabilityReport {
    pub fn is_solvable(&self) -> bool {
        self.longest_path.is_some()
    }

    pub fn require_solvable(&self) -> Result<usize, SystemError> {
        match (self.longest_path, &self.circuit) {
            (Some(p), _) => Ok(p),
            (None, circuit) => Err(SystemError::Unsolvable {
                circuit: circuit.clone().unwrap_or_default(),
            }),
        }
    }
}

pub fn check_solvability(da: &DelayedAdjacency) -> SolvabilityReport {
    match da.g0_graph().analyze() {
        Acyclicity::Acyclic { longest_path } => SolvabilityReport {
            longest_path: Some(longest_path),
            circuit: None,
            remediation: Vec::new(),
        },
        Acyclicity::Cyclic { cycle } => {
            // every node on a 𝒢_0 circuit has an incoming G_0 arc, so r = 0 there
            let mut nodes: Vec<usize> = cycle[..cycle.len() - 1].to_vec();
            nodes.sort_unstable();
            let remediation = nodes
                .into_iter()
                .map(|node| Remediation {
                    node,
                    min_initial: 1,
                })
                .collect();
            SolvabilityReport {
                longest_path: None,
                circuit: Some(cycle),
                remediation,
            }
        }
    }
}

/// The diagonal matrix `𝒯_k = diag(τ_1k, …, τ_nk)`.
pub fn service_matrix(
    source: &ServiceTimeSource,
    n: usize,
    k: usize,
) -> Result<Matrix, ServiceError> {
    let diag = (0..n)
        .map(|i| source.service_time(i, k).map(Time::Fin))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::diagonal(&diag))
}

/// `T_1(k) … T_M(k)` for one event index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitionSet {
    pub k: usize,
    #[serde(rename = "T")]
    matrices: Vec<Matrix>,
}

impl TransitionSet {
    pub fn horizon(&self) -> usize {
        self.matrices.len()
    }

    /// `T_m(k)` for `1 ≤ m ≤ M`.
    pub fn t(&self, m: usize) -> &Matrix {
        &self.matrices[m - 1]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn node_count(&self) -> usize {
        self.matrices[0].rows()
    }
}

/// Builds the state transition matrices for event `k` from `𝒯_k`.
///
/// With `Q = (E ⊕ 𝒯_k ⊗ G_0^T)^p`:
///
/// | discipline    | `T_1(k)`                              | `T_m(k)`, `m ≥ 2`            |
/// |---------------|----------------------------------------|------------------------------|
/// | none          | `Q 𝒯_k (E ⊕ G_1^T)`                    | `Q 𝒯_k G_m^T`                |
/// | manufacturing | `Q (𝒯_k ⊕ 𝒯_k G_1^T ⊕ H_1)`           | `Q (𝒯_k G_m^T ⊕ H_m)`        |
/// | communication | `Q 𝒯_k (E ⊕ G_1^T ⊕ H_1)`              | `Q 𝒯_k (G_m^T ⊕ H_m)`        |
///
/// A horizon of 0 is promoted to 1 with `G_1 = H_1 = ℰ`.
pub fn build_transition_matrices(
    da: &DelayedAdjacency,
    blocking: Blocking,
    tau: &Matrix,
    k: usize,
    report: &SolvabilityReport,
) -> Result<TransitionSet, SystemError> {
    let p = report.require_solvable()?;
    let n = da.node_count();
    let identity = Matrix::identity(n);
    let q = identity
        .oplus(&tau.otimes(&da.g(0).transpose())?)?
        .pow(p as u32)?;

    let horizon = da.horizon().max(1);
    let mut matrices = Vec::with_capacity(horizon);
    for m in 1..=horizon {
        let gt = da.g_or_null(m).transpose();
        let h = da.h_or_null(m);
        let inner = match (blocking, m) {
            (Blocking::None, 1) => tau.otimes(&identity.oplus(&gt)?)?,
            (Blocking::None, _) => tau.otimes(&gt)?,
            (Blocking::Manufacturing, 1) => tau.oplus(&tau.otimes(&gt)?)?.oplus(&h)?,
            (Blocking::Manufacturing, _) => tau.otimes(&gt)?.oplus(&h)?,
            (Blocking::Communication, 1) => tau.otimes(&identity.oplus(&gt)?.oplus(&h)?)?,
            (Blocking::Communication, _) => tau.otimes(&gt.oplus(&h)?)?,
        };
        matrices.push(q.otimes(&inner)?);
    }
    Ok(TransitionSet { k, matrices })
}

/// The `nM × nM` companion matrix
///
/// ```text
/// | T_1  T_2  …  T_M |
/// | E    ℰ    …  ℰ   |
/// | ℰ    E    …  ℰ   |
/// | ℰ    …    E  ℰ   |
/// ```
pub fn build_extended_transition(ts: &TransitionSet) -> Matrix {
    let n = ts.node_count();
    let big = n * ts.horizon();
    let mut out = Matrix::null(big, big);
    for (block, t) in ts.matrices().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                out.set(i, block * n + j, t.get(i, j));
            }
        }
    }
    for block in 1..ts.horizon() {
        for i in 0..n {
            out.set(block * n + i, (block - 1) * n + i, Time::e());
        }
    }
    out
}

/// A validated network together with its derived structure.
#[derive(Clone, Debug)]
pub struct System {
    network: Network,
    adjacency: DelayedAdjacency,
    report: SolvabilityReport,
}

impl System {
    pub fn new(network: Network) -> Self {
        let adjacency = build_delayed_adjacency(&network);
        let report = check_solvability(&adjacency);
        System {
            network,
            adjacency,
            report,
        }
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn adjacency(&self) -> &DelayedAdjacency {
        &self.adjacency
    }

    pub fn report(&self) -> &SolvabilityReport {
        &self.report
    }

    /// Horizon used by the explicit recursions (at least 1).
    pub fn horizon(&self) -> usize {
        self.adjacency.horizon().max(1)
    }

    pub fn transitions(
        &self,
        source: &ServiceTimeSource,
        k: usize,
    ) -> Result<TransitionSet, SystemError> {
        let tau = service_matrix(source, self.network.node_count(), k)?;
        build_transition_matrices(
            &self.adjacency,
            self.network.blocking(),
            &tau,
            k,
            &self.report,
        )
    }
}
