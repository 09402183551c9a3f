//! Evolution of departure epochs `d(0), …, d(K)`.
//!
//! Three routes compute the same trajectory: solving the implicit equation
//! for `d(k)` at every step, the explicit multi-delay recursion through
//! `T_m(k)`, and the first-order recursion on the stacked state `d̂(k)`.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::maxplus::{solve_with_depth, vec_oplus, Matrix, MaxPlusError};
use crate::network::{Blocking, Count, Network, ServiceError, ServiceTimeSource};
use crate::system::{
    build_extended_transition, format_cycle, service_matrix, DelayedAdjacency, SolvabilityReport,
    System, SystemError, TransitionSet,
};
use crate::Time;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Implicit,
    Explicit,
    Extended,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Implicit, Engine::Explicit, Engine::Extended];
}

/// Which computation produced a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Implicit,
    Explicit,
    Extended,
    Oracle,
}

impl From<Engine> for Method {
    fn from(engine: Engine) -> Self {
        match engine {
            Engine::Implicit => Method::Implicit,
            Engine::Explicit => Method::Explicit,
            Engine::Extended => Method::Extended,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Implicit => "implicit",
            Method::Explicit => "explicit",
            Method::Extended => "extended",
            Method::Oracle => "oracle",
        })
    }
}

/// Arrival, service start and service completion epochs. Row `k` holds
/// customer `k`; row 0 is all ε.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub a: Vec<Vec<Time>>,
    pub b: Vec<Vec<Time>>,
    pub c: Vec<Vec<Time>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    /// Kept out of the JSON so trajectories from different methods compare byte for byte.
    #[serde(skip)]
    method: Method,
    #[serde(rename = "d")]
    departures: Vec<Vec<Time>>,
    #[serde(skip_serializing_if = "Option::is_none", flatten)]
    trace: Option<Trace>,
}

impl Trajectory {
    /// `departures[k]` is `d(k)`; `departures[0]` must be the e-vector.
    pub fn from_departures(method: Method, departures: Vec<Vec<Time>>) -> Self {
        assert!(!departures.is_empty(), "trajectory needs d(0)");
        Trajectory {
            method,
            departures,
            trace: None,
        }
    }

    pub fn with_trace(mut self, trace: Trace) -> Self {
        self.trace = Some(trace);
        self
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn node_count(&self) -> usize {
        self.departures[0].len()
    }

    /// `K`, the number of steps after `d(0)`.
    pub fn steps(&self) -> usize {
        self.departures.len() - 1
    }

    pub fn d(&self, k: usize) -> &[Time] {
        &self.departures[k]
    }

    pub fn departures(&self) -> &[Vec<Time>] {
        &self.departures
    }

    pub fn trace(&self) -> Option<&Trace> {
        self.trace.as_ref()
    }
}

/// The last `M` departure vectors, most recent first.
///
/// Before any step the window is `[d(0), d(−1), …]` = `[e, ε, …, ε]`.
#[derive(Clone, Debug)]
pub struct History {
    window: VecDeque<Vec<Time>>,
}

impl History {
    pub fn new(n: usize, horizon: usize) -> Self {
        assert!(horizon >= 1, "history needs at least one slot");
        let mut window = VecDeque::with_capacity(horizon);
        window.push_back(vec![Time::e(); n]);
        for _ in 1..horizon {
            window.push_back(vec![Time::Eps; n]);
        }
        History { window }
    }

    pub fn horizon(&self) -> usize {
        self.window.len()
    }

    /// `d(k − m)` relative to the step about to be computed, `1 ≤ m ≤ M`.
    pub fn delayed(&self, m: usize) -> &[Time] {
        &self.window[m - 1]
    }

    pub fn push(&mut self, d: Vec<Time>) {
        self.window.pop_back();
        self.window.push_front(d);
    }

    /// `[d(k−1); d(k−2); …; d(k−M)]`.
    pub fn stacked(&self) -> Vec<Time> {
        self.window.iter().flatten().copied().collect()
    }
}

/// One step of the implicit route: assembles `v` from the history, then
/// solves `d(k) = U ⊗ d(k) ⊕ v` with `U = 𝒯_k ⊗ G_0^T`.
pub fn step_implicit(
    history: &History,
    blocking: Blocking,
    da: &DelayedAdjacency,
    tau: &Matrix,
    p: usize,
) -> Result<Vec<Time>, MaxPlusError> {
    let n = da.node_count();
    let mut v = tau.apply(history.delayed(1))?;
    let mut delayed = vec![Time::Eps; n];
    for m in 1..=da.horizon() {
        let d = history.delayed(m);
        let gt = da.g(m).transpose();
        let h = da.h(m);
        let term = match blocking {
            // 𝒯_k is applied once to the accumulated sum below
            Blocking::None => gt.apply(d)?,
            Blocking::Manufacturing => tau.otimes(&gt)?.oplus(h)?.apply(d)?,
            Blocking::Communication => gt.oplus(h)?.apply(d)?,
        };
        delayed = vec_oplus(&delayed, &term);
    }
    let delayed = match blocking {
        Blocking::None | Blocking::Communication => tau.apply(&delayed)?,
        Blocking::Manufacturing => delayed,
    };
    v = vec_oplus(&v, &delayed);

    let u = tau.otimes(&da.g(0).transpose())?;
    solve_with_depth(&u, &v, p)
}

/// `d(k) = ⊕_{m=1..M} T_m(k) ⊗ d(k − m)`.
pub fn step_explicit(history: &History, ts: &TransitionSet) -> Vec<Time> {
    let n = ts.node_count();
    (1..=ts.horizon()).fold(vec![Time::Eps; n], |acc, m| {
        let term = ts
            .t(m)
            .apply(history.delayed(m))
            .expect("transition set and history share the node count");
        vec_oplus(&acc, &term)
    })
}

/// `d̂(k) = T̂(k) ⊗ d̂(k − 1)`.
pub fn step_extended(state: &[Time], extended: &Matrix) -> Vec<Time> {
    extended
        .apply(state)
        .expect("extended matrix matches the stacked state")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("network cannot be evolved explicitly: G_0 has the circuit {}", format_cycle(.0.circuit.as_deref().unwrap_or(&[])))]
    Unsolvable(SolvabilityReport),
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error(transparent)]
    Algebra(#[from] MaxPlusError),
}

impl From<SystemError> for RunError {
    fn from(err: SystemError) -> Self {
        match err {
            SystemError::Unsolvable { circuit } => RunError::Unsolvable(SolvabilityReport {
                longest_path: None,
                circuit: Some(circuit),
                remediation: Vec::new(),
            }),
            SystemError::Service(e) => RunError::Service(e),
            SystemError::Algebra(e) => RunError::Algebra(e),
        }
    }
}

/// Runs `steps` steps of the chosen engine from `d(0) = e`.
pub fn run(
    network: &Network,
    source: &ServiceTimeSource,
    steps: usize,
    engine: Engine,
    with_trace: bool,
) -> Result<Trajectory, RunError> {
    run_system(
        &System::new(network.clone()),
        source,
        steps,
        engine,
        with_trace,
    )
}

/// Like [`run`], reusing an already analysed system.
pub fn run_system(
    system: &System,
    source: &ServiceTimeSource,
    steps: usize,
    engine: Engine,
    with_trace: bool,
) -> Result<Trajectory, RunError> {
    let report = system.report();
    let Some(p) = report.longest_path else {
        return Err(RunError::Unsolvable(report.clone()));
    };
    let network = system.network();
    let n = network.node_count();
    source.check_nodes(n)?;

    let mut departures = Vec::with_capacity(steps + 1);
    departures.push(vec![Time::e(); n]);
    let mut history = History::new(n, system.horizon());
    let mut stacked = history.stacked();

    for k in 1..=steps {
        let next = match engine {
            Engine::Implicit => {
                let tau = service_matrix(source, n, k)?;
                step_implicit(&history, network.blocking(), system.adjacency(), &tau, p)?
            }
            Engine::Explicit => step_explicit(&history, &system.transitions(source, k)?),
            Engine::Extended => {
                let extended = build_extended_transition(&system.transitions(source, k)?);
                stacked = step_extended(&stacked, &extended);
                stacked[..n].to_vec()
            }
        };
        history.push(next.clone());
        departures.push(next);
    }

    let trajectory = Trajectory::from_departures(engine.into(), departures);
    if with_trace {
        let trace = reconstruct_trace(network, source, trajectory.departures())?;
        Ok(trajectory.with_trace(trace))
    } else {
        Ok(trajectory)
    }
}

fn departure_at(departures: &[Vec<Time>], k: i64, node: usize) -> Time {
    if k < 0 {
        Time::Eps
    } else {
        departures[k as usize][node]
    }
}

/// Recovers `a`, `b`, `c` from a departure history through the per-node
/// equations: `a_i(k) = ⊕_{j ∈ P(i)} d_j(k − r_i)`,
/// `b_i(k) = a_i(k) ⊕ d_i(k − 1)` (plus `𝒟_i(k)` under communication
/// blocking) and `c_i(k) = τ_ik ⊗ b_i(k)`.
pub fn reconstruct_trace(
    network: &Network,
    source: &ServiceTimeSource,
    departures: &[Vec<Time>],
) -> Result<Trace, ServiceError> {
    let n = network.node_count();
    let steps = departures.len() - 1;
    let mut trace = Trace {
        a: vec![vec![Time::Eps; n]; steps + 1],
        b: vec![vec![Time::Eps; n]; steps + 1],
        c: vec![vec![Time::Eps; n]; steps + 1],
    };
    for k in 1..=steps {
        let ki = k as i64;
        for i in 0..n {
            let a = match network.initial(i) {
                Count::Finite(r) => network.predecessors(i).iter().fold(Time::Eps, |acc, &j| {
                    acc.oplus(departure_at(departures, ki - r as i64, j))
                }),
                Count::Infinite => Time::Eps,
            };
            let mut b = a.oplus(departures[k - 1][i]);
            if network.blocking() == Blocking::Communication {
                b = b.oplus(blocking_bound(network, departures, ki, i));
            }
            let tau = Time::Fin(source.service_time(i, k)?);
            trace.a[k][i] = a;
            trace.b[k][i] = b;
            trace.c[k][i] = tau.otimes(b);
        }
    }
    Ok(trace)
}

/// `𝒟_i(k) = ⊕_{j ∈ S(i)} d_j(k − s_j − 1)`, with infinite buffers contributing ε.
pub fn blocking_bound(network: &Network, departures: &[Vec<Time>], k: i64, i: usize) -> Time {
    network
        .successors(i)
        .iter()
        .fold(Time::Eps, |acc, &j| match network.capacity(j) {
            Count::Finite(s) => acc.oplus(departure_at(departures, k - s as i64 - 1, j)),
            Count::Infinite => acc,
        })
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
        let net = tandem(Infinite, Blocking::None);
        let src = ServiceTimeSource::table(vec![vec![1; 5], vec![2; 5]]).unwrap();
        for engine in Engine::ALL {
            let traj = run(&net, &src, 3, engine, false).unwrap();
            assert_eq!(traj.d(0), fins(&[0, 0]).as_slice());
            assert_eq!(traj.d(1), fins(&[1, 3]).as_slice());
            assert_eq!(traj.d(2), fins(&[2, 5]).as_slice());
            assert_eq!(traj.d(3), fins(&[3, 7]).as_slice());
        }
    }

    #[test]
    fn isolated_source_accumulates() {
        let net = NetworkSpec {
            node_count: 1,
            arcs: Default::default(),
            initial: vec![Infinite],
            capacity: vec![Infinite],
            blocking: Blocking::None,
        }
        .validate()
        .unwrap();
        let src = ServiceTimeSource::table(vec![vec![4; 6]]).unwrap();
        let traj = run(&net, &src, 6, Engine::Implicit, false).unwrap();
        for k in 0..=6 {
            assert_eq!(traj.d(k), &[Fin(4 * k as i64)]);
        }
    }

    #[test]
    fn explicit_first_step_ignores_negative_history() {
        let sys = System::new(tandem(Finite(2), Blocking::Manufacturing));
        assert_eq!(sys.horizon(), 3);
        let src = ServiceTimeSource::table(vec![vec![1; 3], vec![2; 3]]).unwrap();
        let ts = sys.transitions(&src, 1).unwrap();
        let history = History::new(2, 3);
        assert!(history.delayed(2).iter().all(|x| x.is_eps()));
        assert!(history.delayed(3).iter().all(|x| x.is_eps()));
        let d1 = step_explicit(&history, &ts);
        // only T_1 ⊗ d(0) contributes
        assert_eq!(d1, ts.t(1).apply(history.delayed(1)).unwrap());
        assert_eq!(d1, fins(&[1, 3]));
    }

    #[test]
    fn extended_shifts_history() {
        let sys = System::new(tandem(Finite(0), Blocking::Communication));
        assert_eq!(sys.horizon(), 1);
        let sys = System::new(tandem(Finite(1), Blocking::Communication));
        assert_eq!(sys.horizon(), 2);
        let src = ServiceTimeSource::seeded(9, 9).unwrap();
        let mut state = History::new(2, 2).stacked();
        for k in 1..6 {
            let ext = build_extended_transition(&sys.transitions(&src, k).unwrap());
            let next = step_extended(&state, &ext);
            assert_eq!(&next[2..], &state[..2]);
            state = next;
        }
    }

    #[test]
    fn finite_buffer_extended_matches_explicit() {
        let net = tandem(Finite(1), Blocking::Manufacturing);
        let src = ServiceTimeSource::seeded(21, 9).unwrap();
        let explicit = run(&net, &src, 20, Engine::Explicit, false).unwrap();
        let extended = run(&net, &src, 20, Engine::Extended, false).unwrap();
        assert_eq!(explicit.departures(), extended.departures());
    }

    #[test]
    fn fork_join_cyclic_run_fails() {
        let net = fork_join_spec(0, Blocking::Manufacturing).validate().unwrap();
        let src = ServiceTimeSource::seeded(1, 9).unwrap();
        for engine in Engine::ALL {
            match run(&net, &src, 10, engine, false) {
                Err(RunError::Unsolvable(report)) => {
                    assert_eq!(report.circuit, Some(vec![1, 2, 3, 1]))
                }
                other => panic!("expected Unsolvable, got {other:?}"),
            }
        }
    }

    #[test]
    fn fork_join_fixed_run_succeeds() {
        let net = fork_join_spec(1, Blocking::Manufacturing).validate().unwrap();
        let src = ServiceTimeSource::seeded(1, 9).unwrap();
        let runs: Vec<_> = Engine::ALL
            .iter()
            .map(|&e| run(&net, &src, 10, e, false).unwrap())
            .collect();
        assert_eq!(runs[0].departures(), runs[1].departures());
        assert_eq!(runs[0].departures(), runs[2].departures());
    }

    #[test]
    fn trace_ordering_chain() {
        for blocking in [
            Blocking::None,
            Blocking::Manufacturing,
            Blocking::Communication,
        ] {
            let spec = fork_join_spec(1, blocking);
            let net = spec.validate().unwrap();
            let src = ServiceTimeSource::seeded(4, 9).unwrap();
            let traj = run(&net, &src, 15, Engine::Explicit, true).unwrap();
            let trace = traj.trace().unwrap();
            for k in 1..=15 {
                for i in 0..6 {
                    let d = traj.d(k)[i];
                    assert!(trace.a[k][i].oplus(traj.d(k - 1)[i]) <= trace.b[k][i]);
                    assert_eq!(
                        trace.c[k][i],
                        Fin(src.service_time(i, k).unwrap()).otimes(trace.b[k][i])
                    );
                    assert!(d >= trace.c[k][i]);
                    if blocking != Blocking::Manufacturing {
                        assert_eq!(d, trace.c[k][i]);
                    } else {
                        let bound = blocking_bound(&net, traj.departures(), k as i64, i);
                        assert_eq!(d, trace.c[k][i].oplus(bound));
                    }
                }
            }
        }
    }

    #[test]
    fn history_window() {
        let mut h = History::new(1, 3);
        assert_eq!(h.stacked(), vec![Fin(0), Time::Eps, Time::Eps]);
        h.push(vec![Fin(5)]);
        assert_eq!(h.delayed(1), &[Fin(5)]);
        assert_eq!(h.delayed(2), &[Fin(0)]);
        assert_eq!(h.stacked(), vec![Fin(5), Fin(0), Time::Eps]);
    }
}
