//! Text renderings of trajectories and matrices. ε is written `eps`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::maxplus::Matrix;
use crate::network::ServiceTimeSource;
use crate::system::{build_extended_transition, System, SystemError};
use crate::Time;

/// CSV with header `k,d_1,…,d_n`; with a trace, `a_i`, `b_i`, `c_i` columns follow.
pub fn trajectory_csv(trajectory: &Trajectory) -> String {
    let n = trajectory.node_count();
    let mut out = String::from("k");
    let mut prefixes = vec!["d"];
    if trajectory.trace().is_some() {
        prefixes.extend(["a", "b", "c"]);
    }
    for prefix in &prefixes {
        for i in 1..=n {
            write!(out, ",{prefix}_{i}").unwrap();
        }
    }
    out.push('\n');

    for k in 0..=trajectory.steps() {
        write!(out, "{k}").unwrap();
        push_cells(&mut out, trajectory.d(k));
        if let Some(trace) = trajectory.trace() {
            push_cells(&mut out, &trace.a[k]);
            push_cells(&mut out, &trace.b[k]);
            push_cells(&mut out, &trace.c[k]);
        }
        out.push('\n');
    }
    out
}

fn push_cells(out: &mut String, row: &[Time]) {
    for x in row {
        write!(out, ",{x}").unwrap();
    }
}

#[derive(Serialize)]
struct TrajectoryDocument<'a> {
    nodes: usize,
    steps: usize,
    #[serde(flatten)]
    trajectory: &'a Trajectory,
}

/// JSON mirror of the CSV: `{"nodes", "steps", "d", ["a", "b", "c"]}`.
pub fn trajectory_json(trajectory: &Trajectory) -> String {
    let doc = TrajectoryDocument {
        nodes: trajectory.node_count(),
        steps: trajectory.steps(),
        trajectory,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("trajectory serializes");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct StepMatrices {
    k: usize,
    #[serde(rename = "T")]
    transitions: Vec<Matrix>,
    #[serde(rename = "T_hat")]
    extended: Matrix,
}

#[derive(Serialize)]
struct MatrixDump<'a> {
    nodes: usize,
    #[serde(rename = "M")]
    horizon: usize,
    p: usize,
    #[serde(flatten)]
    adjacency: &'a crate::system::DelayedAdjacency,
    steps: Vec<StepMatrices>,
}

/// Dumps `G_m`, `H_m` and, for `k = 1..=steps`, `T_m(k)` and `T̂(k)` as JSON.
pub fn matrices_json(
    system: &System,
    source: &ServiceTimeSource,
    steps: usize,
) -> Result<String, SystemError> {
    let p = system.report().require_solvable()?;
    let steps = (1..=steps)
        .map(|k| {
            let ts = system.transitions(source, k)?;
            Ok(StepMatrices {
                k,
                extended: build_extended_transition(&ts),
                transitions: ts.matrices().to_vec(),
            })
        })
        .collect::<Result<Vec<_>, SystemError>>()?;
    let dump = MatrixDump {
        nodes: system.network().node_count(),
        horizon: system.horizon(),
        p,
        adjacency: system.adjacency(),
        steps,
    };
    let mut text = serde_json::to_string_pretty(&dump).expect("matrices serialize");
    text.push('\n');
    Ok(text)
}
