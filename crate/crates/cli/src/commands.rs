use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use fjqn::dynamics::{reconstruct_trace, run_system, Engine, RunError, Trajectory};
use fjqn::export::{matrices_json, trajectory_csv, trajectory_json};
use fjqn::network::{Network, NetworkFile, ServiceTimeSource};
use fjqn::oracle::{compare, compare_trajectories, simulate, EventLog, MatchReport, OracleError};
use fjqn::system::{format_cycle, SolvabilityReport, System};

use crate::{Format, MethodArg, RunArgs};

pub const INPUT_ERROR: u8 = 1;
pub const UNSOLVABLE: u8 = 2;
pub const MISMATCH: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: anyhow::Error) -> Self {
        Failure { code, error }
    }

    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure::new(INPUT_ERROR, error.into())
    }
}

type Outcome = Result<(), Failure>;

fn load(path: &Path) -> Result<(NetworkFile, Network, ServiceTimeSource), Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::input)?;
    let file = NetworkFile::parse(&text)
        .with_context(|| path.display().to_string())
        .map_err(Failure::input)?;
    let (network, source) = file
        .load()
        .with_context(|| path.display().to_string())
        .map_err(Failure::input)?;
    Ok((file, network, source))
}

fn describe(report: &SolvabilityReport) -> String {
    let mut out = String::new();
    match report.longest_path {
        Some(p) => {
            writeln!(out, "solvable").unwrap();
            writeln!(out, "p: {p}").unwrap();
        }
        None => {
            writeln!(out, "unsolvable").unwrap();
            let circuit = report.circuit.as_deref().unwrap_or(&[]);
            writeln!(out, "circuit: {}", format_cycle(circuit)).unwrap();
            for fix in &report.remediation {
                writeln!(
                    out,
                    "remediation: set r_{} >= {}",
                    fix.node + 1,
                    fix.min_initial
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn check(path: &Path) -> Outcome {
    let (_, network, _) = load(path)?;
    let system = System::new(network);
    let report = system.report();
    print!("{}", describe(report));
    if report.is_solvable() {
        Ok(())
    } else {
        Err(Failure::new(
            UNSOLVABLE,
            anyhow!("G_0 has a circuit; the explicit state equation does not exist"),
        ))
    }
}

fn unsolvable(report: &SolvabilityReport) -> Failure {
    eprint!("{}", describe(report));
    Failure::new(
        UNSOLVABLE,
        anyhow!("G_0 has a circuit; the network cannot be evolved explicitly"),
    )
}

fn engine_failure(err: RunError) -> Failure {
    match err {
        RunError::Unsolvable(report) => unsolvable(&report),
        other => Failure::input(other),
    }
}

fn oracle_failure(err: OracleError) -> Failure {
    match err {
        OracleError::Deadlock { .. } => Failure::new(UNSOLVABLE, err.into()),
        OracleError::Service(_) => Failure::input(err),
    }
}

fn render(trajectory: &Trajectory, format: Format) -> String {
    match format {
        Format::Csv => trajectory_csv(trajectory),
        Format::Json => trajectory_json(trajectory),
    }
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn engine_of(method: MethodArg) -> Option<Engine> {
    match method {
        MethodArg::Implicit => Some(Engine::Implicit),
        MethodArg::Explicit => Some(Engine::Explicit),
        MethodArg::Extended => Some(Engine::Extended),
        MethodArg::Oracle | MethodArg::All => None,
    }
}

fn oracle_trajectory(
    network: &Network,
    source: &ServiceTimeSource,
    log: &EventLog,
    with_trace: bool,
) -> Result<Trajectory, Failure> {
    let trajectory = log.to_trajectory();
    if !with_trace {
        return Ok(trajectory);
    }
    let trace =
        reconstruct_trace(network, source, trajectory.departures()).map_err(Failure::input)?;
    Ok(trajectory.with_trace(trace))
}

struct Output<'a> {
    args: &'a RunArgs,
    stdout: String,
}

impl Output<'_> {
    fn emit(&mut self, name: &str, contents: &str) -> Outcome {
        match &self.args.out {
            Some(dir) => {
                let path = dir.join(name);
                fs::write(&path, contents)
                    .with_context(|| format!("cannot write {}", path.display()))
                    .map_err(Failure::input)
            }
            None => {
                self.stdout.push_str(contents);
                Ok(())
            }
        }
    }

    fn trajectory(&mut self, trajectory: &Trajectory) -> Outcome {
        let name = format!(
            "trajectory_{}.{}",
            trajectory.method(),
            extension(self.args.format)
        );
        self.emit(&name, &render(trajectory, self.args.format))
    }
}

pub fn run(args: &RunArgs) -> Outcome {
    let (file, network, mut source) = load(&args.spec)?;
    if let Some(seed) = args.seed {
        source = source.reseeded(seed).ok_or_else(|| {
            Failure::input(anyhow!(
                "--seed needs a seeded service source, the file has a table"
            ))
        })?;
    }
    let steps = args.steps.or(file.steps).ok_or_else(|| {
        Failure::input(anyhow!(
            "number of steps missing: pass --steps or set \"steps\""
        ))
    })?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create {}", dir.display()))
            .map_err(Failure::input)?;
    }

    let system = System::new(network);
    let mut output = Output {
        args,
        stdout: String::new(),
    };

    let result = if args.method == MethodArg::All {
        run_all(&system, &source, steps, &mut output)
    } else {
        let trajectory = match engine_of(args.method) {
            Some(engine) => {
                run_system(&system, &source, steps, engine, args.trace).map_err(engine_failure)?
            }
            None => {
                let log = simulate(system.network(), &source, steps).map_err(oracle_failure)?;
                oracle_trajectory(system.network(), &source, &log, args.trace)?
            }
        };
        output.trajectory(&trajectory)
    };
    if result.as_ref().is_err_and(|f| f.code != MISMATCH) {
        return result;
    }

    if args.dump_matrices {
        let dump = matrices_json(&system, &source, steps).map_err(|e| match e {
            fjqn::system::SystemError::Unsolvable { .. } => unsolvable(system.report()),
            other => Failure::input(other),
        })?;
        output.emit("matrices.json", &dump)?;
    }
    print!("{}", output.stdout);
    result
}

fn verdict(label: &str, report: &MatchReport, lines: &mut String) -> bool {
    match &report.first {
        None => writeln!(lines, "{label}: match").unwrap(),
        Some(first) => writeln!(
            lines,
            "{label}: {} mismatching entries, first at {first}",
            report.mismatches
        )
        .unwrap(),
    }
    report.is_match()
}

fn run_all(
    system: &System,
    source: &ServiceTimeSource,
    steps: usize,
    output: &mut Output<'_>,
) -> Outcome {
    let with_trace = output.args.trace;
    let (engines, oracle) = std::thread::scope(|scope| {
        let handles: Vec<_> = Engine::ALL
            .iter()
            .map(|&engine| {
                scope.spawn(move || run_system(system, source, steps, engine, with_trace))
            })
            .collect();
        let oracle = scope.spawn(|| simulate(system.network(), source, steps));
        let engines: Vec<_> = handles
            .into_iter()
            .map(|h| h.join().expect("engine thread panicked"))
            .collect();
        (engines, oracle.join().expect("oracle thread panicked"))
    });

    let engines = match engines.into_iter().collect::<Result<Vec<_>, _>>() {
        Ok(runs) => runs,
        Err(RunError::Unsolvable(report)) => {
            return match oracle {
                Err(OracleError::Deadlock { .. }) => Err(unsolvable(&report)),
                Err(other) => Err(oracle_failure(other)),
                Ok(_) => {
                    eprint!("{}", describe(&report));
                    Err(Failure::new(
                        MISMATCH,
                        anyhow!(
                            "engines report a circuit in G_0 but the simulation did not deadlock"
                        ),
                    ))
                }
            };
        }
        Err(other) => return Err(engine_failure(other)),
    };
    let log = match oracle {
        Ok(log) => log,
        Err(OracleError::Deadlock { .. }) => {
            return Err(Failure::new(
                MISMATCH,
                anyhow!("simulation deadlocked on a network the engines can evolve"),
            ))
        }
        Err(other) => return Err(oracle_failure(other)),
    };
    let oracle = oracle_trajectory(system.network(), source, &log, with_trace)?;

    let reference = &engines[1];
    let mut lines = String::new();
    let mut agree = true;
    for other in [&engines[0], &engines[2]] {
        let label = format!("{} vs {}", other.method(), reference.method());
        agree &= verdict(&label, &compare_trajectories(reference, other), &mut lines);
    }
    agree &= verdict(
        &format!("oracle vs {}", reference.method()),
        &compare(reference, &log),
        &mut lines,
    );
    lines.push_str(if agree { "MATCH\n" } else { "MISMATCH\n" });

    if output.args.out.is_some() {
        for trajectory in engines.iter().chain([&oracle]) {
            output.trajectory(trajectory)?;
        }
    }
    print!("{lines}");
    if agree {
        Ok(())
    } else {
        Err(Failure::new(
            MISMATCH,
            anyhow!("engine and simulation trajectories differ"),
        ))
    }
}
