//! Engines against each other and against the event simulator on random networks.

use fjqn::dynamics::{run_system, Engine, RunError};
use fjqn::network::{Blocking, ServiceTimeSource};
use fjqn::oracle::{compare, compare_trajectories, simulate, OracleError};
use fjqn::random::{random_network, RandomNetworkConfig};
use fjqn::system::System;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DISCIPLINES: [Blocking; 3] = [
    Blocking::None,
    Blocking::Manufacturing,
    Blocking::Communication,
];

#[test]
fn engines_and_oracle_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let config = RandomNetworkConfig::default();
    let mut checked = 0;
    for case in 0..400 {
        let blocking = DISCIPLINES[case % 3];
        let network = random_network(&mut rng, &config, blocking);
        let source = ServiceTimeSource::seeded(rng.gen(), 9).unwrap();
        let system = System::new(network.clone());
        if !system.report().is_solvable() {
            continue;
        }
        let runs: Vec<_> = Engine::ALL
            .iter()
            .map(|&e| run_system(&system, &source, 30, e, false).unwrap())
            .collect();
        for other in &runs[1..] {
            let report = compare_trajectories(&runs[0], other);
            assert!(
                report.is_match(),
                "case {case}: {:?} {network:?}",
                report.first
            );
        }
        let log = simulate(&network, &source, 30).unwrap();
        let report = compare(&runs[0], &log);
        assert!(
            report.is_match(),
            "case {case}: oracle {:?}\n{network:?}",
            report.first
        );
        checked += 1;
    }
    assert!(checked > 100, "only {checked} solvable cases");
}

#[test]
fn deadlock_iff_cyclic() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let config = RandomNetworkConfig::default();
    for case in 0..300 {
        let network = random_network(&mut rng, &config, DISCIPLINES[case % 3]);
        let source = ServiceTimeSource::seeded(rng.gen(), 9).unwrap();
        let system = System::new(network.clone());
        let engine = run_system(&system, &source, 10, Engine::Explicit, false);
        let oracle = simulate(&network, &source, 10);
        match (engine, oracle) {
            (Ok(_), Ok(_)) => assert!(system.report().is_solvable()),
            (Err(RunError::Unsolvable(_)), Err(OracleError::Deadlock { .. })) => {}
            (e, o) => panic!("case {case}: engine {:?} oracle {:?}", e.err(), o.err()),
        }
    }
}
