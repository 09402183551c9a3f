use fjqn::dynamics::{blocking_bound, run_system, Engine};
use fjqn::maxplus::{analyze_acyclicity, Matrix};
use fjqn::network::{Blocking, Count, Network, ServiceTimeSource};
use fjqn::random::{random_network, RandomNetworkConfig};
use fjqn::system::{service_matrix, System};
use fjqn::Time;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn network(blocking: Blocking) -> impl Strategy<Value = Network> {
    any::<u64>().prop_map(move |seed| {
        random_network(
            &mut ChaCha8Rng::seed_from_u64(seed),
            &RandomNetworkConfig::default(),
            blocking,
        )
    })
}

fn any_network() -> impl Strategy<Value = Network> {
    prop_oneof![
        network(Blocking::None),
        network(Blocking::Manufacturing),
        network(Blocking::Communication)
    ]
}

fn solvable_network(blocking: Blocking) -> impl Strategy<Value = Network> {
    network(blocking).prop_filter("cyclic G_0", |net| {
        System::new(net.clone()).report().is_solvable()
    })
}

fn source() -> impl Strategy<Value = ServiceTimeSource> {
    any::<u64>().prop_map(|seed| ServiceTimeSource::seeded(seed, 9).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn delayed_adjacency_columns(net in any_network()) {
        let system = System::new(net.clone());
        let da = system.adjacency();
        let n = net.node_count();
        for m in 0..=da.horizon() {
            for i in 0..n {
                for j in 0..n {
                    let arc = net.arcs().any(|a| a == (i, j));
                    let want_g = arc && net.initial(j) == Count::Finite(m as u32);
                    prop_assert_eq!(!da.g(m).get(i, j).is_eps(), want_g, "G_{} ({}, {})", m, i, j);
                    if let Some(e) = da.g(m).get(i, j).finite() {
                        prop_assert_eq!(e, 0);
                    }
                    if m >= 1 {
                        let want_h = arc && net.capacity(j) == Count::Finite(m as u32 - 1);
                        prop_assert_eq!(!da.h(m).get(i, j).is_eps(), want_h, "H_{} ({}, {})", m, i, j);
                    }
                }
            }
        }
        // every column is governed by one r_j and one s_j, so at most one G_m
        // and one H_m can touch it
        for j in 0..n {
            let g_hits = (0..=da.horizon()).filter(|&m| (0..n).any(|i| !da.g(m).get(i, j).is_eps())).count();
            let h_hits = (1..=da.horizon()).filter(|&m| (0..n).any(|i| !da.h(m).get(i, j).is_eps())).count();
            prop_assert!(g_hits <= 1 && h_hits <= 1);
        }
        let g0: Vec<_> = net.arcs().filter(|&(_, j)| net.initial(j) == Count::Finite(0)).collect();
        prop_assert_eq!(da.g0_graph().arcs().iter().copied().collect::<Vec<_>>(), g0);
    }

    #[test]
    fn validate_is_idempotent(net in any_network()) {
        let again = net.spec().clone().validate().unwrap();
        prop_assert_eq!(&again, &net);
        prop_assert_eq!(again.spec().clone().validate().unwrap(), net);
    }

    #[test]
    fn service_matrix_is_diagonal(src in source(), n in 1usize..=6, k in 1usize..=50) {
        let tau = service_matrix(&src, n, k).unwrap();
        for i in 0..n {
            for j in 0..n {
                let v = tau.get(i, j);
                if i == j {
                    prop_assert_eq!(v, Time::Fin(src.service_time(i, k).unwrap()));
                    prop_assert!(v.is_positive());
                } else {
                    prop_assert!(v.is_eps());
                }
            }
        }
    }

    #[test]
    fn closure_is_a_finite_sum(net in solvable_network(Blocking::Manufacturing), src in source()) {
        let system = System::new(net.clone());
        let p = system.report().longest_path.unwrap();
        let n = net.node_count();
        let tau = service_matrix(&src, n, 1).unwrap();
        let u = tau.otimes(&system.adjacency().g(0).transpose()).unwrap();
        let e = Matrix::identity(n);
        let closure = e.oplus(&u).unwrap().pow(p as u32).unwrap();
        let mut sum = e.clone();
        let mut power = e;
        for _ in 0..p {
            power = power.otimes(&u).unwrap();
            sum = sum.oplus(&power).unwrap();
        }
        prop_assert_eq!(&closure, &sum);
        // nothing further is added past p
        prop_assert!(power.otimes(&u).unwrap().is_null());
        prop_assert_eq!(analyze_acyclicity(&system.adjacency().g0_graph()).longest_path(), Some(p));
    }

    #[test]
    fn departures_are_monotone(net in solvable_network(Blocking::Communication), src in source()) {
        let system = System::new(net);
        let traj = run_system(&system, &src, 30, Engine::Explicit, false).unwrap();
        for k in 1..=traj.steps() {
            for i in 0..traj.node_count() {
                let (prev, cur) = (traj.d(k - 1)[i], traj.d(k)[i]);
                prop_assert!(cur.is_positive() && cur > prev, "d_{}({}) = {} after {}", i, k, cur, prev);
            }
        }
    }

    #[test]
    fn blocking_bounds_hold(net in solvable_network(Blocking::Manufacturing), src in source()) {
        let system = System::new(net.clone());
        let traj = run_system(&system, &src, 30, Engine::Explicit, false).unwrap();
        for k in 1..=traj.steps() {
            for i in 0..net.node_count() {
                let bound = blocking_bound(&net, traj.departures(), k as i64, i);
                prop_assert!(traj.d(k)[i] >= bound);
            }
        }
    }

    #[test]
    fn communication_never_beats_manufacturing(
        net in solvable_network(Blocking::Manufacturing),
        src in source(),
    ) {
        let comm = net.with_blocking(Blocking::Communication).unwrap();
        let manu = run_system(&System::new(net), &src, 30, Engine::Explicit, false).unwrap();
        let comm = run_system(&System::new(comm), &src, 30, Engine::Explicit, false).unwrap();
        for k in 0..=30 {
            for i in 0..manu.node_count() {
                prop_assert!(comm.d(k)[i] >= manu.d(k)[i]);
            }
        }
    }

    #[test]
    fn blocking_without_buffers_changes_nothing(net in solvable_network(Blocking::Communication), src in source()) {
        let free = net.with_infinite_buffers();
        let plain = free.with_blocking(Blocking::None).unwrap();
        let a = run_system(&System::new(free), &src, 20, Engine::Explicit, false).unwrap();
        let b = run_system(&System::new(plain), &src, 20, Engine::Explicit, false).unwrap();
        prop_assert_eq!(a.departures(), b.departures());
    }
}
