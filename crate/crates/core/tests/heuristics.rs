use fnqap::feasible::FlipTuple;
use fnqap::fetch::bundled_dir;
use fnqap::gradient::GradientMode;
use fnqap::heuristics::{
    choose_sa, choose_top10, choose_walkqap, smallest_rows, HeuristicConfig, HeuristicKind, TabuState,
};
use fnqap::instance::Instance;
use fnqap::search::{run_search, SearchConfig, StartPolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bundled(name: &str) -> Instance {
    Instance::from_file(bundled_dir().join(format!("{name}.dat"))).unwrap()
}

#[test]
fn top10_is_uniform_over_the_ten_smallest() {
    // 45 rows, values decreasing with the index so the pool is rows 35..45
    let theta: Vec<f64> = (0..45).map(|i| 100.0 - i as f64).collect();
    let pool = smallest_rows(&theta, 10);
    assert_eq!(pool, (35..45).rev().collect::<Vec<_>>());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 100_000;
    let mut counts = [0usize; 45];
    for _ in 0..draws {
        counts[choose_top10(&theta, 10, &mut rng).unwrap()] += 1;
    }
    for (i, &c) in counts.iter().enumerate() {
        if i < 35 {
            assert_eq!(c, 0);
        } else {
            let freq = c as f64 / draws as f64;
            assert!((freq - 0.1).abs() < 0.01, "row {i}: {freq}");
        }
    }
}

#[test]
fn walkqap_leaves_the_pool_at_rate_one_minus_p() {
    let theta: Vec<f64> = (0..100).map(|i| i as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draws = 100_000;
    let outside = (0..draws)
        .filter(|_| choose_walkqap(&theta, 10, 0.8, &mut rng).unwrap() >= 10)
        .count();
    // a random row lands outside the pool with probability 0.9
    let freq = outside as f64 / draws as f64;
    assert!((freq - 0.2 * 0.9).abs() < 0.01, "{freq}");
}

#[test]
fn annealing_accepts_a_move_equal_to_the_temperature_at_rate_one_over_e() {
    let t = 3.7;
    let theta = [t];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let draws = 100_000;
    let accepted = (0..draws)
        .filter(|_| choose_sa(&theta, &mut rng, t).unwrap().is_some())
        .count();
    let freq = accepted as f64 / draws as f64;
    assert!((freq - (-1.0f64).exp()).abs() < 0.01, "{freq}");
    assert_eq!(choose_sa(&theta, &mut rng, 0.0).unwrap(), None);
    assert_eq!(choose_sa(&[-1.0], &mut rng, 0.0).unwrap(), Some(0));
}

#[test]
fn tabu_list_evicts_oldest() {
    let mut st = TabuState::new(3, 0.0);
    for h in 1..=4u64 {
        st.record(h);
    }
    assert_eq!(st.len(), 3);
    assert!(!st.contains(1));
    assert_eq!(st.entries().copied().collect::<Vec<_>>(), vec![2, 3, 4]);
}

#[test]
fn tabu_never_undoes_its_previous_move() {
    for gradient_mode in [GradientMode::Approximate, GradientMode::Exact] {
        for seed in 0..3 {
            let inst = bundled("had12");
            let n = inst.n();
            let cfg = SearchConfig {
                i_max: 2000,
                gradient_mode,
                heuristic: HeuristicConfig::new(HeuristicKind::Tabu),
                seed,
                trace: true,
                ..SearchConfig::default()
            };
            let res = run_search(&inst, &cfg).unwrap();
            let trace = res.trace.unwrap();
            let moves: Vec<FlipTuple> = trace
                .iter()
                .filter_map(|t| Some(FlipTuple::from_pair(t.z1?, t.z2?, n).unwrap()))
                .collect();
            assert_eq!(moves.len(), 2000);
            for w in moves.windows(2) {
                assert_ne!(w[1], w[0].reversed(n), "{gradient_mode} seed {seed}");
            }
            // no period-2 objective cycle in the tail either
            let tail: Vec<f64> = trace[1000..].iter().map(|t| t.objective).collect();
            let periodic = tail.windows(3).all(|w| w[0] == w[2]);
            assert!(!periodic);
        }
    }
}

#[test]
fn greedy_oscillates_on_chr12a() {
    let inst = bundled("chr12a");
    let run = |mode| {
        let cfg = SearchConfig {
            i_max: 20,
            gradient_mode: mode,
            heuristic: HeuristicConfig::new(HeuristicKind::Greedy),
            start: StartPolicy::Identity,
            trace: true,
            ..SearchConfig::default()
        };
        run_search(&inst, &cfg)
            .unwrap()
            .trace
            .unwrap()
            .iter()
            .map(|t| t.objective)
            .collect::<Vec<f64>>()
    };
    let exact = run(GradientMode::Exact);
    assert_eq!(
        &exact[..9],
        &[40172.0, 30736.0, 23752.0, 20184.0, 19146.0, 18196.0, 17278.0, 17210.0, 17278.0]
    );
    for (k, &f) in exact.iter().enumerate().skip(6) {
        assert_eq!(f, if k % 2 == 0 { 17278.0 } else { 17210.0 });
    }
    let approx = run(GradientMode::Approximate);
    assert_eq!(approx[0], 40172.0);
    for (k, &f) in approx.iter().enumerate().skip(1) {
        assert_eq!(f, if k % 2 == 1 { 46646.0 } else { 43420.0 });
    }
}

#[test]
fn runs_are_reproducible_per_seed() {
    let inst = bundled("tai12a");
    for kind in HeuristicKind::ALL {
        let cfg = SearchConfig {
            i_max: 300,
            heuristic: HeuristicConfig::new(kind),
            seed: 17,
            trace: true,
            ..SearchConfig::default()
        };
        let a = run_search(&inst, &cfg).unwrap();
        let b = run_search(&inst, &cfg).unwrap();
        assert_eq!(a.trace, b.trace, "{kind}");
        assert_eq!(a.x_best, b.x_best);
        assert_eq!(fnqap::feasible::objective(&inst, &a.x_best).unwrap(), a.f_best);
    }
}
