mod common;

use common::{assert_close, random_instance, random_permutation};
use fnqap::feasible::{
    apply_quadruple_flip, exact_pair_difference, objective, objective_binary, to_binary, BinarySolution,
    DifferenceMode,
};
use fnqap::gradient::{evaluate_full_neighbourhood, GradientEngine, GradientMode};
use fnqap::instance::{Instance, Symmetry};
use fnqap::neighbourhood::build_full_neighbourhood;
use fnqap::qubo::{build_q_operator, QOperator};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn native(q: &QOperator, x: &BinarySolution) -> Vec<usize> {
    q.decode(&x.to_permutation())
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn exact_modes(inst: &Instance) -> Vec<GradientMode> {
    if inst.symmetry().has_symmetric_factor() {
        vec![GradientMode::Exact, GradientMode::ExactGeneral]
    } else {
        vec![GradientMode::ExactGeneral]
    }
}

#[test]
fn binary_objective_matches_native_exhaustively() {
    for n in 1..=6 {
        for class in 0..4 {
            let inst = random_instance(100 + n as u64 * 4 + class as u64, n.max(2), class);
            let n = inst.n();
            let q = build_q_operator(&inst);
            for perm in all_permutations(n) {
                let x = to_binary(&q.encode(&perm)).unwrap();
                let fb = objective_binary(&q, &x).unwrap();
                assert_close(fb, objective(&inst, &perm).unwrap(), 1e-12);
                assert_eq!(native(&q, &x), perm);
            }
        }
    }
}

#[test]
fn exact_mode_refused_without_a_symmetric_factor() {
    let inst = random_instance(9, 5, 3);
    assert_eq!(inst.symmetry(), Symmetry::Asymmetric);
    let q = build_q_operator(&inst);
    let x = to_binary(&random_permutation(1, 5)).unwrap();
    let nb = build_full_neighbourhood(&x).unwrap();
    assert!(evaluate_full_neighbourhood(&x, &nb, &q, GradientMode::Exact).is_err());
    assert!(evaluate_full_neighbourhood(&x, &nb, &q, GradientMode::ExactGeneral).is_ok());
}

/// Two hundred random instances over all four classes: twice the exact row
/// value is the brute-force objective change of that swap.
#[test]
fn exact_gradient_equals_brute_force_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..200u64 {
        let n = rng.random_range(4..=8);
        let inst = random_instance(k, n, k as usize % 4);
        let q = build_q_operator(&inst);
        let x = to_binary(&random_permutation(k + 7, n)).unwrap();
        let nb = build_full_neighbourhood(&x).unwrap();
        let fx = objective(&inst, &native(&q, &x)).unwrap();
        for mode in exact_modes(&inst) {
            let theta = evaluate_full_neighbourhood(&x, &nb, &q, mode).unwrap();
            for (i, r) in nb.rows().iter().enumerate() {
                let y = apply_quadruple_flip(&x, r).unwrap();
                let fy = objective(&inst, &native(&q, &y)).unwrap();
                assert_close(2.0 * theta.values[i], fy - fx, 1e-9);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dense_q_matches_matvec(n in 2usize..7, class in 0usize..4, seed in any::<u64>()) {
        let inst = random_instance(seed, n, class);
        let q = build_q_operator(&inst);
        let dense = q.to_dense();
        let dim = n * n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y = q.q_matvec(&v).unwrap();
        for r in 0..dim {
            let expect: f64 = (0..dim).map(|c| dense[r * dim + c] * v[c]).sum();
            assert_close(y[r], expect, 1e-12);
            for c in 0..dim {
                prop_assert_eq!(dense[r * dim + c], dense[c * dim + r]);
            }
        }
        let sigma = random_permutation(seed, n);
        let mut yp = vec![0.0; dim];
        q.matvec_permutation(&sigma, &mut yp);
        let x = to_binary(&sigma).unwrap();
        let yd = q.q_matvec(&x.as_f64()).unwrap();
        for i in 0..dim {
            assert_close(yp[i], yd[i], 1e-12);
        }
    }

    #[test]
    fn symmetrization_preserves_the_quadratic_form(n in 2usize..7, class in 1usize..4, seed in any::<u64>()) {
        let inst = random_instance(seed, n, class);
        let q = build_q_operator(&inst);
        prop_assert!(q.is_symmetrized());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..n * n).map(|_| rng.random_range(-2.0..2.0)).collect();
        // raw A (x) B form, without symmetrizing
        let (qa, qb) = (q.a(), q.b());
        let mut raw = 0.0;
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        raw += v[i * n + a] * qa.get(i, j) * qb.get(a, b) * v[j * n + b];
                    }
                }
            }
        }
        let form = q.quadratic_form(&v).unwrap();
        assert_close(form, raw, 1e-9);
    }

    #[test]
    fn exact_modes_agree_with_pair_differences(n in 3usize..8, class in 0usize..4, seed in any::<u64>()) {
        let inst = random_instance(seed, n, class);
        let q = build_q_operator(&inst);
        let x = to_binary(&random_permutation(seed.wrapping_add(3), n)).unwrap();
        let nb = build_full_neighbourhood(&x).unwrap();
        let general = evaluate_full_neighbourhood(&x, &nb, &q, GradientMode::ExactGeneral).unwrap();
        for (i, r) in nb.rows().iter().enumerate() {
            let d = exact_pair_difference(&q, &x, r, DifferenceMode::General).unwrap();
            assert_close(2.0 * general.values[i], d, 1e-9);
        }
        if inst.symmetry().has_symmetric_factor() {
            let exact = evaluate_full_neighbourhood(&x, &nb, &q, GradientMode::Exact).unwrap();
            for i in 0..nb.len() {
                assert_close(exact.values[i], general.values[i], 1e-9);
            }
        }
    }

    #[test]
    fn engine_matches_reference_path(n in 2usize..8, class in 0usize..4, seed in any::<u64>()) {
        let inst = random_instance(seed, n, class);
        let q = build_q_operator(&inst);
        let x = to_binary(&random_permutation(seed, n)).unwrap();
        let nb = build_full_neighbourhood(&x).unwrap();
        let mut engine = GradientEngine::new(n);
        let mut out = Vec::new();
        let mut modes = vec![GradientMode::Approximate, GradientMode::ExactGeneral];
        if inst.symmetry().has_symmetric_factor() {
            modes.push(GradientMode::Exact);
        }
        for mode in modes {
            engine.evaluate(&q, &x, &nb, mode, &mut out);
            let reference = evaluate_full_neighbourhood(&x, &nb, &q, mode).unwrap();
            prop_assert_eq!(&out, &reference.values);
        }
    }

    #[test]
    fn walks_keep_objective_in_step(n in 3usize..8, class in 0usize..4, seed in any::<u64>()) {
        let inst = random_instance(seed, n, class);
        let q = build_q_operator(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = to_binary(&random_permutation(seed, n)).unwrap();
        let mut nb = build_full_neighbourhood(&x).unwrap();
        let mut engine = GradientEngine::new(n);
        let mut theta = Vec::new();
        let mut f = objective(&inst, &native(&q, &x)).unwrap();
        for _ in 0..100 {
            engine.evaluate(&q, &x, &nb, GradientMode::ExactGeneral, &mut theta);
            let i = rng.random_range(0..nb.len());
            prop_assert_eq!(engine.true_difference(&q, &nb, i), 2.0 * theta[i]);
            f += 2.0 * theta[i];
            let t = *nb.row(i);
            x.apply(&t).unwrap();
            nb.update(t.z1, t.z2).unwrap();
            assert_close(f, objective(&inst, &native(&q, &x)).unwrap(), 1e-9);
        }
        prop_assert_eq!(nb, build_full_neighbourhood(&x).unwrap());
    }
}
