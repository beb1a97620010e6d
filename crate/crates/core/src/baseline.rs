//! Penalty-QUBO single-bit-flip baselines.
//!
//! These searchers ignore the assignment structure: they flip one bit at a
//! time under the penalty energy, so feasible vectors are isolated points
//! separated by at least three infeasible ones.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::feasible::{is_feasible, objective, to_binary};
use crate::instance::Instance;
use crate::qubo::PenaltyQubo;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BitflipRecord {
    pub energy: f64,
    pub is_feasible: bool,
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BitflipTrace {
    pub records: Vec<BitflipRecord>,
    pub feasible_count: usize,
    pub best_feasible_objective: Option<f64>,
}

impl BitflipTrace {
    pub fn push(&mut self, energy: f64, feasible: bool) {
        self.records.push(BitflipRecord {
            energy,
            is_feasible: feasible,
        });
        if feasible {
            self.feasible_count += 1;
            let best = self.best_feasible_objective.get_or_insert(energy);
            if energy < *best {
                *best = energy;
            }
        }
    }

    /// Running minimum of the feasible energies; `None` until the first
    /// feasible record.
    pub fn best_feasible_curve(&self) -> Vec<Option<f64>> {
        let mut best: Option<f64> = None;
        self.records
            .iter()
            .map(|r| {
                if r.is_feasible {
                    best = Some(best.map_or(r.energy, |b| b.min(r.energy)));
                }
                best
            })
            .collect()
    }
}

pub fn count_feasible_visits(trace: &BitflipTrace) -> usize {
    trace.records.iter().filter(|r| r.is_feasible).count()
}

/// Single-flip tabu search on the penalty energy, starting from a random
/// feasible vector. Each iteration flips the best non-tabu bit (a tabu bit is
/// allowed when it would beat the best energy seen) and forbids flipping it
/// again for `tenure` iterations. The trace holds the start and every
/// iteration.
pub fn run_qubo_tabu_single_flip(pq: &PenaltyQubo, iters: usize, seed: u64, tenure: usize) -> BitflipTrace {
    let n = pq.n();
    let dim = n * n;
    let q = &pq.q;
    let lambda = pq.lambda;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let sigma = q.encode(&perm);
    let mut x: Vec<u8> = to_binary(&sigma).map(|b| b.bits().to_vec()).unwrap_or_else(|_| vec![0; dim]);

    // Q is symmetric, so flipping bit k changes x^T Q x by (1 - 2 x_k)(2 (Qx)_k + Q_kk).
    let mut qx = vec![0.0; dim];
    q.matvec_permutation(&sigma, &mut qx);
    let mut block_sum = vec![1i64; n];
    let mut res_sum = vec![1i64; n];
    let mut energy = q.quadratic_form_permutation(&sigma);
    let mut best_energy = energy;
    let mut tabu_until = vec![0usize; dim];

    let mut trace = BitflipTrace::default();
    trace.push(energy, true);

    for it in 1..=iters {
        let mut pick: Option<(usize, f64)> = None;
        for k in 0..dim {
            let d = if x[k] == 1 { -1.0 } else { 1.0 };
            let (b, r) = (k / n, k % n);
            let dq = d * 2.0 * qx[k] + q.entry(k, k);
            let dp = lambda
                * (2.0 * d * (block_sum[b] - 1) as f64 + 1.0 + 2.0 * d * (res_sum[r] - 1) as f64 + 1.0);
            let delta = dq + dp;
            let allowed = tabu_until[k] < it || energy + delta < best_energy;
            if allowed && pick.is_none_or(|(_, best)| delta < best) {
                pick = Some((k, delta));
            }
        }
        let Some((k, delta)) = pick else {
            trace.push(energy, is_feasible(&x, n));
            continue;
        };
        let d = if x[k] == 1 { -1.0 } else { 1.0 };
        x[k] = if x[k] == 1 { 0 } else { 1 };
        let (b, r) = (k / n, k % n);
        block_sum[b] += d as i64;
        res_sum[r] += d as i64;
        for (i, v) in qx.iter_mut().enumerate() {
            *v += d * q.entry(i, k);
        }
        energy += delta;
        best_energy = best_energy.min(energy);
        tabu_until[k] = it + tenure;
        let feasible = block_sum.iter().all(|&s| s == 1) && res_sum.iter().all(|&s| s == 1);
        trace.push(energy, feasible);
    }
    trace
}

/// Uniformly random permutations evaluated with the native objective.
pub fn run_random_feasible(instance: &Instance, iters: usize, seed: u64) -> BitflipTrace {
    let n = instance.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut trace = BitflipTrace::default();
    for _ in 0..iters {
        perm.shuffle(&mut rng);
        let f = objective(instance, &perm).expect("valid permutation");
        trace.push(f, true);
    }
    trace
}
