//! The search driver: evaluate every neighbour, pick one, flip, update.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::feasible::{check_permutation, to_binary, BinarySolution};
use crate::gradient::{GradientEngine, GradientMode};
use crate::heuristics::{
    choose_greedy, choose_sa, choose_tabu, choose_top10, choose_walkqap, estimate_temperatures,
    HeuristicConfig, HeuristicKind, TabuState, TemperatureSchedule, Temperatures, Zobrist,
};
use crate::instance::Instance;
use crate::neighbourhood::build_full_neighbourhood;
use crate::qubo::{build_q_operator, QOperator};

/// Iterations between full objective recomputations.
pub const AUDIT_INTERVAL: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum StartPolicy {
    Identity,
    Random,
    /// Facility-to-location permutation.
    Given(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SearchConfig {
    pub i_max: usize,
    pub gradient_mode: GradientMode,
    pub heuristic: HeuristicConfig,
    pub start: StartPolicy,
    pub trials: usize,
    pub seed: u64,
    /// Keep a per-iteration trace.
    pub trace: bool,
    /// Record the mean relative error of the approximate gradient each iteration.
    pub track_rel_error: bool,
    pub audit_interval: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            i_max: 100_000,
            gradient_mode: GradientMode::Approximate,
            heuristic: HeuristicConfig::default(),
            start: StartPolicy::Random,
            trials: 1,
            seed: 0,
            trace: false,
            track_rel_error: false,
            audit_interval: AUDIT_INTERVAL,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.audit_interval == 0 {
            return Err(Error::InvalidConfig("audit_interval must be at least 1".into()));
        }
        self.heuristic.validate()
    }
}

/// One line of the search trace. Iteration 0 is the start solution.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub objective: f64,
    pub accepted_row: Option<usize>,
    pub z1: Option<usize>,
    pub z2: Option<usize>,
}

/// Wall time spent in each phase of the loop.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhaseTimes {
    pub gradient: Duration,
    pub neighbourhood_update: Duration,
    pub selection: Duration,
    pub other: Duration,
}

impl PhaseTimes {
    pub fn total(&self) -> Duration {
        self.gradient + self.neighbourhood_update + self.selection + self.other
    }

    /// Shares of the total in the order gradient, update, selection, other.
    pub fn fractions(&self) -> [f64; 4] {
        let total = self.total().as_secs_f64();
        if total == 0.0 {
            return [0.0; 4];
        }
        [
            self.gradient.as_secs_f64() / total,
            self.neighbourhood_update.as_secs_f64() / total,
            self.selection.as_secs_f64() / total,
            self.other.as_secs_f64() / total,
        ]
    }

    pub fn add(&mut self, other: &PhaseTimes) {
        self.gradient += other.gradient;
        self.neighbourhood_update += other.neighbourhood_update;
        self.selection += other.selection;
        self.other += other.other;
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SearchResult {
    pub seed: u64,
    pub f_best: f64,
    /// Facility-to-location permutation achieving `f_best`.
    pub x_best: Vec<usize>,
    pub best_iteration: usize,
    pub start_objective: f64,
    pub final_objective: f64,
    pub iterations: usize,
    /// Iterations that moved the solution.
    pub moves: usize,
    pub trace: Option<Vec<TraceRecord>>,
    pub rel_error: Option<Vec<f64>>,
    pub wall_time: Duration,
    pub timing: PhaseTimes,
}

/// `true` iff `x` is the column stack of a permutation matrix.
pub fn feasibility_audit(x: &BinarySolution) -> bool {
    x.audit()
}

fn start_offsets(instance: &Instance, q: &QOperator, start: &StartPolicy, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let n = instance.n();
    let native = match start {
        StartPolicy::Identity => (0..n).collect(),
        StartPolicy::Random => {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(rng);
            p
        }
        StartPolicy::Given(p) => {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: p.len(),
                });
            }
            check_permutation(p)?;
            p.clone()
        }
    };
    Ok(q.encode(&native))
}

/// Run one search with `config.seed`.
pub fn run_search(instance: &Instance, config: &SearchConfig) -> Result<SearchResult> {
    let q = build_q_operator(instance);
    run_search_with(instance, &q, config, config.seed)
}

/// Run one search with an explicit seed and a prebuilt operator.
pub fn run_search_with(instance: &Instance, q: &QOperator, config: &SearchConfig, seed: u64) -> Result<SearchResult> {
    config.validate()?;
    GradientEngine::check_mode(q, config.gradient_mode)?;
    let wall = Instant::now();
    let n = instance.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = start_offsets(instance, q, &config.start, &mut rng)?;
    let mut x = to_binary(&sigma)?;
    let mut nb = build_full_neighbourhood(&x)?;
    let mut engine = GradientEngine::new(n);
    let mut theta = Vec::with_capacity(nb.len());

    let mut f = q.quadratic_form_permutation(&sigma);
    let start_objective = f;
    let mut f_best = f;
    let mut best_sigma = sigma.clone();
    let mut best_iteration = 0;
    let mut moves = 0;

    let hcfg = &config.heuristic;
    let zobrist = Zobrist::new(n, seed);
    let mut hash = zobrist.hash(&sigma);
    let mut tabu = TabuState::new(hcfg.tabu_length, f_best);
    if hcfg.kind == HeuristicKind::Tabu {
        tabu.record(hash);
    }
    let schedule = if hcfg.kind == HeuristicKind::Sa {
        let t = match estimate_temperatures(instance, &mut rng, &hcfg.sa) {
            Ok(t) => t,
            Err(Error::DegenerateSamples) => Temperatures::FALLBACK,
            Err(e) => return Err(e),
        };
        Some(TemperatureSchedule::new(t, config.i_max))
    } else {
        None
    };

    let mut trace = config.trace.then(|| {
        let mut v = Vec::with_capacity(config.i_max + 1);
        v.push(TraceRecord {
            iteration: 0,
            objective: f,
            accepted_row: None,
            z1: None,
            z2: None,
        });
        v
    });
    let mut rel_error = config.track_rel_error.then(|| Vec::with_capacity(config.i_max));
    let mut timing = PhaseTimes::default();

    for k in 1..=config.i_max {
        let t0 = Instant::now();
        engine.evaluate(q, &x, &nb, config.gradient_mode, &mut theta);
        let t1 = Instant::now();
        timing.gradient += t1 - t0;
        if let Some(re) = rel_error.as_mut() {
            re.push(engine.relative_error(q, &x, &nb));
        }

        let t2 = Instant::now();
        let choice = match hcfg.kind {
            HeuristicKind::Greedy => Some(choose_greedy(&theta)?),
            HeuristicKind::Top10 => Some(choose_top10(&theta, hcfg.pool_size, &mut rng)?),
            HeuristicKind::WalkQap => Some(choose_walkqap(&theta, hcfg.pool_size, hcfg.p, &mut rng)?),
            HeuristicKind::Tabu => {
                let cur = x.support();
                let fp = |row: usize| {
                    let r = nb.row(row);
                    let (a, b) = (r.z1 / n, r.z2 / n);
                    zobrist.swapped(hash, a, cur[a] % n, b, cur[b] % n)
                };
                let after = |row: usize| f + engine.true_difference(q, &nb, row);
                match choose_tabu(&theta, &mut tabu, after, fp) {
                    Ok(i) => Some(i),
                    Err(Error::AllMovesTabu) => {
                        let i = choose_greedy(&theta)?;
                        tabu.record(fp(i));
                        Some(i)
                    }
                    Err(e) => return Err(e),
                }
            }
            HeuristicKind::Sa => {
                let temp = schedule.as_ref().map_or(1.0, |s| s.at(k - 1));
                choose_sa(&theta, &mut rng, temp)?
            }
        };
        let t3 = Instant::now();
        timing.selection += t3 - t2;

        let accepted = choice.map(|row| *nb.row(row));
        if let (Some(row), Some(t)) = (choice, accepted) {
            f += engine.true_difference(q, &nb, row);
            let (a, b) = (t.z1 / n, t.z2 / n);
            hash = zobrist.swapped(hash, a, t.z1 % n, b, t.z2 % n);
            x.apply(&t)?;
            moves += 1;
            if f < f_best {
                f_best = f;
                best_iteration = k;
                for (s, &z) in best_sigma.iter_mut().zip(x.support()) {
                    *s = z % n;
                }
                tabu.f_best = f_best;
            }
            let t4 = Instant::now();
            nb.update(t.z1, t.z2)?;
            timing.neighbourhood_update += t4.elapsed();
        }
        if let Some(tr) = trace.as_mut() {
            tr.push(TraceRecord {
                iteration: k,
                objective: f,
                accepted_row: choice,
                z1: accepted.map(|t| t.z1),
                z2: accepted.map(|t| t.z2),
            });
        }
        if k % config.audit_interval == 0 {
            audit(q, &x, &mut f)?;
        }
    }
    audit(q, &x, &mut f)?;

    let wall_time = wall.elapsed();
    let measured = timing.gradient + timing.selection + timing.neighbourhood_update;
    timing.other = wall_time.saturating_sub(measured);
    Ok(SearchResult {
        seed,
        f_best,
        x_best: q.decode(&best_sigma),
        best_iteration,
        start_objective,
        final_objective: f,
        iterations: config.i_max,
        moves,
        trace,
        rel_error,
        wall_time,
        timing,
    })
}

fn audit(q: &QOperator, x: &BinarySolution, f: &mut f64) -> Result<()> {
    if !feasibility_audit(x) {
        return Err(Error::InfeasibleSolution);
    }
    let exact = q.quadratic_form_permutation(&x.to_permutation());
    if (exact - *f).abs() > 1e-6 * exact.abs().max(1.0) {
        return Err(Error::ObjectiveDrift {
            incremental: *f,
            recomputed: exact,
        });
    }
    *f = exact;
    Ok(())
}

/// `(f - f_star) / f_star`; zero when they agree, `f` itself when `f_star` is 0.
pub fn relgap(f: f64, f_star: f64) -> f64 {
    if f == f_star {
        0.0
    } else if f_star == 0.0 {
        f
    } else {
        (f - f_star) / f_star.abs()
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GapReport {
    pub f_star: f64,
    pub relgaps: Vec<f64>,
    pub relgap_min: f64,
}

/// Independent trials with seeds `config.seed + t`, in trial order.
pub fn run_trials(instance: &Instance, config: &SearchConfig, f_star: Option<f64>) -> Result<(GapReport, Vec<SearchResult>)> {
    let f_star = f_star.ok_or_else(|| Error::MissingBestKnown(instance.name.clone()))?;
    let results = run_trials_raw(instance, config)?;
    let relgaps: Vec<f64> = results.iter().map(|r| relgap(r.f_best, f_star)).collect();
    let relgap_min = relgaps.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((
        GapReport {
            f_star,
            relgaps,
            relgap_min,
        },
        results,
    ))
}

/// Trials without gap bookkeeping.
pub fn run_trials_raw(instance: &Instance, config: &SearchConfig) -> Result<Vec<SearchResult>> {
    config.validate()?;
    let q = build_q_operator(instance);
    (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_search_with(instance, &q, config, config.seed.wrapping_add(t)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Matrix;

    fn small() -> Instance {
        let f = Matrix::from_rows(&[
            vec![0.0, 5.0, 2.0, 4.0],
            vec![5.0, 0.0, 3.0, 0.0],
            vec![2.0, 3.0, 0.0, 0.0],
            vec![4.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        let d = Matrix::from_rows(&[
            vec![0.0, 1.0, 1.0, 2.0],
            vec![1.0, 0.0, 2.0, 1.0],
            vec![1.0, 2.0, 0.0, 1.0],
            vec![2.0, 1.0, 1.0, 0.0],
        ])
        .unwrap();
        Instance::new("small", f, d).unwrap()
    }

    #[test]
    fn zero_iterations_returns_start() {
        let inst = small();
        let cfg = SearchConfig {
            i_max: 0,
            start: StartPolicy::Identity,
            ..Default::default()
        };
        let r = run_search(&inst, &cfg).unwrap();
        assert_eq!(r.f_best, r.start_objective);
        assert_eq!(r.x_best, vec![0, 1, 2, 3]);
    }

    #[test]
    fn relgap_edges() {
        assert_eq!(relgap(10.0, 10.0), 0.0);
        assert_eq!(relgap(11.0, 10.0), 0.1);
        assert_eq!(relgap(3.0, 0.0), 3.0);
    }

    #[test]
    fn missing_best_known() {
        let cfg = SearchConfig {
            i_max: 1,
            ..Default::default()
        };
        assert!(matches!(
            run_trials(&small(), &cfg, None),
            Err(Error::MissingBestKnown(_))
        ));
    }

    #[test]
    fn bad_start() {
        let cfg = SearchConfig {
            start: StartPolicy::Given(vec![0, 0, 1, 2]),
            ..Default::default()
        };
        assert!(matches!(run_search(&small(), &cfg), Err(Error::NotAPermutation { .. })));
    }
}
