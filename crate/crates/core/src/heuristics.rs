//! Move-selection policies over a gradient vector.
//!
//! All policies consume row values in gradient units, i.e. half of the true
//! objective change. Temperatures for annealing are calibrated in the same
//! units.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::feasible::objective;
use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum HeuristicKind {
    Greedy,
    Top10,
    WalkQap,
    Tabu,
    Sa,
}

impl HeuristicKind {
    pub const ALL: [HeuristicKind; 5] = [
        HeuristicKind::Greedy,
        HeuristicKind::Top10,
        HeuristicKind::WalkQap,
        HeuristicKind::Tabu,
        HeuristicKind::Sa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HeuristicKind::Greedy => "greedy",
            HeuristicKind::Top10 => "top10",
            HeuristicKind::WalkQap => "walkqap",
            HeuristicKind::Tabu => "tabu",
            HeuristicKind::Sa => "sa",
        }
    }
}

impl std::fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for HeuristicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HeuristicKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown heuristic {s:?}")))
    }
}

/// Annealing calibration parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SaParams {
    /// Acceptance probability of a median move at the start.
    pub p_initial: f64,
    /// Acceptance probability of a small move at the end.
    pub p_final: f64,
    /// Percentile defining the median move.
    pub gamma_initial: f64,
    /// Percentile defining the small move.
    pub gamma_final: f64,
    pub sample_configs: usize,
    pub sample_neighbours: usize,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            p_initial: 0.8,
            p_final: 0.1,
            gamma_initial: 50.0,
            gamma_final: 5.0,
            sample_configs: 10,
            sample_neighbours: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HeuristicConfig {
    pub kind: HeuristicKind,
    /// Probability of a Top10 move in WalkQAP.
    pub p: f64,
    pub pool_size: usize,
    pub tabu_length: usize,
    pub sa: SaParams,
}

impl HeuristicConfig {
    pub fn new(kind: HeuristicKind) -> Self {
        HeuristicConfig {
            kind,
            p: 0.95,
            pool_size: 10,
            tabu_length: 20,
            sa: SaParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.p > 0.0 && self.p < 1.0) {
            return bad(format!("p must lie in (0, 1), got {}", self.p));
        }
        if self.pool_size == 0 {
            return bad("pool_size must be at least 1".into());
        }
        if self.tabu_length == 0 {
            return bad("tabu_length must be at least 1".into());
        }
        let sa = &self.sa;
        for (name, v) in [("p_initial", sa.p_initial), ("p_final", sa.p_final)] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        for (name, v) in [("gamma_initial", sa.gamma_initial), ("gamma_final", sa.gamma_final)] {
            if !(0.0..=100.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 100], got {v}"));
            }
        }
        if sa.sample_configs == 0 || sa.sample_neighbours == 0 {
            return bad("annealing sample sizes must be positive".into());
        }
        Ok(())
    }
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig::new(HeuristicKind::Top10)
    }
}

/// Index of the smallest value, lowest index on ties.
pub fn choose_greedy(theta: &[f64]) -> Result<usize> {
    if theta.is_empty() {
        return Err(Error::EmptyNeighbourhood);
    }
    let mut best = 0;
    for (i, &v) in theta.iter().enumerate().skip(1) {
        if v < theta[best] {
            best = i;
        }
    }
    Ok(best)
}

/// The `k` smallest rows ordered by `(value, index)`.
pub fn smallest_rows(theta: &[f64], k: usize) -> Vec<usize> {
    let cmp = |a: &usize, b: &usize| theta[*a].total_cmp(&theta[*b]).then(a.cmp(b));
    let mut idx: Vec<usize> = (0..theta.len()).collect();
    let k = k.min(idx.len());
    if k == 0 {
        return Vec::new();
    }
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, cmp);
        idx.truncate(k);
    }
    idx.sort_unstable_by(cmp);
    idx
}

/// Uniform choice among the `pool_size` smallest rows.
pub fn choose_top10(theta: &[f64], pool_size: usize, rng: &mut impl Rng) -> Result<usize> {
    if theta.is_empty() {
        return Err(Error::EmptyNeighbourhood);
    }
    let pool = smallest_rows(theta, pool_size.max(1));
    Ok(pool[rng.random_range(0..pool.len())])
}

/// Top10 with probability `p`, otherwise a uniformly random row.
pub fn choose_walkqap(theta: &[f64], pool_size: usize, p: f64, rng: &mut impl Rng) -> Result<usize> {
    if theta.is_empty() {
        return Err(Error::EmptyNeighbourhood);
    }
    if rng.random::<f64>() < p {
        choose_top10(theta, pool_size, rng)
    } else {
        Ok(rng.random_range(0..theta.len()))
    }
}

/// Zobrist hashing of permutations, updated in constant time per swap.
#[derive(Debug, Clone)]
pub struct Zobrist {
    n: usize,
    keys: Vec<u64>,
}

impl Zobrist {
    pub fn new(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_7ab0);
        Zobrist {
            n,
            keys: (0..n * n).map(|_| rng.random()).collect(),
        }
    }

    pub fn hash(&self, perm: &[usize]) -> u64 {
        perm.iter()
            .enumerate()
            .fold(0, |h, (i, &p)| h ^ self.keys[i * self.n + p])
    }

    /// Hash after exchanging the values at positions `a` and `b`.
    #[inline]
    pub fn swapped(&self, h: u64, a: usize, pa: usize, b: usize, pb: usize) -> u64 {
        let k = |i: usize, p: usize| self.keys[i * self.n + p];
        h ^ k(a, pa) ^ k(b, pb) ^ k(a, pb) ^ k(b, pa)
    }
}

/// FIFO of recently visited solution fingerprints.
#[derive(Debug, Clone)]
pub struct TabuState {
    capacity: usize,
    list: VecDeque<u64>,
    members: HashSet<u64>,
    pub f_best: f64,
}

impl TabuState {
    pub fn new(capacity: usize, f_best: f64) -> Self {
        TabuState {
            capacity: capacity.max(1),
            list: VecDeque::with_capacity(capacity + 1),
            members: HashSet::new(),
            f_best,
        }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn contains(&self, fingerprint: u64) -> bool {
        self.members.contains(&fingerprint)
    }

    pub fn entries(&self) -> impl Iterator<Item = &u64> {
        self.list.iter()
    }

    /// Append, evicting the oldest entry when full.
    pub fn record(&mut self, fingerprint: u64) {
        self.list.push_back(fingerprint);
        self.members.insert(fingerprint);
        if self.list.len() > self.capacity {
            if let Some(old) = self.list.pop_front() {
                if !self.list.contains(&old) {
                    self.members.remove(&old);
                }
            }
        }
    }
}

/// Tabu selection.
///
/// Rows are scanned by ascending value. The best row is taken when the true
/// objective after its move (given by `objective_after(row)`) beats
/// `state.f_best`; otherwise the best row whose resulting fingerprint (given
/// by `fingerprint(row)`) is not tabu. Aspiration must not trust `theta`:
/// under the approximate gradient a move can look improving forever while it
/// is not, and the search would then cycle. The chosen
/// fingerprint is recorded. When every row is tabu, returns
/// [`Error::AllMovesTabu`] and records nothing.
pub fn choose_tabu(
    theta: &[f64],
    state: &mut TabuState,
    objective_after: impl Fn(usize) -> f64,
    fingerprint: impl Fn(usize) -> u64,
) -> Result<usize> {
    let best = choose_greedy(theta)?;
    let pick = if objective_after(best) < state.f_best || !state.contains(fingerprint(best)) {
        Some(best)
    } else {
        let mut order: Vec<usize> = (0..theta.len()).collect();
        order.sort_unstable_by(|a, b| theta[*a].total_cmp(&theta[*b]).then(a.cmp(b)));
        order.into_iter().find(|&i| !state.contains(fingerprint(i)))
    };
    match pick {
        Some(i) => {
            state.record(fingerprint(i));
            Ok(i)
        }
        None => Err(Error::AllMovesTabu),
    }
}

/// Start and end temperatures of the annealing schedule.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Temperatures {
    pub t_high: f64,
    pub t_low: f64,
}

impl Temperatures {
    /// Used when sampling finds no nonzero move.
    pub const FALLBACK: Temperatures = Temperatures {
        t_high: 1.0,
        t_low: 0.01,
    };

    /// `T` such that a move of size `delta` is accepted with probability `p`.
    pub fn for_acceptance(delta: f64, p: f64) -> f64 {
        -delta / p.ln()
    }
}

/// Percentile with linear interpolation between closest ranks.
pub fn percentile(sorted: &[f64], pct: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = (pct / 100.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Sample random swaps at random permutations and calibrate the schedule on
/// the nonzero move sizes (in gradient units, half the objective change).
pub fn estimate_temperatures(instance: &Instance, rng: &mut impl Rng, sa: &SaParams) -> Result<Temperatures> {
    let n = instance.n();
    let mut samples = Vec::with_capacity(sa.sample_configs * sa.sample_neighbours);
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..sa.sample_configs {
        perm.shuffle(rng);
        let f0 = objective(instance, &perm)?;
        for _ in 0..sa.sample_neighbours {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let mut y = perm.clone();
            y.swap(a, b);
            let diff = (objective(instance, &y)? - f0).abs() / 2.0;
            if diff > 0.0 {
                samples.push(diff);
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::DegenerateSamples);
    }
    samples.sort_by(f64::total_cmp);
    let d_high = percentile(&samples, sa.gamma_initial);
    let d_low = percentile(&samples, sa.gamma_final);
    Ok(Temperatures {
        t_high: Temperatures::for_acceptance(d_high, sa.p_initial),
        t_low: Temperatures::for_acceptance(d_low, sa.p_final),
    })
}

/// Geometric cooling from `t_high` to `t_low` over `i_max` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureSchedule {
    pub t_high: f64,
    pub t_low: f64,
    pub i_max: usize,
}

impl TemperatureSchedule {
    pub fn new(t: Temperatures, i_max: usize) -> Self {
        TemperatureSchedule {
            t_high: t.t_high,
            t_low: t.t_low,
            i_max,
        }
    }

    pub fn at(&self, k: usize) -> f64 {
        if self.i_max <= 1 || k == 0 {
            return self.t_high;
        }
        if k >= self.i_max - 1 {
            return self.t_low;
        }
        let frac = k as f64 / (self.i_max - 1) as f64;
        self.t_high * (self.t_low / self.t_high).powf(frac)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.i_max).map(|k| self.at(k)).collect()
    }
}

/// Propose a uniform row and accept it with probability `min(1, exp(-theta/T))`.
pub fn choose_sa(theta: &[f64], rng: &mut impl Rng, temperature: f64) -> Result<Option<usize>> {
    if theta.is_empty() {
        return Err(Error::EmptyNeighbourhood);
    }
    let i = rng.random_range(0..theta.len());
    let v = theta[i];
    if v <= 0.0 {
        return Ok(Some(i));
    }
    let p = if temperature > 0.0 { (-v / temperature).exp() } else { 0.0 };
    Ok((rng.random::<f64>() < p).then_some(i))
}
