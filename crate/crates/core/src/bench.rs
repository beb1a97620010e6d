//! Benchmark plumbing shared by the command-line tool and the examples:
//! result records, sweeps, phase profiles and the baseline comparison.

use std::io::{Read, Write};
use std::path::Path;

use crate::baseline::{run_qubo_tabu_single_flip, run_random_feasible};
use crate::error::{Error, Result};
use crate::fetch::{resolve_instance_path, solution_path_for};
use crate::gradient::GradientMode;
use crate::heuristics::{HeuristicConfig, HeuristicKind};
use crate::instance::{Instance, ReferenceSolution, Symmetry};
use crate::qubo::build_penalty_qubo;
use crate::search::{relgap, run_search, run_trials_raw, SearchConfig, SearchResult, StartPolicy};

/// An instance together with its best-known value, when one is available.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub instance: Instance,
    pub best_known: Option<f64>,
    pub reference: Option<ReferenceSolution>,
}

/// Load by path or by name (looked up in `data_dir`, then the bundled data).
/// The `.sln` next to the `.dat` supplies the best-known value.
pub fn load_instance(arg: &str, data_dir: Option<&Path>) -> Result<LoadedInstance> {
    let path = resolve_instance_path(arg, data_dir)?;
    let instance = Instance::from_file(&path)?;
    let reference = match solution_path_for(&path) {
        Some(p) => Some(ReferenceSolution::from_file(p)?),
        None => None,
    };
    if let Some(r) = &reference {
        if r.n != instance.n() {
            return Err(Error::DimensionMismatch {
                expected: instance.n(),
                actual: r.n,
            });
        }
    }
    Ok(LoadedInstance {
        best_known: reference.as_ref().map(|r| r.objective),
        instance,
        reference,
    })
}

/// One trial of one configuration.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub n: usize,
    pub heuristic: String,
    pub gradient_mode: String,
    pub trial: usize,
    pub seed: u64,
    pub iterations: usize,
    pub best_objective: Option<f64>,
    pub best_known: Option<f64>,
    pub relgap: Option<f64>,
    pub wall_time_ms: f64,
    pub gradient_ms: f64,
    pub neighbourhood_update_ms: f64,
    pub selection_ms: f64,
    pub other_ms: f64,
    pub error: Option<String>,
}

fn ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub fn record_from_result(
    instance: &Instance,
    config: &SearchConfig,
    trial: usize,
    r: &SearchResult,
    best_known: Option<f64>,
) -> RunRecord {
    RunRecord {
        instance: instance.name.clone(),
        n: instance.n(),
        heuristic: config.heuristic.kind.name().into(),
        gradient_mode: config.gradient_mode.name().into(),
        trial,
        seed: r.seed,
        iterations: r.iterations,
        best_objective: Some(r.f_best),
        best_known,
        relgap: best_known.map(|f| relgap(r.f_best, f)),
        wall_time_ms: ms(r.wall_time),
        gradient_ms: ms(r.timing.gradient),
        neighbourhood_update_ms: ms(r.timing.neighbourhood_update),
        selection_ms: ms(r.timing.selection),
        other_ms: ms(r.timing.other),
        error: None,
    }
}

fn failed_record(instance: &Instance, config: &SearchConfig, err: &Error) -> RunRecord {
    RunRecord {
        instance: instance.name.clone(),
        n: instance.n(),
        heuristic: config.heuristic.kind.name().into(),
        gradient_mode: config.gradient_mode.name().into(),
        trial: 0,
        seed: config.seed,
        iterations: config.i_max,
        best_objective: None,
        best_known: None,
        relgap: None,
        wall_time_ms: 0.0,
        gradient_ms: 0.0,
        neighbourhood_update_ms: 0.0,
        selection_ms: 0.0,
        other_ms: 0.0,
        error: Some(err.to_string()),
    }
}

/// Run `config.trials` trials and turn them into records.
pub fn solve(loaded: &LoadedInstance, config: &SearchConfig) -> Result<(Vec<RunRecord>, Vec<SearchResult>)> {
    let results = run_trials_raw(&loaded.instance, config)?;
    let records = results
        .iter()
        .enumerate()
        .map(|(t, r)| record_from_result(&loaded.instance, config, t, r, loaded.best_known))
        .collect();
    Ok((records, results))
}

pub fn write_records_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    write_rows_csv(out, records)
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Minimum and mean gap of one (instance, heuristic, mode) cell.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CellSummary {
    pub instance: String,
    pub heuristic: String,
    pub gradient_mode: String,
    pub trials: usize,
    pub best_objective: Option<f64>,
    pub relgap_min: Option<f64>,
    pub relgap_mean: Option<f64>,
    pub error: Option<String>,
}

pub fn summarize(records: &[RunRecord]) -> Vec<CellSummary> {
    let mut cells: Vec<CellSummary> = Vec::new();
    for r in records {
        let pos = cells.iter().position(|c| {
            c.instance == r.instance && c.heuristic == r.heuristic && c.gradient_mode == r.gradient_mode
        });
        let cell = match pos {
            Some(i) => &mut cells[i],
            None => {
                cells.push(CellSummary {
                    instance: r.instance.clone(),
                    heuristic: r.heuristic.clone(),
                    gradient_mode: r.gradient_mode.clone(),
                    trials: 0,
                    best_objective: None,
                    relgap_min: None,
                    relgap_mean: None,
                    error: None,
                });
                cells.last_mut().expect("just pushed")
            }
        };
        if let Some(e) = &r.error {
            cell.error = Some(e.clone());
            continue;
        }
        cell.trials += 1;
        if let Some(b) = r.best_objective {
            cell.best_objective = Some(cell.best_objective.map_or(b, |c| c.min(b)));
        }
        if let Some(g) = r.relgap {
            cell.relgap_min = Some(cell.relgap_min.map_or(g, |c| c.min(g)));
            let prev = cell.relgap_mean.unwrap_or(0.0) * (cell.trials - 1) as f64;
            cell.relgap_mean = Some((prev + g) / cell.trials as f64);
        }
    }
    cells
}

/// Gradient mode to use for `requested` on this instance: exact requests
/// fall back to the general corrector on asymmetric data.
pub fn effective_mode(instance: &Instance, requested: GradientMode) -> GradientMode {
    if requested == GradientMode::Exact && instance.symmetry() == Symmetry::Asymmetric {
        GradientMode::ExactGeneral
    } else {
        requested
    }
}

/// Full sweep over instances, heuristics and gradient modes. A failing cell
/// yields a record with its error and the sweep continues.
pub fn bench(
    instances: &[LoadedInstance],
    heuristics: &[HeuristicKind],
    modes: &[GradientMode],
    base: &SearchConfig,
) -> (Vec<RunRecord>, Vec<CellSummary>) {
    let mut records = Vec::new();
    for loaded in instances {
        for &kind in heuristics {
            for &mode in modes {
                let cfg = SearchConfig {
                    heuristic: HeuristicConfig {
                        kind,
                        ..base.heuristic.clone()
                    },
                    gradient_mode: mode,
                    ..base.clone()
                };
                match solve(loaded, &cfg) {
                    Ok((recs, _)) => records.extend(recs),
                    Err(e) => {
                        log::error!("{} {kind} {mode}: {e}", loaded.instance.name);
                        records.push(failed_record(&loaded.instance, &cfg, &e));
                    }
                }
            }
        }
    }
    let summary = summarize(&records);
    (records, summary)
}

/// Share of wall time per phase of the search loop.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProfileReport {
    pub instance: String,
    pub n: usize,
    pub heuristic: String,
    pub gradient_mode: String,
    pub iterations: usize,
    pub wall_time_ms: f64,
    pub gradient: f64,
    pub neighbourhood_update: f64,
    pub selection: f64,
    pub other: f64,
}

pub fn profile(instance: &Instance, config: &SearchConfig) -> Result<ProfileReport> {
    let cfg = SearchConfig {
        trace: false,
        track_rel_error: false,
        ..config.clone()
    };
    let r = run_search(instance, &cfg)?;
    let [gradient, neighbourhood_update, selection, other] = r.timing.fractions();
    Ok(ProfileReport {
        instance: instance.name.clone(),
        n: instance.n(),
        heuristic: cfg.heuristic.kind.name().into(),
        gradient_mode: cfg.gradient_mode.name().into(),
        iterations: cfg.i_max,
        wall_time_ms: ms(r.wall_time),
        gradient,
        neighbourhood_update,
        selection,
        other,
    })
}

pub const NATIVE_TABU: &str = "native-tabu";
pub const QUBO_TABU: &str = "qubo-tabu";
pub const RANDOM_FEASIBLE: &str = "random-feasible";

/// Best feasible objective seen by one solver up to one iteration.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ComparisonRow {
    pub solver: String,
    pub iteration: usize,
    pub best_objective: Option<f64>,
    pub relgap: Option<f64>,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverSummary {
    pub solver: String,
    pub iterations: usize,
    pub feasible_visits: usize,
    pub best_objective: Option<f64>,
    pub relgap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BaselineReport {
    pub instance: String,
    pub best_known: f64,
    pub rows: Vec<ComparisonRow>,
    pub summary: Vec<SolverSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineParams {
    pub iters: usize,
    pub seed: u64,
    pub alpha: f64,
    pub tenure: usize,
}

impl Default for BaselineParams {
    fn default() -> Self {
        BaselineParams {
            iters: 1000,
            seed: 0,
            alpha: 1.0,
            tenure: 20,
        }
    }
}

/// Native full-neighbourhood tabu, single-flip penalty-QUBO tabu and random
/// feasible sampling at the same iteration budget. Rows cover iterations
/// `1..=iters` for each solver.
pub fn compare_baseline(loaded: &LoadedInstance, params: &BaselineParams) -> Result<BaselineReport> {
    let inst = &loaded.instance;
    let f_star = loaded
        .best_known
        .ok_or_else(|| Error::MissingBestKnown(inst.name.clone()))?;
    let gap = |v: Option<f64>| v.map(|f| relgap(f, f_star));
    let mut rows = Vec::new();
    let mut summary = Vec::new();

    let cfg = SearchConfig {
        i_max: params.iters,
        gradient_mode: effective_mode(inst, GradientMode::Exact),
        heuristic: HeuristicConfig {
            tabu_length: params.tenure,
            ..HeuristicConfig::new(HeuristicKind::Tabu)
        },
        start: StartPolicy::Random,
        trials: 1,
        seed: params.seed,
        trace: true,
        ..SearchConfig::default()
    };
    let native = run_search(inst, &cfg)?;
    let trace = native.trace.unwrap_or_default();
    let mut best = trace.first().map(|t| t.objective);
    for t in trace.iter().skip(1) {
        best = best.map(|b| b.min(t.objective));
        rows.push(ComparisonRow {
            solver: NATIVE_TABU.into(),
            iteration: t.iteration,
            best_objective: best,
            relgap: gap(best),
            feasible: true,
        });
    }
    summary.push(SolverSummary {
        solver: NATIVE_TABU.into(),
        iterations: params.iters,
        feasible_visits: params.iters,
        best_objective: (params.iters > 0).then_some(native.f_best),
        relgap: (params.iters > 0).then(|| relgap(native.f_best, f_star)),
    });

    let pq = build_penalty_qubo(inst, params.alpha)?;
    let qt = run_qubo_tabu_single_flip(&pq, params.iters, params.seed, params.tenure);
    let curve = qt.best_feasible_curve();
    for (i, (rec, b)) in qt.records.iter().zip(&curve).enumerate().skip(1) {
        rows.push(ComparisonRow {
            solver: QUBO_TABU.into(),
            iteration: i,
            best_objective: *b,
            relgap: gap(*b),
            feasible: rec.is_feasible,
        });
    }
    let last = if params.iters > 0 { curve.last().copied().flatten() } else { None };
    summary.push(SolverSummary {
        solver: QUBO_TABU.into(),
        iterations: params.iters,
        feasible_visits: qt.records.iter().skip(1).filter(|r| r.is_feasible).count(),
        best_objective: last,
        relgap: gap(last),
    });

    let rt = run_random_feasible(inst, params.iters, params.seed);
    let curve = rt.best_feasible_curve();
    for (i, b) in curve.iter().enumerate() {
        rows.push(ComparisonRow {
            solver: RANDOM_FEASIBLE.into(),
            iteration: i + 1,
            best_objective: *b,
            relgap: gap(*b),
            feasible: true,
        });
    }
    let last = curve.last().copied().flatten();
    summary.push(SolverSummary {
        solver: RANDOM_FEASIBLE.into(),
        iterations: params.iters,
        feasible_visits: rt.feasible_count,
        best_objective: last,
        relgap: gap(last),
    });

    Ok(BaselineReport {
        instance: inst.name.clone(),
        best_known: f_star,
        rows,
        summary,
    })
}

pub fn write_rows_csv<W: Write, T: serde::Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
