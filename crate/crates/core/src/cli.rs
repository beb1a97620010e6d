//! The `fnqap` command-line tool.
//!
//! Every flag of a subcommand may also be given in a configuration file
//! passed with `--config FILE`: one `key = value` per line, keys spelled like
//! the long flags without dashes, `#` starting a comment. Flags on the
//! command line win over the file.
//!
//! Exit codes: 0 success, 1 solver error, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::bench::{self, BaselineParams, LoadedInstance};
use crate::error::{Error, Result};
use crate::fetch::fetch_instances;
use crate::gradient::GradientMode;
use crate::heuristics::{HeuristicConfig, HeuristicKind};
use crate::search::{SearchConfig, StartPolicy};

#[derive(Debug, Parser)]
#[command(name = "fnqap", version, about = "Feasible-space local search for QAPLIB instances")]
#[command(args_override_self = true)]
pub struct Cli {
    /// key = value file supplying defaults for the subcommand's flags
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run trials of one heuristic on one instance
    Solve(SolveArgs),
    /// Sweep heuristics and gradient modes over several instances
    Bench(BenchArgs),
    /// Compare native tabu with penalty-QUBO tabu and random sampling
    CompareBaseline(CompareArgs),
    /// Report the share of wall time spent in each phase of the loop
    Profile(ProfileArgs),
    /// Copy or download instance and solution files
    Fetch(FetchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeuristicArg {
    Greedy,
    Top10,
    Walkqap,
    Tabu,
    Sa,
}

impl From<HeuristicArg> for HeuristicKind {
    fn from(h: HeuristicArg) -> Self {
        match h {
            HeuristicArg::Greedy => HeuristicKind::Greedy,
            HeuristicArg::Top10 => HeuristicKind::Top10,
            HeuristicArg::Walkqap => HeuristicKind::WalkQap,
            HeuristicArg::Tabu => HeuristicKind::Tabu,
            HeuristicArg::Sa => HeuristicKind::Sa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GradientArg {
    Approx,
    Exact,
    ExactGeneral,
}

impl From<GradientArg> for GradientMode {
    fn from(g: GradientArg) -> Self {
        match g {
            GradientArg::Approx => GradientMode::Approximate,
            GradientArg::Exact => GradientMode::Exact,
            GradientArg::ExactGeneral => GradientMode::ExactGeneral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StartArg {
    Identity,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, value_enum, default_value = "top10")]
    pub heuristic: HeuristicArg,
    #[arg(long, value_enum, default_value = "approx")]
    pub gradient: GradientArg,
    #[arg(long, default_value_t = 100_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "random")]
    pub start: StartArg,
    /// Probability of a Top10 move in walkqap
    #[arg(long, default_value_t = 0.95)]
    pub p: f64,
    #[arg(long, default_value_t = 10)]
    pub pool_size: usize,
    #[arg(long, default_value_t = 20)]
    pub tabu_length: usize,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            i_max: self.iters,
            gradient_mode: self.gradient.into(),
            heuristic: HeuristicConfig {
                p: self.p,
                pool_size: self.pool_size,
                tabu_length: self.tabu_length,
                ..HeuristicConfig::new(self.heuristic.into())
            },
            start: match self.start {
                StartArg::Identity => StartPolicy::Identity,
                StartArg::Random => StartPolicy::Random,
            },
            trials: self.trials,
            seed: self.seed,
            ..SearchConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Instance name or path to a .dat file
    pub instance: String,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Penalty scale; only reported, the feasible-space search needs no penalty
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Best-known objective, overriding the .sln file
    #[arg(long)]
    pub best_known: Option<f64>,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Write the per-iteration trace of every trial
    #[arg(long)]
    pub trace: bool,
    #[arg(long, default_value = "trace.csv")]
    pub trace_out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Instance names or .dat paths
    pub instances: Vec<String>,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["greedy", "top10", "walkqap", "tabu", "sa"])]
    pub heuristics: Vec<HeuristicArg>,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["approx", "exact"])]
    pub gradients: Vec<GradientArg>,
    #[arg(long, default_value_t = 100_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "random")]
    pub start: StartArg,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Per-trial records (CSV); standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-cell summary (JSON); standard error when absent
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    pub instance: String,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 20)]
    pub tenure: usize,
    #[arg(long)]
    pub best_known: Option<f64>,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    pub instance: String,
    #[arg(long, value_enum, default_value = "top10")]
    pub heuristic: HeuristicArg,
    #[arg(long, value_enum, default_value = "approx")]
    pub gradient: GradientArg,
    #[arg(long, default_value_t = 10_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Args)]
pub struct FetchArgs {
    pub names: Vec<String>,
    #[arg(long, default_value = "qaplib")]
    pub dest: PathBuf,
    /// Mirror URL or directory; defaults to $QAPLIB_MIRROR
    #[arg(long)]
    pub mirror: Option<String>,
}

/// Turn `key = value` lines into long flags.
pub fn config_to_args(text: &str) -> std::result::Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

fn find_config(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(rest));
        }
    }
    None
}

/// Splice configuration-file flags in right after the subcommand name so that
/// flags given later on the command line override them.
fn splice_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let Some(path) = find_config(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let pairs = config_to_args(&text)?;
    let cmd = Cli::command();
    let Some((pos, sub)) = args
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(i, a)| cmd.find_subcommand(a.to_string_lossy().as_ref()).map(|s| (i, s)))
    else {
        return Ok(args);
    };
    let mut injected = Vec::new();
    for (key, value) in pairs {
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            let known_elsewhere = cmd
                .get_subcommands()
                .any(|s| s.get_arguments().any(|a| a.get_long() == Some(key.as_str())));
            if known_elsewhere {
                continue;
            }
            return Err(format!("{}: unknown key {key:?}", path.display()));
        };
        if matches!(arg.get_action(), clap::ArgAction::SetTrue) {
            match value.as_str() {
                "true" | "yes" | "1" => injected.push(OsString::from(format!("--{key}"))),
                "false" | "no" | "0" => {}
                _ => return Err(format!("{}: {key} expects true or false", path.display())),
            }
        } else {
            injected.push(OsString::from(format!("--{key}={value}")));
        }
    }
    let mut out = args;
    out.splice(pos + 1..pos + 1, injected);
    Ok(out)
}

/// Parse arguments (with configuration splicing), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match splice_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::command()
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidConfig(_) | Error::NotFound(_) => 2,
                _ => 1,
            }
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).map_err(|e| Error::io(p, e))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn load(name: &str, data_dir: Option<&Path>, best_known: Option<f64>) -> Result<LoadedInstance> {
    let mut loaded = bench::load_instance(name, data_dir)?;
    if best_known.is_some() {
        loaded.best_known = best_known;
    }
    Ok(loaded)
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Solve(a) => cmd_solve(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::CompareBaseline(a) => cmd_compare(&a),
        Command::Profile(a) => cmd_profile(&a),
        Command::Fetch(a) => cmd_fetch(&a),
    }
}

#[derive(serde::Serialize)]
struct SolveSummary<'a> {
    instance: &'a str,
    n: usize,
    heuristic: &'a str,
    gradient_mode: &'a str,
    alpha: f64,
    trials: usize,
    best_objective: Option<f64>,
    best_permutation: Option<Vec<usize>>,
    best_known: Option<f64>,
    relgap_min: Option<f64>,
    records: &'a [bench::RunRecord],
}

#[derive(serde::Serialize)]
struct TraceRow {
    trial: usize,
    iteration: usize,
    objective: f64,
    accepted_row: Option<usize>,
    z1: Option<usize>,
    z2: Option<usize>,
}

fn cmd_solve(a: &SolveArgs) -> Result<()> {
    let loaded = load(&a.instance, a.data_dir.as_deref(), a.best_known)?;
    let mut cfg = a.search.config();
    cfg.trace = a.trace;
    let (records, results) = bench::solve(&loaded, &cfg)?;
    if a.trace {
        let rows: Vec<TraceRow> = results
            .iter()
            .enumerate()
            .flat_map(|(trial, r)| {
                r.trace.iter().flatten().map(move |t| TraceRow {
                    trial,
                    iteration: t.iteration,
                    objective: t.objective,
                    accepted_row: t.accepted_row,
                    z1: t.z1,
                    z2: t.z2,
                })
            })
            .collect();
        let f = File::create(&a.trace_out).map_err(|e| Error::io(&a.trace_out, e))?;
        bench::write_rows_csv(f, &rows)?;
    }
    let out = output(a.out.as_deref())?;
    match a.format {
        FormatArg::Csv => bench::write_records_csv(out, &records),
        FormatArg::Json => {
            let best = results.iter().min_by(|x, y| x.f_best.total_cmp(&y.f_best));
            let summary = SolveSummary {
                instance: &loaded.instance.name,
                n: loaded.instance.n(),
                heuristic: cfg.heuristic.kind.name(),
                gradient_mode: cfg.gradient_mode.name(),
                alpha: a.alpha,
                trials: cfg.trials,
                best_objective: best.map(|r| r.f_best),
                best_permutation: best.map(|r| r.x_best.clone()),
                best_known: loaded.best_known,
                relgap_min: records.iter().filter_map(|r| r.relgap).reduce(f64::min),
                records: &records,
            };
            serde_json::to_writer_pretty(out, &summary)?;
            Ok(())
        }
    }
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let mut loaded = Vec::new();
    for name in &a.instances {
        loaded.push(load(name, a.data_dir.as_deref(), None)?);
    }
    let base = SearchConfig {
        i_max: a.iters,
        trials: a.trials,
        seed: a.seed,
        start: match a.start {
            StartArg::Identity => StartPolicy::Identity,
            StartArg::Random => StartPolicy::Random,
        },
        ..SearchConfig::default()
    };
    let kinds: Vec<HeuristicKind> = a.heuristics.iter().map(|&h| h.into()).collect();
    let modes: Vec<GradientMode> = a.gradients.iter().map(|&g| g.into()).collect();
    let (records, summary) = bench::bench(&loaded, &kinds, &modes, &base);
    bench::write_records_csv(output(a.out.as_deref())?, &records)?;
    match &a.summary {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::io(p, e))?;
            serde_json::to_writer_pretty(f, &summary)?;
        }
        None => {
            let mut err = io::stderr().lock();
            for c in &summary {
                let gap = c.relgap_min.map_or("-".to_string(), |g| format!("{:.4}%", 100.0 * g));
                let _ = writeln!(err, "{:<10} {:<8} {:<13} relgap_min {gap}", c.instance, c.heuristic, c.gradient_mode);
            }
        }
    }
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> Result<()> {
    let loaded = load(&a.instance, a.data_dir.as_deref(), a.best_known)?;
    let report = bench::compare_baseline(
        &loaded,
        &BaselineParams {
            iters: a.iters,
            seed: a.seed,
            alpha: a.alpha,
            tenure: a.tenure,
        },
    )?;
    let out = output(a.out.as_deref())?;
    match a.format {
        FormatArg::Csv => {
            bench::write_rows_csv(out, &report.rows)?;
            let mut err = io::stderr().lock();
            for s in &report.summary {
                let gap = s.relgap.map_or("-".to_string(), |g| format!("{:.4}%", 100.0 * g));
                let _ = writeln!(err, "{:<16} feasible {:>6}/{:<6} gap {gap}", s.solver, s.feasible_visits, s.iterations);
            }
            Ok(())
        }
        FormatArg::Json => Ok(serde_json::to_writer_pretty(out, &report)?),
    }
}

fn cmd_profile(a: &ProfileArgs) -> Result<()> {
    let loaded = load(&a.instance, a.data_dir.as_deref(), None)?;
    let cfg = SearchConfig {
        i_max: a.iters,
        gradient_mode: a.gradient.into(),
        heuristic: HeuristicConfig::new(a.heuristic.into()),
        seed: a.seed,
        ..SearchConfig::default()
    };
    let report = bench::profile(&loaded.instance, &cfg)?;
    let out = io::stdout().lock();
    match a.format {
        FormatArg::Csv => bench::write_rows_csv(out, std::slice::from_ref(&report)),
        FormatArg::Json => Ok(serde_json::to_writer_pretty(out, &report)?),
    }
}

fn cmd_fetch(a: &FetchArgs) -> Result<()> {
    let manifest = fetch_instances(&a.names, &a.dest, a.mirror.as_deref())?;
    serde_json::to_writer_pretty(io::stdout().lock(), &manifest)?;
    println!();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let pairs = config_to_args("# c\niters = 10\n\npool_size=3 # tail\n").unwrap();
        assert_eq!(
            pairs,
            vec![("iters".into(), "10".into()), ("pool-size".into(), "3".into())]
        );
        assert!(config_to_args("novalue\n").is_err());
    }

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
