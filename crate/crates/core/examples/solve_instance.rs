//! Run independent trials of one heuristic on a bundled instance.
//!
//!     cargo run --release --example solve_instance -- had12 tabu 20000 4

use fnqap::bench::load_instance;
use fnqap::gradient::GradientMode;
use fnqap::heuristics::{HeuristicConfig, HeuristicKind};
use fnqap::search::{run_trials, SearchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "had12".into());
    let kind: HeuristicKind = args.next().as_deref().unwrap_or("top10").parse()?;
    let iters: usize = args.next().as_deref().unwrap_or("20000").parse()?;
    let trials: usize = args.next().as_deref().unwrap_or("4").parse()?;

    let loaded = load_instance(&name, None)?;
    let cfg = SearchConfig {
        i_max: iters,
        gradient_mode: GradientMode::Approximate,
        heuristic: HeuristicConfig::new(kind),
        trials,
        ..SearchConfig::default()
    };
    let (gaps, results) = run_trials(&loaded.instance, &cfg, loaded.best_known)?;
    for (r, g) in results.iter().zip(&gaps.relgaps) {
        println!(
            "seed {:>3}  best {:>10}  at iteration {:>6}  gap {:.4}%  {:.2?}",
            r.seed,
            r.f_best,
            r.best_iteration,
            100.0 * g,
            r.wall_time
        );
    }
    println!("{name} {kind}: relgap_min {:.4}% (best known {})", 100.0 * gaps.relgap_min, gaps.f_star);
    Ok(())
}
