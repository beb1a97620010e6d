//! Greedy descent on chr12a from the identity. With exact row values it
//! settles into a two-state cycle; with approximate ones it cycles at once,
//! and uphill.

use fnqap::bench::load_instance;
use fnqap::gradient::GradientMode;
use fnqap::heuristics::{HeuristicConfig, HeuristicKind};
use fnqap::search::{run_search, SearchConfig, StartPolicy};

fn main() -> fnqap::Result<()> {
    let inst = load_instance("chr12a", None)?.instance;
    for mode in [GradientMode::Exact, GradientMode::Approximate] {
        let cfg = SearchConfig {
            i_max: 12,
            gradient_mode: mode,
            heuristic: HeuristicConfig::new(HeuristicKind::Greedy),
            start: StartPolicy::Identity,
            trace: true,
            ..SearchConfig::default()
        };
        let r = run_search(&inst, &cfg)?;
        let objectives: Vec<String> = r
            .trace
            .unwrap_or_default()
            .iter()
            .map(|t| format!("{}", t.objective))
            .collect();
        println!("{:>6}: {}", mode.name(), objectives.join(" "));
    }
    Ok(())
}
