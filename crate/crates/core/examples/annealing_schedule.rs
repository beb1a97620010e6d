//! Temperature calibration for simulated annealing and a short run.

use fnqap::bench::load_instance;
use fnqap::heuristics::{estimate_temperatures, HeuristicConfig, HeuristicKind, SaParams, TemperatureSchedule};
use fnqap::search::{run_search, SearchConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fnqap::Result<()> {
    let loaded = load_instance("tai12a", None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let t = estimate_temperatures(&loaded.instance, &mut rng, &SaParams::default())?;
    let schedule = TemperatureSchedule::new(t, 10_000);
    println!("T_high {:.2}  T_low {:.4}", t.t_high, t.t_low);
    for k in [0, 2_500, 5_000, 7_500, 9_999] {
        println!("  T({k}) = {:.3}", schedule.at(k));
    }
    let cfg = SearchConfig {
        i_max: 10_000,
        heuristic: HeuristicConfig::new(HeuristicKind::Sa),
        ..SearchConfig::default()
    };
    let r = run_search(&loaded.instance, &cfg)?;
    println!("best {} (best known {:?}), {} moves accepted", r.f_best, loaded.best_known, r.moves);
    Ok(())
}
