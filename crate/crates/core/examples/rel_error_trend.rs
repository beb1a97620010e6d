//! Mean relative error of the approximate row values over a run. The error
//! term is two matrix entries against sums that grow with n, so larger
//! instances are approximated better.

use fnqap::bench::load_instance;
use fnqap::search::{run_search, SearchConfig};

fn main() -> fnqap::Result<()> {
    for name in ["tai12a", "tai25a", "tai50a"] {
        let inst = load_instance(name, None)?.instance;
        let cfg = SearchConfig {
            i_max: 1000,
            track_rel_error: true,
            ..SearchConfig::default()
        };
        let r = run_search(&inst, &cfg)?;
        let re = r.rel_error.unwrap_or_default();
        let mean = re.iter().sum::<f64>() / re.len() as f64;
        let last = re.last().copied().unwrap_or_default();
        println!("{name:<7} mean {mean:.4}  first {:.4}  last {last:.4}", re[0]);
    }
    Ok(())
}
