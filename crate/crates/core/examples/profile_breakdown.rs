//! Share of wall time per phase of the search loop as n grows. The row
//! evaluation costs O(n^3) per iteration against O(n^2) for the rest.

use fnqap::bench::{load_instance, profile};
use fnqap::search::SearchConfig;

fn main() -> fnqap::Result<()> {
    println!("{:<8} {:>4} {:>9} {:>9} {:>9} {:>9}", "instance", "n", "gradient", "update", "select", "other");
    for name in ["had12", "nug20", "tai25a", "tai50a"] {
        let inst = load_instance(name, None)?.instance;
        let cfg = SearchConfig {
            i_max: 5_000,
            ..SearchConfig::default()
        };
        let p = profile(&inst, &cfg)?;
        println!(
            "{:<8} {:>4} {:>9.3} {:>9.3} {:>9.3} {:>9.3}",
            p.instance, p.n, p.gradient, p.neighbourhood_update, p.selection, p.other
        );
    }
    Ok(())
}
