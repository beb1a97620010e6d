//! Native full-neighbourhood tabu against single-flip tabu on the penalty
//! QUBO and against random permutations, at equal iteration counts.

use fnqap::bench::{compare_baseline, load_instance, BaselineParams};

fn main() -> fnqap::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "chr12a".into());
    let loaded = load_instance(&name, None)?;
    for seed in 0..3 {
        let report = compare_baseline(
            &loaded,
            &BaselineParams {
                seed,
                ..BaselineParams::default()
            },
        )?;
        println!("{name}, seed {seed}, best known {}", report.best_known);
        for s in &report.summary {
            let gap = s.relgap.map_or("none feasible".to_string(), |g| format!("{:.2}%", 100.0 * g));
            println!("  {:<16} feasible {:>5}/{}  gap {gap}", s.solver, s.feasible_visits, s.iterations);
        }
    }
    Ok(())
}
