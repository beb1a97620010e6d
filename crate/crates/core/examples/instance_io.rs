//! Read a QAPLIB file, report its symmetry class, and write it back.

use fnqap::feasible::objective;
use fnqap::fetch::bundled_dir;
use fnqap::instance::{parse_instance, serialize_instance, Instance, ReferenceSolution};

fn main() -> fnqap::Result<()> {
    for name in ["chr12a", "esc16a", "had12", "tai12a"] {
        let path = bundled_dir().join(format!("{name}.dat"));
        let inst = Instance::from_file(&path)?;
        let sol = ReferenceSolution::from_file(path.with_extension("sln"))?;
        let back = parse_instance(&serialize_instance(&inst), name)?;
        assert_eq!(back, inst);
        println!(
            "{name:<7} n={:<3} {:<22} best known {:>8}, recomputed {:>8}",
            inst.n(),
            inst.symmetry().to_string(),
            sol.objective,
            objective(&inst, &sol.permutation)?
        );
    }
    Ok(())
}
