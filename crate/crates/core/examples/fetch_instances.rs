//! Copy instances into a directory, from the bundled set or a mirror
//! (`QAPLIB_MIRROR` or the second argument).
//!
//!     cargo run --example fetch_instances -- /tmp/qaplib https://example.org/qaplib

use std::path::PathBuf;

use fnqap::fetch::fetch_instances;

fn main() -> fnqap::Result<()> {
    let mut args = std::env::args().skip(1);
    let dest = PathBuf::from(args.next().unwrap_or_else(|| "qaplib".into()));
    let mirror = args.next();
    let names: Vec<String> = ["chr12a", "had12", "tai12a"].iter().map(|s| s.to_string()).collect();
    let manifest = fetch_instances(&names, &dest, mirror.as_deref())?;
    for e in &manifest.entries {
        println!("{:<8} {} {}", e.name, e.dat.display(), e.sln.as_ref().map_or("-".into(), |p| p.display().to_string()));
    }
    Ok(())
}
