//! Full neighbourhood of a five-facility solution, then the partial update
//! after accepting row 7: only the 2n - 3 rows sharing a block change.

use fnqap::feasible::{apply_quadruple_flip, to_binary};
use fnqap::neighbourhood::build_full_neighbourhood;

fn main() -> fnqap::Result<()> {
    let x = to_binary(&[2, 0, 1, 3, 4])?;
    let mut nb = build_full_neighbourhood(&x)?;
    println!("N(x), support {:?}", x.support());
    print!("{}", nb.dump());

    let t = *nb.row(7);
    let sets = nb.locate_update_rows(t.z1, t.z2)?;
    println!("\naccept row 7 {t:?}");
    println!("R1 {:?}  R2 {:?}  R3 {}", sets.r1, sets.r2, sets.r3);
    let y = apply_quadruple_flip(&x, &t)?;
    nb.update(t.z1, t.z2)?;
    println!("\nN(y), support {:?}", y.support());
    print!("{}", nb.dump());
    assert_eq!(nb, build_full_neighbourhood(&y)?);
    Ok(())
}
