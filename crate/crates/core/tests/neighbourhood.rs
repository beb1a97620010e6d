mod common;

use common::{random_permutation, EXAMPLE_SIGMA};
use fnqap::feasible::{apply_quadruple_flip, to_binary, FlipTuple};
use fnqap::neighbourhood::{
    build_full_neighbourhood, changed_entries, pair_count, row_of_blocks, shared_rows, FullNeighbourhood,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tuples(nb: &FullNeighbourhood) -> Vec<(usize, usize, usize, usize)> {
    nb.rows().iter().map(|r| (r.z1, r.z2, r.z3, r.z4)).collect()
}

const TABLE_X: [(usize, usize, usize, usize); 10] = [
    (2, 5, 7, 0),
    (2, 11, 12, 1),
    (2, 18, 17, 3),
    (2, 24, 22, 4),
    (5, 11, 10, 6),
    (5, 18, 15, 8),
    (5, 24, 20, 9),
    (11, 18, 16, 13),
    (11, 24, 21, 14),
    (18, 24, 23, 19),
];

#[test]
fn five_facility_table() {
    let x = to_binary(&EXAMPLE_SIGMA).unwrap();
    assert_eq!(x.support(), &[2, 5, 11, 18, 24]);
    let nb = build_full_neighbourhood(&x).unwrap();
    assert_eq!(tuples(&nb), TABLE_X.to_vec());
    assert!(nb.check_against(&x));
}

#[test]
fn five_facility_table_after_row_seven() {
    let x = to_binary(&EXAMPLE_SIGMA).unwrap();
    let mut nb = build_full_neighbourhood(&x).unwrap();
    let t = *nb.row(7);
    let sets = nb.locate_update_rows(t.z1, t.z2).unwrap();
    assert_eq!(sets.r1, vec![1, 4, 8]);
    assert_eq!(sets.r2, vec![2, 5, 9]);
    assert_eq!(sets.r3, 7);

    let y = apply_quadruple_flip(&x, &t).unwrap();
    assert_eq!(y.support(), &[2, 5, 13, 16, 24]);
    nb.update(t.z1, t.z2).unwrap();
    let expect = vec![
        (2, 5, 7, 0),
        (2, 13, 12, 3),
        (2, 16, 17, 1),
        (2, 24, 22, 4),
        (5, 13, 10, 8),
        (5, 16, 15, 6),
        (5, 24, 20, 9),
        (13, 16, 18, 11),
        (13, 24, 23, 14),
        (16, 24, 21, 19),
    ];
    assert_eq!(tuples(&nb), expect);
    for unchanged in [0, 3, 6] {
        assert_eq!(tuples(&nb)[unchanged], TABLE_X[unchanged]);
    }
    assert!(nb.check_against(&y));
}

#[test]
fn dump_format() {
    let x = to_binary(&EXAMPLE_SIGMA).unwrap();
    let nb = build_full_neighbourhood(&x).unwrap();
    let dump = nb.dump();
    assert_eq!(dump.lines().next(), Some("0: 2 5 7 0"));
    assert_eq!(dump.lines().nth(7), Some("7: 11 18 16 13"));
}

#[test]
fn counting_laws_exhaustive() {
    for n in 2..=12 {
        let x = to_binary(&random_permutation(n as u64, n)).unwrap();
        let nb = build_full_neighbourhood(&x).unwrap();
        assert_eq!(nb.len(), n * (n - 1) / 2);
        assert_eq!(pair_count(n), nb.len());
        let (s12, s34) = (nb.s12(), nb.s34());
        let expected_shared = (n - 2) * n.saturating_sub(3) / 2;
        for i in 0..nb.len() {
            let t = *nb.row(i);
            let next = nb.updated(t.z1, t.z2).unwrap();
            assert_eq!(shared_rows(&nb, &next), expected_shared, "n={n} row={i}");
            assert_eq!(changed_entries(&s12, &next.s12()), 4 * (n - 1), "n={n} row={i}");
            assert_eq!(changed_entries(&s34, &next.s34()), 4 * (n - 1), "n={n} row={i}");
        }
    }
}

#[test]
fn twelve_facilities_change_forty_four_entries() {
    let x = to_binary(&(0..12).collect::<Vec<_>>()).unwrap();
    let nb = build_full_neighbourhood(&x).unwrap();
    let t = *nb.row(0);
    let next = nb.updated(t.z1, t.z2).unwrap();
    assert_eq!(changed_entries(&nb.s12(), &next.s12()), 44);
    assert_eq!(changed_entries(&nb.s34(), &next.s34()), 44);
}

#[test]
fn small_sizes() {
    let one = to_binary(&[0]).unwrap();
    assert!(build_full_neighbourhood(&one).unwrap().is_empty());
    let two = to_binary(&[1, 0]).unwrap();
    let nb = build_full_neighbourhood(&two).unwrap();
    assert_eq!(nb.len(), 1);
    let t = *nb.row(0);
    assert_eq!(t, FlipTuple::from_pair(1, 2, 2).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incremental_update_matches_rebuild(n in 2usize..10, seed in any::<u64>(), steps in 1usize..100) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = to_binary(&random_permutation(seed, n)).unwrap();
        let mut nb = build_full_neighbourhood(&x).unwrap();
        for _ in 0..steps {
            let t = *nb.row(rng.random_range(0..nb.len()));
            x.apply(&t).unwrap();
            nb.update(t.z1, t.z2).unwrap();
            prop_assert_eq!(&nb, &build_full_neighbourhood(&x).unwrap());
            prop_assert!(x.audit());
        }
    }

    #[test]
    fn rows_are_consistent_and_cover_the_support(n in 2usize..12, seed in any::<u64>()) {
        let x = to_binary(&random_permutation(seed, n)).unwrap();
        let nb = build_full_neighbourhood(&x).unwrap();
        prop_assert!(nb.check_against(&x));
        for (i, r) in nb.rows().iter().enumerate() {
            prop_assert_eq!(row_of_blocks(r.z1 / n, r.z2 / n, n), i);
            prop_assert_eq!(nb.find_pair(r.z1, r.z2).unwrap(), i);
            let back = r.reversed(n);
            prop_assert_eq!(back.reversed(n), *r);
        }
    }
}
