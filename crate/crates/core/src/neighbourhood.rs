//! The full swap neighbourhood of a feasible binary vector.
//!
//! Row `i` holds the tuple `(z1, z2, z3, z4)` for the `i`-th pair of support
//! positions in lexicographic order. Because support entry `k` always lies in
//! block `k`, the pair of blocks `(k, j)` with `k < j` sits at a fixed row
//! index that never changes as the search moves, and replacing a support
//! entry by another position of the same block keeps the order intact.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::feasible::{BinarySolution, FlipTuple};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullNeighbourhood {
    n: usize,
    rows: Vec<FlipTuple>,
}

/// Rows touched by an accepted move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateRowSets {
    /// Rows whose pair contains the first cleared bit only.
    pub r1: Vec<usize>,
    /// Rows whose pair contains the second cleared bit only.
    pub r2: Vec<usize>,
    /// The accepted row itself.
    pub r3: usize,
}

impl UpdateRowSets {
    pub fn len(&self) -> usize {
        self.r1.len() + self.r2.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Row holding the pair of blocks `(k, j)`, `k < j`.
#[inline]
pub fn row_of_blocks(k: usize, j: usize, n: usize) -> usize {
    debug_assert!(k < j && j < n);
    k * (2 * n - k - 1) / 2 + (j - k - 1)
}

/// Number of rows, `n (n - 1) / 2`.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Enumerate every quadruple flip available at `x`.
pub fn build_full_neighbourhood(x: &BinarySolution) -> Result<FullNeighbourhood> {
    if !x.audit() {
        return Err(Error::InfeasibleSolution);
    }
    let n = x.n();
    let supp = x.support();
    let mut rows = Vec::with_capacity(pair_count(n));
    for k in 0..n {
        for j in k + 1..n {
            rows.push(FlipTuple::complete(supp[k], supp[j], n));
        }
    }
    Ok(FullNeighbourhood { n, rows })
}

impl FullNeighbourhood {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn rows(&self) -> &[FlipTuple] {
        &self.rows
    }

    #[inline]
    pub fn row(&self, i: usize) -> &FlipTuple {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Row index of the pair `(z1, z2)`, if it is a current row.
    pub fn find_pair(&self, z1: usize, z2: usize) -> Result<usize> {
        let n = self.n;
        let (k, j) = (z1 / n, z2 / n);
        if z1 < z2 && j < n && k < j {
            let i = row_of_blocks(k, j, n);
            let r = &self.rows[i];
            if r.z1 == z1 && r.z2 == z2 {
                return Ok(i);
            }
        }
        Err(Error::PairNotInNeighbourhood { z1, z2 })
    }

    /// Rows that change when the row with pair `(zb1, zb2)` is accepted.
    pub fn locate_update_rows(&self, zb1: usize, zb2: usize) -> Result<UpdateRowSets> {
        let r3 = self.find_pair(zb1, zb2)?;
        let n = self.n;
        let (k, j) = (zb1 / n, zb2 / n);
        let touching = |b: usize, skip: usize| -> Vec<usize> {
            (0..n)
                .filter(|&m| m != b && m != skip)
                .map(|m| {
                    if m < b {
                        row_of_blocks(m, b, n)
                    } else {
                        row_of_blocks(b, m, n)
                    }
                })
                .collect()
        };
        Ok(UpdateRowSets {
            r1: touching(k, j),
            r2: touching(j, k),
            r3,
        })
    }

    /// Rewrite the `2n - 3` rows affected by accepting the row with pair
    /// `(zb1, zb2)`. The solution itself must be flipped separately.
    pub fn update(&mut self, zb1: usize, zb2: usize) -> Result<UpdateRowSets> {
        let sets = self.locate_update_rows(zb1, zb2)?;
        let n = self.n;
        let z1s = (zb1 / n) * n + zb2 % n;
        let z2s = (zb2 / n) * n + zb1 % n;
        for (targets, old, new) in [(&sets.r1, zb1, z1s), (&sets.r2, zb2, z2s)] {
            for &i in targets {
                let r = self.rows[i];
                let (a, b) = if r.z1 == old { (new, r.z2) } else { (r.z1, new) };
                self.rows[i] = FlipTuple::complete(a, b, n);
            }
        }
        self.rows[sets.r3] = FlipTuple::complete(z1s, z2s, n);
        debug_assert!(self.is_sorted());
        Ok(sets)
    }

    /// Pure form of [`FullNeighbourhood::update`].
    pub fn updated(&self, zb1: usize, zb2: usize) -> Result<FullNeighbourhood> {
        let mut next = self.clone();
        next.update(zb1, zb2)?;
        Ok(next)
    }

    pub fn is_sorted(&self) -> bool {
        self.rows.windows(2).all(|w| (w[0].z1, w[0].z2) < (w[1].z1, w[1].z2))
    }

    /// Structural check against `x`: row count, tuple rules, order and
    /// support unions.
    pub fn check_against(&self, x: &BinarySolution) -> bool {
        let n = self.n;
        if x.n() != n || self.rows.len() != pair_count(n) || !self.is_sorted() {
            return false;
        }
        let mut cleared = vec![0usize; n * n];
        let mut set = vec![0usize; n * n];
        for r in &self.rows {
            if !r.is_consistent(n) {
                return false;
            }
            cleared[r.z1] += 1;
            cleared[r.z2] += 1;
            set[r.z3] += 1;
            set[r.z4] += 1;
        }
        let bits = x.bits();
        (0..n * n).all(|i| (cleared[i] > 0) == (bits[i] == 1) && (set[i] > 0) == (bits[i] == 0))
    }

    /// One line per row: `i: z1 z2 z3 z4`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.rows.iter().enumerate() {
            let _ = writeln!(out, "{i}: {} {} {} {}", r.z1, r.z2, r.z3, r.z4);
        }
        out
    }

    /// Dense 0/1 matrix marking the cleared bits of each row.
    pub fn s12(&self) -> Vec<Vec<u8>> {
        self.indicator(|r| [r.z1, r.z2])
    }

    /// Dense 0/1 matrix marking the set bits of each row.
    pub fn s34(&self) -> Vec<Vec<u8>> {
        self.indicator(|r| [r.z3, r.z4])
    }

    fn indicator(&self, pick: impl Fn(&FlipTuple) -> [usize; 2]) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| {
                let mut row = vec![0u8; self.n * self.n];
                for c in pick(r) {
                    row[c] = 1;
                }
                row
            })
            .collect()
    }
}

/// Number of differing entries between two equally shaped 0/1 matrices.
pub fn changed_entries(a: &[Vec<u8>], b: &[Vec<u8>]) -> usize {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).filter(|(x, y)| x != y).count())
        .sum()
}

/// Rows present, as identical tuples, in both neighbourhoods.
pub fn shared_rows(a: &FullNeighbourhood, b: &FullNeighbourhood) -> usize {
    let set: std::collections::HashSet<_> = a.rows.iter().collect();
    b.rows.iter().filter(|r| set.contains(r)).count()
}
