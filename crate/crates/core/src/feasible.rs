//! Permutations, feasible binary vectors and quadruple bit-flips.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::qubo::QOperator;

/// Check that `perm` is a bijection on `0..perm.len()`.
pub fn check_permutation(perm: &[usize]) -> Result<()> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n {
            return Err(Error::NotAPermutation {
                n,
                detail: format!("entry {p} out of range"),
            });
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::NotAPermutation {
                n,
                detail: format!("entry {p} repeated"),
            });
        }
    }
    Ok(())
}

/// `sum_ij F[i][j] * D[perm[i]][perm[j]]`.
pub fn objective(instance: &Instance, perm: &[usize]) -> Result<f64> {
    let n = instance.n();
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: perm.len(),
        });
    }
    check_permutation(perm)?;
    let (f, d) = (instance.flow(), instance.dist());
    let mut total = 0.0;
    for i in 0..n {
        let f_row = f.row(i);
        let d_row = d.row(perm[i]);
        for j in 0..n {
            total += f_row[j] * d_row[perm[j]];
        }
    }
    Ok(total)
}

/// Column stack of a permutation matrix: one set bit per block of `n`
/// consecutive positions and one per residue class mod `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinarySolution {
    n: usize,
    bits: Vec<u8>,
    support: Vec<usize>,
}

/// Set bit `i * n + perm[i]` for every `i`.
pub fn to_binary(perm: &[usize]) -> Result<BinarySolution> {
    check_permutation(perm)?;
    let n = perm.len();
    let mut bits = vec![0u8; n * n];
    let support: Vec<usize> = perm.iter().enumerate().map(|(i, &p)| i * n + p).collect();
    for &s in &support {
        bits[s] = 1;
    }
    Ok(BinarySolution { n, bits, support })
}

impl BinarySolution {
    /// Validate an arbitrary bit vector of length `n^2`.
    pub fn from_bits(bits: Vec<u8>, n: usize) -> Result<Self> {
        if bits.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: bits.len(),
            });
        }
        if !is_feasible(&bits, n) {
            return Err(Error::InfeasibleSolution);
        }
        let support = bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i)
            .collect();
        Ok(BinarySolution { n, bits, support })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Sorted set-bit positions; entry `k` lies in block `k`.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Per-block offsets: the permutation this vector encodes.
    pub fn to_permutation(&self) -> Vec<usize> {
        self.support.iter().map(|&s| s % self.n).collect()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| b as f64).collect()
    }

    /// Apply a quadruple flip in place.
    pub fn apply(&mut self, t: &FlipTuple) -> Result<()> {
        let n = self.n;
        let limit = n * n;
        for index in [t.z1, t.z2, t.z3, t.z4] {
            if index >= limit {
                return Err(Error::IndexOutOfRange { index, limit });
            }
        }
        let fail = |reason| Error::TupleNotApplicable {
            z1: t.z1,
            z2: t.z2,
            z3: t.z3,
            z4: t.z4,
            reason,
        };
        if !t.is_consistent(n) {
            return Err(fail("z3/z4 do not match the pair (z1, z2)"));
        }
        if self.bits[t.z1] != 1 || self.bits[t.z2] != 1 {
            return Err(fail("z1 and z2 must be set"));
        }
        if self.bits[t.z3] != 0 || self.bits[t.z4] != 0 {
            return Err(fail("z3 and z4 must be clear"));
        }
        self.bits[t.z1] = 0;
        self.bits[t.z2] = 0;
        self.bits[t.z3] = 1;
        self.bits[t.z4] = 1;
        // z3 shares a block with z2, z4 with z1.
        self.support[t.z1 / n] = t.z4;
        self.support[t.z2 / n] = t.z3;
        Ok(())
    }

    /// Both one-hot families intact and the support cache in sync.
    pub fn audit(&self) -> bool {
        is_feasible(&self.bits, self.n)
            && self.support.len() == self.n
            && self
                .support
                .iter()
                .enumerate()
                .all(|(k, &s)| s / self.n == k && self.bits[s] == 1)
    }
}

/// Pure form of [`BinarySolution::apply`].
pub fn apply_quadruple_flip(x: &BinarySolution, t: &FlipTuple) -> Result<BinarySolution> {
    let mut y = x.clone();
    y.apply(t)?;
    Ok(y)
}

/// One-hot test over blocks and residue classes.
pub fn is_feasible(bits: &[u8], n: usize) -> bool {
    if bits.len() != n * n || bits.iter().any(|&b| b > 1) {
        return false;
    }
    let mut col = vec![0usize; n];
    for block in 0..n {
        let mut count = 0;
        for (r, &b) in bits[block * n..(block + 1) * n].iter().enumerate() {
            if b == 1 {
                count += 1;
                col[r] += 1;
            }
        }
        if count != 1 {
            return false;
        }
    }
    col.iter().all(|&c| c == 1)
}

/// `x^T Q x` for a feasible vector.
pub fn objective_binary(q: &QOperator, x: &BinarySolution) -> Result<f64> {
    if x.n() != q.n() {
        return Err(Error::DimensionMismatch {
            expected: q.n(),
            actual: x.n(),
        });
    }
    Ok(q.quadratic_form_permutation(&x.to_permutation()))
}

/// Two set bits `z1 < z2` cleared and two clear bits `z3`, `z4` set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlipTuple {
    pub z1: usize,
    pub z2: usize,
    pub z3: usize,
    pub z4: usize,
}

impl FlipTuple {
    /// Complete a pair of support positions; the pair may come in either order.
    pub fn from_pair(a: usize, b: usize, n: usize) -> Result<Self> {
        let (z1, z2) = if a < b { (a, b) } else { (b, a) };
        let (z3, z4) = identify_bits_to_flip(z1, z2, n)?;
        Ok(FlipTuple { z1, z2, z3, z4 })
    }

    /// Unchecked completion for callers that already know the pair is valid.
    #[inline]
    pub(crate) fn complete(z1: usize, z2: usize, n: usize) -> Self {
        debug_assert!(z1 < z2);
        FlipTuple {
            z1,
            z2,
            z3: (z2 / n) * n + z1 % n,
            z4: (z1 / n) * n + z2 % n,
        }
    }

    /// Tuple that undoes this one. Its first pair is `(z3, z4)` in sorted order.
    pub fn reversed(&self, n: usize) -> Self {
        Self::complete(self.z3.min(self.z4), self.z3.max(self.z4), n)
    }

    pub fn is_consistent(&self, n: usize) -> bool {
        self.z1 < self.z2
            && self.z3 == (self.z2 / n) * n + self.z1 % n
            && self.z4 == (self.z1 / n) * n + self.z2 % n
            && self.z1 / n != self.z2 / n
            && self.z1 % n != self.z2 % n
    }

    pub fn indices(&self) -> [usize; 4] {
        [self.z1, self.z2, self.z3, self.z4]
    }
}

/// Positions to set when clearing `z1` and `z2`.
pub fn identify_bits_to_flip(z1: usize, z2: usize, n: usize) -> Result<(usize, usize)> {
    let limit = n * n;
    for index in [z1, z2] {
        if index >= limit {
            return Err(Error::IndexOutOfRange { index, limit });
        }
    }
    if z1 / n == z2 / n || z1 % n == z2 % n {
        return Err(Error::SameBlockOrResidue { z1, z2 });
    }
    Ok(((z2 / n) * n + z1 % n, (z1 / n) * n + z2 % n))
}

/// Closed forms for `y^T Q y - x^T Q x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DifferenceMode {
    /// `d^T (Q + Q^T) x + d^T Q d` with `d = y - x`; valid for any `Q`.
    General,
    /// `2 d^T Q x + d^T Q d`; requires symmetric `Q`.
    Symmetrized,
    /// `2 (q3 + q4 - q1 - q2 + Q(z3,z4) + Q(z4,z3))`; requires at least one
    /// symmetric instance matrix.
    SemiSymmetric,
}

impl DifferenceMode {
    pub fn name(self) -> &'static str {
        match self {
            DifferenceMode::General => "general",
            DifferenceMode::Symmetrized => "symmetrized",
            DifferenceMode::SemiSymmetric => "semisymmetric",
        }
    }
}

/// `(Q x)[r]` for a feasible `x`, in `O(n)`.
fn q_times_x_at(q: &QOperator, support: &[usize], r: usize) -> f64 {
    support.iter().map(|&s| q.entry(r, s)).sum()
}

/// `(Q^T x)[r]` for a feasible `x`, in `O(n)`.
fn qt_times_x_at(q: &QOperator, support: &[usize], r: usize) -> f64 {
    support.iter().map(|&s| q.entry(s, r)).sum()
}

/// Objective change of a quadruple flip, computed in `O(n)` from `Q` entries.
pub fn exact_pair_difference(
    q: &QOperator,
    x: &BinarySolution,
    t: &FlipTuple,
    mode: DifferenceMode,
) -> Result<f64> {
    if x.n() != q.n() {
        return Err(Error::DimensionMismatch {
            expected: q.n(),
            actual: x.n(),
        });
    }
    // validates the tuple against x without keeping the result
    apply_quadruple_flip(x, t)?;
    let supp = x.support();
    let signed = [(t.z1, -1.0), (t.z2, -1.0), (t.z3, 1.0), (t.z4, 1.0)];
    match mode {
        DifferenceMode::General => {
            let mut lin = 0.0;
            let mut quad = 0.0;
            for &(a, da) in &signed {
                lin += da * (q_times_x_at(q, supp, a) + qt_times_x_at(q, supp, a));
                for &(b, db) in &signed {
                    quad += da * db * q.entry(a, b);
                }
            }
            Ok(lin + quad)
        }
        DifferenceMode::Symmetrized => {
            let lin: f64 = signed
                .iter()
                .map(|&(a, da)| da * q_times_x_at(q, supp, a))
                .sum();
            let quad: f64 = signed
                .iter()
                .flat_map(|&(a, da)| signed.iter().map(move |&(b, db)| (a, b, da * db)))
                .map(|(a, b, s)| s * q.entry(a, b))
                .sum();
            Ok(2.0 * lin + quad)
        }
        DifferenceMode::SemiSymmetric => {
            if !q.symmetry().has_symmetric_factor() {
                return Err(Error::ModeUnsupportedForInstance {
                    mode: mode.name(),
                    class: q.symmetry().to_string(),
                });
            }
            let lin: f64 = signed
                .iter()
                .map(|&(a, da)| da * q_times_x_at(q, supp, a))
                .sum();
            Ok(2.0 * (lin + q.entry(t.z3, t.z4) + q.entry(t.z4, t.z3)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_of_small_permutations() {
        let x = to_binary(&[2, 0, 1, 3, 4]).unwrap();
        assert_eq!(x.support(), &[2, 5, 11, 18, 24]);
        let id = to_binary(&[0, 1, 2]).unwrap();
        assert_eq!(id.support(), &[0, 4, 8]);
        assert_eq!(x.to_permutation(), vec![2, 0, 1, 3, 4]);
    }

    #[test]
    fn completing_pairs() {
        assert_eq!(identify_bits_to_flip(2, 5, 5).unwrap(), (7, 0));
        assert_eq!(identify_bits_to_flip(11, 18, 5).unwrap(), (16, 13));
        assert_eq!(identify_bits_to_flip(5, 2, 5).unwrap(), (0, 7));
        assert!(matches!(
            identify_bits_to_flip(2, 7, 5),
            Err(Error::SameBlockOrResidue { .. })
        ));
        assert!(matches!(
            identify_bits_to_flip(5, 9, 5),
            Err(Error::SameBlockOrResidue { .. })
        ));
    }

    #[test]
    fn flip_and_undo() {
        let x = to_binary(&[2, 0, 1, 3, 4]).unwrap();
        let t = FlipTuple::from_pair(11, 18, 5).unwrap();
        assert_eq!(t, FlipTuple { z1: 11, z2: 18, z3: 16, z4: 13 });
        let y = apply_quadruple_flip(&x, &t).unwrap();
        assert_eq!(y.support(), &[2, 5, 13, 16, 24]);
        assert!(y.audit());
        let back = apply_quadruple_flip(&y, &t.reversed(5)).unwrap();
        assert_eq!(back, x);
        assert!(matches!(
            apply_quadruple_flip(&y, &t),
            Err(Error::TupleNotApplicable { .. })
        ));
    }

    #[test]
    fn column_swap_from_identity() {
        // identity on n = 4, exchanging the assignments of blocks 1 and 3
        let x = to_binary(&[0, 1, 2, 3]).unwrap();
        let t = FlipTuple::from_pair(5, 15, 4).unwrap();
        let y = apply_quadruple_flip(&x, &t).unwrap();
        assert_eq!(y.to_permutation(), vec![0, 3, 2, 1]);
        let expect: Vec<u8> = vec![1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0];
        assert_eq!(y.bits(), expect.as_slice());
    }

    #[test]
    fn audit_catches_corruption() {
        let mut bits = to_binary(&[1, 0, 2]).unwrap().bits().to_vec();
        assert!(is_feasible(&bits, 3));
        bits[0] = 1;
        assert!(!is_feasible(&bits, 3));
        assert!(matches!(
            BinarySolution::from_bits(bits, 3),
            Err(Error::InfeasibleSolution)
        ));
    }

    #[test]
    fn objective_with_zero_distance() {
        use crate::instance::Matrix;
        let f = Matrix::from_rows(&[vec![0.0, 3.0], vec![3.0, 0.0]]).unwrap();
        let inst = Instance::new("z", f, Matrix::zeros(2)).unwrap();
        assert_eq!(objective(&inst, &[1, 0]).unwrap(), 0.0);
        assert!(matches!(
            objective(&inst, &[0, 1, 2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
