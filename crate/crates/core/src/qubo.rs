//! The Kronecker-product QUBO matrix and the penalty QUBO.
//!
//! For a permutation matrix `X` with column stack `x`, the identity
//! `x^T (A kron B) x = sum_ij A[i][j] * B[s(i)][s(j)]` holds, where block `i` of
//! `x` has its set bit at offset `s(i)`. Choosing `A = F, B = D` makes `s` the
//! facility-to-location map; choosing `A = D, B = F` makes `s` its inverse.
//! [`QOperator::encode`] and [`QOperator::decode`] convert between the two.

use crate::error::{Error, Result};
use crate::instance::{Instance, Matrix, Symmetry};

/// Dense materialization is refused above this order.
pub const DENSE_THRESHOLD: usize = 16;

/// Which instance matrix sits on the left of the Kronecker product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `A = F`, `B = D`: block `i` of a binary solution is facility `i`.
    FlowLeft,
    /// `A = D`, `B = F`: block `k` of a binary solution is location `k`.
    DistLeft,
}

/// Implicit `Q = A kron B`, optionally symmetrized as `(Q + Q^T) / 2`.
#[derive(Debug, Clone)]
pub struct QOperator {
    n: usize,
    a: Matrix,
    b: Matrix,
    symmetrized: bool,
    orientation: Orientation,
    symmetry: Symmetry,
    dense: Option<Vec<f64>>,
}

/// Build `Q` for an instance, picking the factor order from its symmetry class.
pub fn build_q_operator(instance: &Instance) -> QOperator {
    let (f, d) = (instance.flow().clone(), instance.dist().clone());
    let symmetry = instance.symmetry();
    let (a, b, symmetrized, orientation) = match symmetry {
        Symmetry::Symmetric => (f, d, false, Orientation::FlowLeft),
        Symmetry::SemiSymmetricFsym => (d, f, true, Orientation::DistLeft),
        Symmetry::SemiSymmetricDsym => (f, d, true, Orientation::FlowLeft),
        Symmetry::Asymmetric => (f, d, true, Orientation::FlowLeft),
    };
    QOperator {
        n: a.n(),
        a,
        b,
        symmetrized,
        orientation,
        symmetry,
        dense: None,
    }
}

impl QOperator {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Length of the binary vectors this operator acts on.
    #[inline]
    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn is_symmetrized(&self) -> bool {
        self.symmetrized
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Attach a dense copy when `n <= threshold`; otherwise leave it implicit.
    pub fn with_dense(mut self, threshold: usize) -> Self {
        if self.n <= threshold {
            self.dense = Some(self.to_dense());
        }
        self
    }

    pub fn dense(&self) -> Option<&[f64]> {
        self.dense.as_deref()
    }

    /// `Q(r, c)` without materializing `Q`.
    #[inline]
    pub fn entry(&self, r: usize, c: usize) -> f64 {
        let n = self.n;
        let (ra, rb, ca, cb) = (r / n, r % n, c / n, c % n);
        let fwd = self.a.get(ra, ca) * self.b.get(rb, cb);
        if self.symmetrized {
            0.5 * (fwd + self.a.get(ca, ra) * self.b.get(cb, rb))
        } else {
            fwd
        }
    }

    /// Checked variant of [`QOperator::entry`].
    pub fn q_entry(&self, r: usize, c: usize) -> Result<f64> {
        let dim = self.dim();
        for index in [r, c] {
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, limit: dim });
            }
        }
        Ok(self.entry(r, c))
    }

    /// Full `n^2 x n^2` matrix in row-major order.
    pub fn to_dense(&self) -> Vec<f64> {
        let dim = self.dim();
        let mut q = vec![0.0; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                q[r * dim + c] = self.entry(r, c);
            }
        }
        q
    }

    /// `Q x` in `O(n^3)` via `(A kron B) x = vec(A X B^T)` with `X[c][d] = x[c n + d]`.
    pub fn q_matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let mut y = vec![0.0; self.dim()];
        kron_apply(&self.a, &self.b, false, x, &mut y, 1.0);
        if self.symmetrized {
            for v in y.iter_mut() {
                *v *= 0.5;
            }
            kron_apply(&self.a, &self.b, true, x, &mut y, 0.5);
        }
        Ok(y)
    }

    /// `Q x` for a feasible `x` given by its per-block offsets `sigma`
    /// (`x[i n + sigma[i]] = 1`). Same result as [`QOperator::q_matvec`].
    pub fn matvec_permutation(&self, sigma: &[usize], y: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(sigma.len(), n);
        debug_assert_eq!(y.len(), n * n);
        let (a, b) = (&self.a, &self.b);
        let half = if self.symmetrized { 0.5 } else { 1.0 };
        // y[i n + k] = sum_j A[i][j] B[k][s(j)]  (+ the transposed term)
        for i in 0..n {
            let out = &mut y[i * n..(i + 1) * n];
            out.fill(0.0);
            let a_row = a.row(i);
            for (j, &sj) in sigma.iter().enumerate() {
                let w = a_row[j];
                if w != 0.0 {
                    let w = w * half;
                    for (k, o) in out.iter_mut().enumerate() {
                        *o += w * b.get(k, sj);
                    }
                }
            }
            if self.symmetrized {
                for (j, &sj) in sigma.iter().enumerate() {
                    let w = a.get(j, i);
                    if w != 0.0 {
                        let w = w * half;
                        let b_row = b.row(sj);
                        for (o, bv) in out.iter_mut().zip(b_row) {
                            *o += w * bv;
                        }
                    }
                }
            }
        }
    }

    /// `x^T Q x` for an arbitrary real vector.
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64> {
        let y = self.q_matvec(x)?;
        Ok(x.iter().zip(&y).map(|(a, b)| a * b).sum())
    }

    /// `x^T Q x` for the feasible vector with per-block offsets `sigma`, in `O(n^2)`.
    pub fn quadratic_form_permutation(&self, sigma: &[usize]) -> f64 {
        let mut total = 0.0;
        for (i, &si) in sigma.iter().enumerate() {
            let a_row = self.a.row(i);
            let b_row = self.b.row(si);
            for (j, &sj) in sigma.iter().enumerate() {
                total += a_row[j] * b_row[sj];
            }
        }
        total
    }

    /// Map a facility-to-location permutation to per-block offsets.
    pub fn encode(&self, perm: &[usize]) -> Vec<usize> {
        match self.orientation {
            Orientation::FlowLeft => perm.to_vec(),
            Orientation::DistLeft => invert(perm),
        }
    }

    /// Inverse of [`QOperator::encode`].
    pub fn decode(&self, sigma: &[usize]) -> Vec<usize> {
        match self.orientation {
            Orientation::FlowLeft => sigma.to_vec(),
            Orientation::DistLeft => invert(sigma),
        }
    }
}

/// `y += scale * (A kron B) x`, or with `A^T kron B^T` when `transpose` is set.
fn kron_apply(a: &Matrix, b: &Matrix, transpose: bool, x: &[f64], y: &mut [f64], scale: f64) {
    let n = a.n();
    let get_a = |i: usize, j: usize| if transpose { a.get(j, i) } else { a.get(i, j) };
    let get_b = |i: usize, j: usize| if transpose { b.get(j, i) } else { b.get(i, j) };
    // W[c][k] = sum_d X[c][d] B[k][d]
    let mut w = vec![0.0; n * n];
    for c in 0..n {
        let xc = &x[c * n..(c + 1) * n];
        for k in 0..n {
            let mut s = 0.0;
            for (d, &xv) in xc.iter().enumerate() {
                if xv != 0.0 {
                    s += xv * get_b(k, d);
                }
            }
            w[c * n + k] = s;
        }
    }
    for i in 0..n {
        for c in 0..n {
            let av = get_a(i, c);
            if av == 0.0 {
                continue;
            }
            let av = av * scale;
            for k in 0..n {
                y[i * n + k] += av * w[c * n + k];
            }
        }
    }
}

pub(crate) fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Penalty QUBO: `x^T Q x + lambda * (row and column one-hot violations squared)`.
#[derive(Debug, Clone)]
pub struct PenaltyQubo {
    pub q: QOperator,
    pub lambda: f64,
    pub u: f64,
    pub alpha: f64,
}

/// Build the penalty QUBO with `u = max(D) * sum(F)` and `lambda = alpha * u`.
pub fn build_penalty_qubo(instance: &Instance, alpha: f64) -> Result<PenaltyQubo> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    let u = (instance.dist().max_entry() * instance.flow().sum()).max(0.0);
    Ok(PenaltyQubo {
        q: build_q_operator(instance),
        lambda: alpha * u,
        u,
        alpha,
    })
}

impl PenaltyQubo {
    pub fn n(&self) -> usize {
        self.q.n()
    }

    /// Sum of squared one-hot violations over blocks and residue classes.
    pub fn violation(&self, x: &[u8]) -> f64 {
        let n = self.n();
        let mut total = 0.0;
        for block in 0..n {
            let s: f64 = x[block * n..(block + 1) * n].iter().map(|&b| b as f64).sum();
            total += (s - 1.0).powi(2);
        }
        for res in 0..n {
            let s: f64 = (0..n).map(|block| x[block * n + res] as f64).sum();
            total += (s - 1.0).powi(2);
        }
        total
    }

    /// Full penalty-QUBO energy of a bit vector.
    pub fn penalty_energy(&self, x: &[u8]) -> Result<f64> {
        let xf: Vec<f64> = x.iter().map(|&b| b as f64).collect();
        let quad = self.q.quadratic_form(&xf)?;
        Ok(quad + self.lambda * self.violation(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Matrix;

    fn toy() -> Instance {
        let f = Matrix::from_rows(&[vec![0.0, 3.0], vec![3.0, 0.0]]).unwrap();
        let d = Matrix::from_rows(&[vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap();
        Instance::new("toy", f, d).unwrap()
    }

    #[test]
    fn swap_kronecker_by_hand() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let inst = Instance::new("swap", m.clone(), m).unwrap();
        let q = build_q_operator(&inst);
        assert!(!q.is_symmetrized());
        let dense = q.to_dense();
        let mut expect = vec![0.0; 16];
        for (r, c) in [(0, 3), (3, 0), (1, 2), (2, 1)] {
            expect[r * 4 + c] = 1.0;
        }
        assert_eq!(dense, expect);
    }

    #[test]
    fn entry_bounds() {
        let q = build_q_operator(&toy());
        assert!(matches!(q.q_entry(4, 0), Err(Error::IndexOutOfRange { index: 4, limit: 4 })));
        assert_eq!(q.q_entry(0, 3).unwrap(), 15.0);
    }

    #[test]
    fn matvec_zero_and_length() {
        let q = build_q_operator(&toy());
        assert_eq!(q.q_matvec(&[0.0; 4]).unwrap(), vec![0.0; 4]);
        assert!(matches!(q.q_matvec(&[0.0; 3]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn penalty_toy_values() {
        let inst = toy();
        let pq = build_penalty_qubo(&inst, 1.0).unwrap();
        assert_eq!(pq.u, 30.0);
        assert_eq!(pq.lambda, 30.0);
        assert_eq!(build_penalty_qubo(&inst, 0.5).unwrap().lambda, 15.0);
        assert_eq!(pq.penalty_energy(&[1, 0, 0, 1]).unwrap(), 30.0);
        assert_eq!(pq.penalty_energy(&[0, 1, 1, 0]).unwrap(), 30.0);
        assert_eq!(pq.penalty_energy(&[0, 0, 0, 0]).unwrap(), 120.0);
        // quadratic part is sum(F) * sum(D) = 60, plus lambda * 4 violations
        assert_eq!(pq.penalty_energy(&[1, 1, 1, 1]).unwrap(), 180.0);
        assert!(build_penalty_qubo(&inst, 0.0).is_err());
    }

    #[test]
    fn zero_flow_gives_zero_penalty() {
        let d = Matrix::from_rows(&[vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap();
        let inst = Instance::new("z", Matrix::zeros(2), d).unwrap();
        let pq = build_penalty_qubo(&inst, 1.0).unwrap();
        assert_eq!(pq.u, 0.0);
        assert_eq!(pq.lambda, 0.0);
    }
}
