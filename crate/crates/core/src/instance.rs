//! QAPLIB instance and solution files.
//!
//! A `.dat` file holds the order `n` followed by two `n x n` matrices in
//! row-major order. The first matrix is the flow matrix `F`, the second the
//! distance matrix `D`, so the cost of a permutation `p` is
//! `sum_ij F[i][j] * D[p[i]][p[j]]`. Some mirrors document the opposite order;
//! this crate always reads flow first.
//!
//! A `.sln` file holds `n`, the best-known objective, and a 1-indexed
//! permutation.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Dense square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonSquareData(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { n, data })
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::NonSquareData(format!(
                "{} values cannot form a {n}x{n} matrix",
                data.len()
            )));
        }
        Ok(Matrix { n, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }
}

/// Symmetry class of a QAP instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Symmetry {
    /// Both `F` and `D` are symmetric.
    Symmetric,
    /// Only the flow matrix is symmetric.
    SemiSymmetricFsym,
    /// Only the distance matrix is symmetric.
    SemiSymmetricDsym,
    Asymmetric,
}

impl Symmetry {
    pub fn from_flags(f_symmetric: bool, d_symmetric: bool) -> Self {
        match (f_symmetric, d_symmetric) {
            (true, true) => Symmetry::Symmetric,
            (true, false) => Symmetry::SemiSymmetricFsym,
            (false, true) => Symmetry::SemiSymmetricDsym,
            (false, false) => Symmetry::Asymmetric,
        }
    }

    /// Label after exchanging the roles of the two matrices.
    pub fn swapped(self) -> Self {
        match self {
            Symmetry::SemiSymmetricFsym => Symmetry::SemiSymmetricDsym,
            Symmetry::SemiSymmetricDsym => Symmetry::SemiSymmetricFsym,
            other => other,
        }
    }

    /// True when at least one of the two matrices is symmetric.
    pub fn has_symmetric_factor(self) -> bool {
        self != Symmetry::Asymmetric
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Symmetry::Symmetric => "symmetric",
            Symmetry::SemiSymmetricFsym => "semi-symmetric (F symmetric)",
            Symmetry::SemiSymmetricDsym => "semi-symmetric (D symmetric)",
            Symmetry::Asymmetric => "asymmetric",
        };
        f.write_str(s)
    }
}

/// Classify a pair of square matrices.
pub fn classify_symmetry(flow: &Matrix, dist: &Matrix) -> Result<Symmetry> {
    if flow.n() != dist.n() {
        return Err(Error::DimensionMismatch {
            expected: flow.n(),
            actual: dist.n(),
        });
    }
    Ok(Symmetry::from_flags(flow.is_symmetric(), dist.is_symmetric()))
}

/// What to do with nonzero diagonal entries in `F` or `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagonalPolicy {
    /// Overwrite them with zero and log a warning.
    #[default]
    Zero,
    /// Reject the instance.
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    flow: Matrix,
    dist: Matrix,
    symmetry: Symmetry,
}

impl Instance {
    /// Build an instance from flow and distance matrices, applying the
    /// default diagonal policy.
    pub fn new(name: impl Into<String>, flow: Matrix, dist: Matrix) -> Result<Self> {
        Self::with_policy(name, flow, dist, DiagonalPolicy::default())
    }

    pub fn with_policy(
        name: impl Into<String>,
        mut flow: Matrix,
        mut dist: Matrix,
        policy: DiagonalPolicy,
    ) -> Result<Self> {
        let name = name.into();
        if flow.n() != dist.n() {
            return Err(Error::DimensionMismatch {
                expected: flow.n(),
                actual: dist.n(),
            });
        }
        if flow.n() < 2 {
            return Err(Error::NonSquareData(format!(
                "order must be at least 2, got {}",
                flow.n()
            )));
        }
        for (label, m) in [("F", &mut flow), ("D", &mut dist)] {
            check_finite(label, m)?;
            fix_diagonal(&name, label, m, policy)?;
        }
        let symmetry = classify_symmetry(&flow, &dist)?;
        Ok(Instance {
            name,
            flow,
            dist,
            symmetry,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.flow.n()
    }

    pub fn flow(&self) -> &Matrix {
        &self.flow
    }

    pub fn dist(&self) -> &Matrix {
        &self.dist
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Same instance with both matrices transposed.
    pub fn transposed(&self) -> Instance {
        let flow = self.flow.transpose();
        let dist = self.dist.transpose();
        let symmetry = Symmetry::from_flags(flow.is_symmetric(), dist.is_symmetric());
        Instance {
            name: self.name.clone(),
            flow,
            dist,
            symmetry,
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        parse_instance(&text, &name)
    }
}

fn check_finite(label: &'static str, m: &Matrix) -> Result<()> {
    for i in 0..m.n() {
        for j in 0..m.n() {
            if !m.get(i, j).is_finite() {
                return Err(Error::NonFiniteEntry {
                    matrix: label,
                    row: i,
                    col: j,
                });
            }
        }
    }
    Ok(())
}

fn fix_diagonal(name: &str, label: &'static str, m: &mut Matrix, policy: DiagonalPolicy) -> Result<()> {
    for i in 0..m.n() {
        let v = m.get(i, i);
        if v != 0.0 {
            match policy {
                DiagonalPolicy::Strict => {
                    return Err(Error::NonzeroDiagonal {
                        matrix: label,
                        index: i,
                        value: v,
                    })
                }
                DiagonalPolicy::Zero => {
                    log::warn!("{name}: zeroing {label}[{i}][{i}] = {v}");
                    m.set(i, i, 0.0);
                }
            }
        }
    }
    Ok(())
}

fn parse_number(token: &str) -> Result<f64> {
    token.parse::<f64>().map_err(|e| Error::Parse {
        token: token.to_string(),
        reason: e.to_string(),
    })
}

fn parse_index(token: &str) -> Result<usize> {
    // Some solution files write integral values as "12.0".
    let v = parse_number(token)?;
    if v < 0.0 || v.fract() != 0.0 {
        return Err(Error::Parse {
            token: token.to_string(),
            reason: "expected a non-negative integer".into(),
        });
    }
    Ok(v as usize)
}

/// Parse a QAPLIB `.dat` stream using the default diagonal policy.
pub fn parse_instance(text: &str, name: &str) -> Result<Instance> {
    parse_instance_with(text, name, DiagonalPolicy::default())
}

pub fn parse_instance_with(text: &str, name: &str, policy: DiagonalPolicy) -> Result<Instance> {
    let mut tokens = text.split_whitespace();
    let n = match tokens.next() {
        Some(t) => parse_index(t)?,
        None => {
            return Err(Error::TruncatedFile {
                expected: 1,
                found: 0,
            })
        }
    };
    if n == 0 {
        return Err(Error::NonSquareData("order is zero".into()));
    }
    let expected = 2 * n * n;
    let values = tokens.map(parse_number).collect::<Result<Vec<f64>>>()?;
    if values.len() < expected {
        return Err(Error::TruncatedFile {
            expected,
            found: values.len(),
        });
    }
    if values.len() > expected {
        return Err(Error::NonSquareData(format!(
            "{} trailing values after two {n}x{n} matrices",
            values.len() - expected
        )));
    }
    let flow = Matrix::from_vec(n, values[..n * n].to_vec())?;
    let dist = Matrix::from_vec(n, values[n * n..].to_vec())?;
    Instance::with_policy(name, flow, dist, policy)
}

fn write_matrix(out: &mut String, m: &Matrix) {
    for i in 0..m.n() {
        let row: Vec<String> = m.row(i).iter().map(|v| format_value(*v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Write an instance in `.dat` layout.
pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = format!("{}\n\n", instance.n());
    write_matrix(&mut out, instance.flow());
    out.push('\n');
    write_matrix(&mut out, instance.dist());
    out
}

/// Best-known solution as shipped in a `.sln` file. The permutation is
/// 0-indexed.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub n: usize,
    pub objective: f64,
    pub permutation: Vec<usize>,
}

impl ReferenceSolution {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_solution(&text)
    }
}

/// Parse a QAPLIB `.sln` stream.
pub fn parse_solution(text: &str) -> Result<ReferenceSolution> {
    let mut tokens = text.split_whitespace();
    let n = tokens
        .next()
        .map(parse_index)
        .transpose()?
        .ok_or(Error::TruncatedFile {
            expected: 2,
            found: 0,
        })?;
    let objective = tokens
        .next()
        .map(parse_number)
        .transpose()?
        .ok_or(Error::TruncatedFile {
            expected: 2,
            found: 1,
        })?;
    let one_based = tokens.map(parse_index).collect::<Result<Vec<usize>>>()?;
    if one_based.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: one_based.len(),
        });
    }
    let mut seen = vec![false; n];
    let mut permutation = Vec::with_capacity(n);
    for &v in &one_based {
        if v == 0 || v > n {
            return Err(Error::NotAPermutation {
                n,
                detail: format!("entry {v} outside 1..={n}"),
            });
        }
        if std::mem::replace(&mut seen[v - 1], true) {
            return Err(Error::NotAPermutation {
                n,
                detail: format!("entry {v} repeated"),
            });
        }
        permutation.push(v - 1);
    }
    Ok(ReferenceSolution {
        n,
        objective,
        permutation,
    })
}

/// Write a solution in `.sln` layout (1-indexed permutation).
pub fn serialize_solution(sol: &ReferenceSolution) -> String {
    let perm: Vec<String> = sol.permutation.iter().map(|p| (p + 1).to_string()).collect();
    format!("{} {}\n{}\n", sol.n, format_value(sol.objective), perm.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_symmetric_instance() {
        let inst = parse_instance("2\n0 3\n3 0\n0 5\n5 0", "toy").unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.flow().row(0), &[0.0, 3.0]);
        assert_eq!(inst.dist().row(1), &[5.0, 0.0]);
        assert_eq!(inst.symmetry(), Symmetry::Symmetric);
    }

    #[test]
    fn truncated_stream() {
        match parse_instance("3\n0 1\n", "bad") {
            Err(Error::TruncatedFile { expected, found }) => {
                assert_eq!(expected, 18);
                assert_eq!(found, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trailing_whitespace_is_fine() {
        assert!(parse_instance("2\n0 3\n3 0\n0 5\n5 0\n\n   \n", "toy").is_ok());
    }

    #[test]
    fn non_finite_rejected() {
        let err = parse_instance("2\n0 inf\n3 0\n0 5\n5 0", "bad").unwrap_err();
        assert!(matches!(err, Error::NonFiniteEntry { matrix: "F", row: 0, col: 1 }));
    }

    #[test]
    fn diagonal_policies() {
        let text = "2\n7 3\n3 0\n0 5\n5 0";
        let zeroed = parse_instance(text, "diag").unwrap();
        assert_eq!(zeroed.flow().get(0, 0), 0.0);
        let strict = parse_instance_with(text, "diag", DiagonalPolicy::Strict).unwrap_err();
        assert!(matches!(strict, Error::NonzeroDiagonal { matrix: "F", index: 0, .. }));
    }

    #[test]
    fn classification() {
        let sym = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let asym = Matrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(classify_symmetry(&sym, &sym).unwrap(), Symmetry::Symmetric);
        assert_eq!(classify_symmetry(&sym, &asym).unwrap(), Symmetry::SemiSymmetricFsym);
        assert_eq!(classify_symmetry(&asym, &sym).unwrap(), Symmetry::SemiSymmetricDsym);
        assert_eq!(classify_symmetry(&asym, &asym).unwrap(), Symmetry::Asymmetric);
        let three = Matrix::zeros(3);
        assert!(matches!(
            classify_symmetry(&sym, &three),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn solution_files() {
        let sol = parse_solution("2 10\n2 1").unwrap();
        assert_eq!(sol.n, 2);
        assert_eq!(sol.objective, 10.0);
        assert_eq!(sol.permutation, vec![1, 0]);
        assert!(matches!(
            parse_solution("3 5\n1 1 2"),
            Err(Error::NotAPermutation { .. })
        ));
        assert!(matches!(
            parse_solution("3 5\n1 2"),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
