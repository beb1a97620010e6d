//! One-pass evaluation of every neighbour's objective change.
//!
//! With `q = Q x`, the gain vector `g` is `q` off the support minus the support
//! value of the same block, and `-q` on the support. Each row's approximate
//! gradient is then `g[z3] + g[z4]`; adding `Q(z3,z4) + Q(z4,z3)` makes it
//! exact (up to the factor 2) when at least one instance matrix is symmetric.

use crate::error::{Error, Result};
use crate::feasible::BinarySolution;
use crate::neighbourhood::FullNeighbourhood;
use crate::qubo::QOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum GradientMode {
    /// `g[z3] + g[z4]` only.
    Approximate,
    /// Adds `Q(z3,z4) + Q(z4,z3)`; rejected on asymmetric instances.
    Exact,
    /// Adds `Q(z3,z4) + Q(z1,z2)`; exact for every symmetry class.
    ExactGeneral,
}

impl GradientMode {
    pub fn name(self) -> &'static str {
        match self {
            GradientMode::Approximate => "approx",
            GradientMode::Exact => "exact",
            GradientMode::ExactGeneral => "exact-general",
        }
    }

    pub fn is_exact(self) -> bool {
        self != GradientMode::Approximate
    }
}

impl std::fmt::Display for GradientMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GradientMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "approx" | "approximate" => Ok(GradientMode::Approximate),
            "exact" => Ok(GradientMode::Exact),
            "exact-general" | "general" => Ok(GradientMode::ExactGeneral),
            other => Err(Error::InvalidConfig(format!("unknown gradient mode {other:?}"))),
        }
    }
}

/// Per-row values, aligned with the neighbourhood rows. Twice a value is the
/// objective change in the exact modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector {
    pub values: Vec<f64>,
    pub mode: GradientMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainDecomposition {
    /// `Q x`
    pub q: Vec<f64>,
    /// `(Q x) * (1 - x)`
    pub gplus: Vec<f64>,
    /// Support values of `Q x` repeated across each block.
    pub gminus: Vec<f64>,
    /// `gplus - gminus`
    pub g: Vec<f64>,
}

fn check_dims(q: &QOperator, x: &BinarySolution) -> Result<()> {
    if q.n() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: q.n(),
            actual: x.n(),
        });
    }
    Ok(())
}

fn check_mode(q: &QOperator, mode: GradientMode) -> Result<()> {
    if mode == GradientMode::Exact && !q.symmetry().has_symmetric_factor() {
        return Err(Error::ModeUnsupportedForInstance {
            mode: "exact",
            class: q.symmetry().to_string(),
        });
    }
    Ok(())
}

pub fn gain_vector(q: &QOperator, x: &BinarySolution) -> Result<GainDecomposition> {
    check_dims(q, x)?;
    let n = x.n();
    let mut qx = vec![0.0; n * n];
    q.matvec_permutation(&x.to_permutation(), &mut qx);
    let supp = x.support();
    let bits = x.bits();
    let gplus: Vec<f64> = qx
        .iter()
        .zip(bits)
        .map(|(&v, &b)| if b == 1 { 0.0 } else { v })
        .collect();
    let gminus: Vec<f64> = (0..n * n).map(|i| qx[supp[i / n]]).collect();
    let g = gplus.iter().zip(&gminus).map(|(p, m)| p - m).collect();
    Ok(GainDecomposition {
        q: qx,
        gplus,
        gminus,
        g,
    })
}

fn check_aligned(nb: &FullNeighbourhood, len: usize) -> Result<()> {
    if len != nb.n() * nb.n() {
        return Err(Error::IndexMisalignment {
            gradient: len,
            rows: nb.n() * nb.n(),
        });
    }
    Ok(())
}

pub fn approximate_gradient(nb: &FullNeighbourhood, gd: &GainDecomposition) -> Result<GradientVector> {
    check_aligned(nb, gd.g.len())?;
    let values = nb.rows().iter().map(|r| gd.g[r.z3] + gd.g[r.z4]).collect();
    Ok(GradientVector {
        values,
        mode: GradientMode::Approximate,
    })
}

/// `E_i = Q(z3,z4) + Q(z4,z3)` per row.
pub fn error_corrector(nb: &FullNeighbourhood, q: &QOperator) -> Vec<f64> {
    nb.rows()
        .iter()
        .map(|r| q.entry(r.z3, r.z4) + q.entry(r.z4, r.z3))
        .collect()
}

/// Correction added to the approximate value of one row.
#[inline]
fn correction(q: &QOperator, mode: GradientMode, z1: usize, z2: usize, z3: usize, z4: usize) -> f64 {
    match mode {
        GradientMode::Approximate => 0.0,
        GradientMode::Exact => q.entry(z3, z4) + q.entry(z4, z3),
        GradientMode::ExactGeneral => q.entry(z3, z4) + q.entry(z1, z2),
    }
}

pub fn evaluate_full_neighbourhood(
    x: &BinarySolution,
    nb: &FullNeighbourhood,
    q: &QOperator,
    mode: GradientMode,
) -> Result<GradientVector> {
    check_mode(q, mode)?;
    let gd = gain_vector(q, x)?;
    let mut out = approximate_gradient(nb, &gd)?;
    if mode.is_exact() {
        for (v, r) in out.values.iter_mut().zip(nb.rows()) {
            *v += correction(q, mode, r.z1, r.z2, r.z3, r.z4);
        }
    }
    out.mode = mode;
    Ok(out)
}

/// Mean over rows of `E_i / max(1, gplus[z3] + gplus[z4])`.
pub fn relative_error(gd: &GainDecomposition, nb: &FullNeighbourhood, e: &[f64]) -> f64 {
    if nb.is_empty() {
        return 0.0;
    }
    let total: f64 = nb
        .rows()
        .iter()
        .zip(e)
        .map(|(r, &ei)| ei / (gd.gplus[r.z3] + gd.gplus[r.z4]).max(1.0))
        .sum();
    total / nb.len() as f64
}

/// Reusable buffers for the search loop: computes `Q x` and the gain vector
/// in place, then the row values for the requested mode.
#[derive(Debug, Clone)]
pub struct GradientEngine {
    qx: Vec<f64>,
    g: Vec<f64>,
    sigma: Vec<usize>,
}

impl GradientEngine {
    pub fn new(n: usize) -> Self {
        GradientEngine {
            qx: vec![0.0; n * n],
            g: vec![0.0; n * n],
            sigma: vec![0; n],
        }
    }

    pub fn check_mode(q: &QOperator, mode: GradientMode) -> Result<()> {
        check_mode(q, mode)
    }

    /// Fill `out` with one value per row.
    pub fn evaluate(
        &mut self,
        q: &QOperator,
        x: &BinarySolution,
        nb: &FullNeighbourhood,
        mode: GradientMode,
        out: &mut Vec<f64>,
    ) {
        let n = x.n();
        let supp = x.support();
        for (s, &z) in self.sigma.iter_mut().zip(supp) {
            *s = z % n;
        }
        q.matvec_permutation(&self.sigma, &mut self.qx);
        for (block, &s) in supp.iter().enumerate() {
            let base = self.qx[s];
            let range = block * n..(block + 1) * n;
            for (g, &v) in self.g[range.clone()].iter_mut().zip(&self.qx[range]) {
                *g = v - base;
            }
            self.g[s] = -base;
        }
        out.clear();
        let g = &self.g;
        match mode {
            GradientMode::Approximate => out.extend(nb.rows().iter().map(|r| g[r.z3] + g[r.z4])),
            _ => out.extend(
                nb.rows()
                    .iter()
                    .map(|r| g[r.z3] + g[r.z4] + correction(q, mode, r.z1, r.z2, r.z3, r.z4)),
            ),
        }
    }

    /// Gain vector from the last call to [`GradientEngine::evaluate`].
    pub fn gain(&self) -> &[f64] {
        &self.g
    }

    /// `Q x` from the last call to [`GradientEngine::evaluate`].
    pub fn qx(&self) -> &[f64] {
        &self.qx
    }

    /// Objective change of accepting `row`, using the last evaluated gain.
    pub fn true_difference(&self, q: &QOperator, nb: &FullNeighbourhood, row: usize) -> f64 {
        let r = nb.row(row);
        2.0 * (self.g[r.z3] + self.g[r.z4] + q.entry(r.z3, r.z4) + q.entry(r.z1, r.z2))
    }

    /// Relative error of the last evaluated state.
    pub fn relative_error(&self, q: &QOperator, x: &BinarySolution, nb: &FullNeighbourhood) -> f64 {
        if nb.is_empty() {
            return 0.0;
        }
        let bits = x.bits();
        let gplus = |i: usize| if bits[i] == 1 { 0.0 } else { self.qx[i] };
        let total: f64 = nb
            .rows()
            .iter()
            .map(|r| {
                let e = q.entry(r.z3, r.z4) + q.entry(r.z4, r.z3);
                e / (gplus(r.z3) + gplus(r.z4)).max(1.0)
            })
            .sum();
        total / nb.len() as f64
    }
}
