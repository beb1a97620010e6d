use std::path::PathBuf;

/// Everything that can go wrong inside the solver library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("truncated input: expected {expected} values, found {found}")]
    TruncatedFile { expected: usize, found: usize },
    #[error("malformed matrix data: {0}")]
    NonSquareData(String),
    #[error("non-finite entry at ({row}, {col}) of {matrix}")]
    NonFiniteEntry {
        matrix: &'static str,
        row: usize,
        col: usize,
    },
    #[error("nonzero diagonal entry {value} at index {index} of {matrix}")]
    NonzeroDiagonal {
        matrix: &'static str,
        index: usize,
        value: f64,
    },
    #[error("could not parse token {token:?}: {reason}")]
    Parse { token: String, reason: String },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("sequence is not a permutation of 0..{n}: {detail}")]
    NotAPermutation { n: usize, detail: String },
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("indices {z1} and {z2} share a block or a residue class")]
    SameBlockOrResidue { z1: usize, z2: usize },
    #[error("flip ({z1}, {z2}, {z3}, {z4}) cannot be applied: {reason}")]
    TupleNotApplicable {
        z1: usize,
        z2: usize,
        z3: usize,
        z4: usize,
        reason: &'static str,
    },
    #[error("binary vector is not the column stack of a permutation matrix")]
    InfeasibleSolution,
    #[error("pair ({z1}, {z2}) is not the leading pair of any neighbourhood row")]
    PairNotInNeighbourhood { z1: usize, z2: usize },
    #[error("{mode} evaluation is not valid for {class} instances")]
    ModeUnsupportedForInstance { mode: &'static str, class: String },
    #[error("gradient and neighbourhood are misaligned ({gradient} vs {rows} rows)")]
    IndexMisalignment { gradient: usize, rows: usize },
    #[error("neighbourhood is empty")]
    EmptyNeighbourhood,
    #[error("every candidate move is tabu")]
    AllMovesTabu,
    #[error("all sampled objective differences are zero")]
    DegenerateSamples,
    #[error("incremental objective {incremental} drifted from recomputed {recomputed}")]
    ObjectiveDrift { incremental: f64, recomputed: f64 },
    #[error("no best-known objective available for {0}")]
    MissingBestKnown(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("instance {0:?} not found")]
    NotFound(Vec<String>),
    #[error("network failure fetching {url}: {reason}")]
    NetworkFailure { url: String, reason: String },
    #[error("checksum mismatch for {file}: expected {expected}, got {actual}")]
    ChecksumMismatch {
        file: String,
        expected: String,
        actual: String,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
