//! Local search for the quadratic assignment problem that stays inside the
//! feasible binary space.
//!
//! A permutation is encoded as the column stack of its permutation matrix.
//! Every swap of two assignments is a flip of four bits, and the objective
//! change of all `n (n - 1) / 2` swaps is read off a single matrix-vector
//! product with the Kronecker-product QUBO matrix.

pub mod baseline;
pub mod bench;
pub mod cli;
pub mod error;
pub mod feasible;
pub mod fetch;
pub mod gradient;
pub mod heuristics;
pub mod instance;
pub mod neighbourhood;
pub mod qubo;
pub mod search;

pub use error::{Error, Result};
