//! Symbol-calculus engine for complex powers of positive elliptic
//! first-order pseudodifferential operators on flat tori `T^m`, m ∈ {1, 2},
//! with matrix fibers.
//!
//! The crate builds a holomorphic family of classical symbols `A_(s)` with
//! `A_(0) = Id`, principal symbol `σ^s` and group law modulo a degree
//! truncation, by induction over symbol levels with a group-cohomology
//! coboundary solver at each step. From the family it computes trace
//! functions as exact lattice sums under toroidal quantization, their
//! meromorphic continuation with simple poles at `-m, -m+1, …`, and the
//! noncommutative residue over the cosphere bundle, all cross-checked
//! against Galerkin spectral oracles.

pub mod cli;
pub mod cohomology;
pub mod error;
pub mod fiber;
pub mod grid;
pub mod opspec;
pub mod powers;
pub mod quantize;
pub mod symbol;
pub mod zeta;

pub use error::{Result, TorzetaError};
pub use fiber::{C64, FiberMatrix, PdMatrix};
