//! Exact computations with weight-filtered curved absolute L∞-algebras.
//!
//! Everything is over ℚ and truncated by weight. The modules build on each
//! other roughly in the order listed: tree combinatorics and linear algebra,
//! polynomial forms on simplices and the Dupont contraction, homotopy transfer
//! to simplicial cochains, generic algebra evaluation, the Maurer–Cartan
//! cosimplicial algebra, models of simplicial sets and convolution algebras.

pub mod algebra;
pub mod cli;
pub mod convolution;
pub mod dupont;
pub mod free;
pub mod integration;
pub mod lie;
pub mod linalg;
pub mod models;
pub mod transfer;
pub mod tree;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("arity error: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("not a Maurer-Cartan element: {0}")]
    NotMaurerCartan(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use linalg::Q;
