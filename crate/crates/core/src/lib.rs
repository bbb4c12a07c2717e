//! Spectral toolkit for the drift Laplacian `Δu + ⟨ν, ∇u⟩`.
//!
//! Analytic spectra of model geometries, P1 finite elements with the weighted
//! measure `e^{⟨ν,X⟩} dv`, a generalized symmetric eigensolver, and an engine that
//! evaluates universal eigenvalue inequalities as signed margins.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::too_many_arguments,
    clippy::type_complexity
)]

pub mod bounds;
pub mod config;
pub mod eigensolve;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod report;
pub mod scenario;
pub mod spectra;

pub use error::{Error, Result};

/// Crate version recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
