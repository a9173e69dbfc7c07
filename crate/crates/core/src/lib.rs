//! Multigene symbolic regression.
//!
//! Models are weighted sums of evolved expression trees ("genes") plus a bias
//! term. Gene weights are estimated by SVD pseudo-inverse least squares, the
//! trees themselves are evolved with multigene genetic programming, and the
//! resulting populations can be mined with Pareto reports, filters, gene
//! catalogs and REC curves.

pub mod analyze;
pub mod data;
pub mod error;
pub mod evolve;
pub mod expr;
pub mod regress;
pub mod simplify;

pub use error::{Error, Result};
