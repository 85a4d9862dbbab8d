//! Bigraded dual Steenrod algebroids over F2 and the homological algebra
//! around them: the classical, C2-equivariant, real motivic and complex
//! motivic duals, the realization map from the classical dual, comodules
//! and quotient comodules, and degreewise complexes over `M = F2[rho, tau]`.

pub mod algebra;
pub mod comodules;
pub mod error;
pub mod grading;
pub mod ground;
pub mod homological;
pub mod hopf;
pub mod linalg;
pub mod maps;
pub mod module;
pub mod parse;
pub mod report;

pub use error::{Error, Result};
pub use grading::{Bidegree, Window};
