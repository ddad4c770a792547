//! Search, verification and benchmarking of common-variance (CV) and
//! approximate common-variance (A-ComVar) fractional factorial designs.
//!
//! - [`design`]: problems, candidate points, candidate models, model matrices
//! - [`variance`]: dispersions, objective `f(d; phi)` and the ratio `r_ACV`
//! - [`ga`]: steady-state genetic algorithm search
//! - [`exhaustive`]: exact census of all `n`-subsets of a full factorial
//! - [`catalog`]: fold-over series, reference designs, projection check
//! - [`selection`]: adaptive-lasso model identification simulation

pub mod catalog;
pub mod design;
pub mod error;
pub mod exact;
pub mod exhaustive;
pub mod ga;
pub mod selection;
pub mod variance;

pub use design::{Design, DesignProblem, FactorSpec, ModelClass, ModelMatrix, ModelSpec};
pub use error::{Error, Result};
pub use variance::{evaluate, FitnessReport};
