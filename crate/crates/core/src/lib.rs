//! Numerical checks of sharp pointwise derivative estimates in the Fock
//! spaces F^p_α: function representation, Gaussian-weight quadrature,
//! exact and quadrature norms, sharp constants, weighted-shift operators and
//! the suites that tie them together.

pub mod error;
pub mod exec;
pub mod focknorm;
pub mod funcrep;
pub mod lang;
pub mod operators;
pub mod quad;
pub mod report;
pub mod sample;
pub mod sharp;
pub mod specfun;
pub mod suites;

pub use error::{FockError, Result};
