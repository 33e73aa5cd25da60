//! Exact computations in the Hopf algebras `H_4n`, their duals, and their weak
//! variants: structure maps, R-matrix, indecomposable modules and Green rings.

pub mod algebra;
pub mod coalgebra;
pub mod error;
pub mod green;
pub mod linalg;
pub mod quasitriangular;
pub mod report;
pub mod representation;
pub mod scalar;

pub use error::{Error, Result};
