//! Exact computations for intrinsic formality of graded algebras.
//!
//! The crate is generic over the scalar [`Field`]; [`Rational`] and the prime
//! fields [`Fp`] are provided. Aliases for the common instantiations live here.

pub mod algebra;
pub mod config;
pub mod error;
pub mod field;
pub mod formality;
pub mod graded;
pub mod hochschild;
pub mod linalg;
pub mod presentation;

pub use algebra::{build_configuration_algebra, truncated_poly, GradedAlgebra, GradedBimodule, Preset};
pub use error::{Error, ErrorKind, Result};
pub use field::{Field, FieldSpec, Fp, Rational};
pub use graded::{DegreeSupport, GradedVectorSpace};
pub use linalg::{ExactMatrix, Subspace};

pub type RationalMatrix = ExactMatrix<Rational>;
pub type RationalAlgebra = GradedAlgebra<Rational>;
pub type F2 = Fp<2>;
pub type F3 = Fp<3>;
pub type F5 = Fp<5>;
pub type F7 = Fp<7>;
