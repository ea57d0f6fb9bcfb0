//! Exact computations with polynomial functors and the varieties that live
//! inside them.
//!
//! The crate covers partitions and Littlewood–Richardson coefficients,
//! polynomial functors as formal sums of Schur functors, concrete tensor
//! spaces with flattenings and minimal defining subspaces, determinantal and
//! tensor-rank varieties with Jacobian singularity tests, linear-type bounds,
//! and a weak resolution of determinantal varieties with its local inverse.
//!
//! Linear algebra and tensor evaluation are generic over [`Scalar`]; the
//! aliases below fix the exact rational instantiation used everywhere else.

pub mod error;
pub mod io;
pub mod linalg;
pub mod linear_type;
pub mod partitions;
pub mod polyfun;
pub mod resolution;
pub mod sampling;
pub mod scalar;
pub mod tensor;
pub mod varieties;

pub use error::{Error, Result};
pub use linalg::{Matrix, RowSpace};
pub use linear_type::{FdcBound, LinearTypeProfile};
pub use partitions::Partition;
pub use polyfun::{Degree, DimensionPolynomial, PolynomialFunctor};
pub use resolution::{OmegaPoint, ZPoint};
pub use scalar::Scalar;
pub use tensor::{Atom, SpaceDescriptor, TensorPoint};
pub use varieties::VarietySpec;

/// Arbitrary-precision rational numbers, always in lowest terms.
pub type Rational = num_rational::BigRational;
/// Machine-word rationals; overflow panics.
pub type Rational64 = num_rational::Ratio<i64>;

pub type RationalMatrix = Matrix<Rational>;
pub type Matrix64 = Matrix<f64>;
pub type RationalPoint = TensorPoint<Rational>;
