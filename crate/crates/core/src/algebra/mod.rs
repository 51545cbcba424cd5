//! Exact arithmetic over ℚ(√5): scalars, sparse polynomials, polynomial
//! matrices and group averaging.

mod matrix;
mod poly;
mod reynolds;
mod scalar;

pub use matrix::{poly_det, PolyMatrix, ScalarMatrix, MAX_EXACT_DET};
pub use poly::{monomials_of_degree, poly_arith, FloatPoly, Monomial, PolyOp, SparsePoly};
pub(crate) use poly::power_table;
pub use reynolds::{is_invariant, reynolds_average};
pub use scalar::{format_rational, parse_rational, Scalar};
