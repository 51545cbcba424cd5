//! Basic invariants `p₁, …, pₙ` of each supported group and evaluation of
//! the Chevalley map `P = (p₁, …, pₙ)` and its truncations `P_k`.

mod basis;
mod build;
mod store;

pub use basis::{chevalley_eval, InvariantBasis, NumericBasis};
pub use build::{
    basic_invariants, basic_invariants_with, closed_form, reynolds_basis, verify_invariance,
    verify_invariance_f64, BuildOptions, DOrdering,
};
pub use store::{basis_hash, load_basis_file, write_basis_file, BasisFile};
