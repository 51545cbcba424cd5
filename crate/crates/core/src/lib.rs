//! Chevalley maps of finite reflection groups.
//!
//! Exact invariant construction over ℚ(√5), Jacobian factorization and
//! rank stratification, numerical probes of the fibres of the truncated
//! maps `P_k`, and empirical Whitney 1-regularity estimates for the image
//! of a closed ball.

pub mod algebra;
pub mod error;

pub use error::{Error, Result};
pub mod coxeter;
pub mod invariants;
pub mod jacobian;
pub mod probe;
pub mod regularity;
pub mod rng;
