//! Root systems, reflection groups, fundamental chambers and their faces.

mod group;
mod roots;
mod strata;
mod types;

pub use group::{generate_group, generate_group_f64};
pub use roots::{build_root_system, RootSystem, RootSystemDump};
pub use strata::{enumerate_strata, isotropy_reflections, locate_stratum, sample_stratum, Stratum};
pub use types::{coxeter_number, degrees, CoxeterType};
