//! Verification suites over the `chevalley` library: configuration,
//! dispatch, and JSON/CSV/text reports.

mod config;
mod explain;
mod report;
mod suite;

pub use config::{Command, Format, RunConfig};
pub use explain::{claim, explain};
pub use report::{emit_report, parse_report, Check, Provenance, Status, SuiteReport, SCHEMA_VERSION};
pub use suite::{
    run_suite, CONNECTED_SHARE, ENVELOPE_AGREEMENT, INVARIANCE_TOL, MAX_REFINEMENT_CHANGE,
    MAX_VALUE_GAP, SCALING_AGREEMENT,
};

use chevalley::Error;

/// Process exit code for an error: 1 failed check, 2 usage or unsupported
/// input, 3 integrity, 4 convergence.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Verification(_) => 1,
        Error::Usage(_) | Error::Capability(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::Integrity(_) => 3,
        Error::Convergence(_) => 4,
    }
}
