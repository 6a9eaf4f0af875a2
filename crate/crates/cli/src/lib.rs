//! State files, verification suites and reports behind the `monogamy`
//! binary.

// `!(x <= tol)` is deliberate: NaN must fail tolerance checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compute;
pub mod report;
pub mod statefile;
pub mod suites;

pub use report::{emit_report, Format, ReportRow};
pub use statefile::{parse_state_file, serialize_state, State, StateFileError};
pub use suites::{run_suite, Suite, SuiteOutcome, SuiteParams};
