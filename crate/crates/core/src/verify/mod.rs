//! Verification suites over the crate's invariants, with reports that are
//! reproducible from their inputs apart from a separate stamp.

mod report;
mod suites;

pub use report::{CheckResult, Outcome, Stamp, Status, VerificationReport};
pub use suites::{run_suite, Suite};
