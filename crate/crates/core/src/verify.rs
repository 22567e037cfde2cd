//! Numerical oracles and the verification report.

mod derivative;
mod report;
mod suites;

pub use derivative::{one_sided_derivative, rotation_number, two_sequence_spread, Approach, DerivativeEstimate};
pub use report::{Check, Status, SuiteResult, VerificationReport};
pub use suites::{run_suite, Suite};
