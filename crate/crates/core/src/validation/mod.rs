//! Runners for the acceptance criteria, shared by the test suite and the CLI.

pub mod cases;
mod criteria;

pub use criteria::{layout_of, reference_cylinder, run_criterion, run_suite, CriterionReport, Suite, ValidationReport, CRITERIA};
