//! Command-line front end for `torfill-core`: argument parsing, report
//! rendering and exit codes.

pub mod cli;
pub mod parse;
pub mod report;

pub use cli::{run, Outcome, RunConfig};
pub use report::{Format, Report};
