//! Configuration, orchestration and report emission for the hgcalc
//! verification suite.

pub mod config;
pub mod emit;
pub mod error;
pub mod suite;

pub use config::{Format, SuiteConfig, SHIPPED_GROUPS};
pub use emit::{emit_report, from_json, to_csv, to_json, to_markdown, write_report, CSV_HEADER};
pub use error::CliError;
pub use suite::{run_suite, Summary, SuiteReport};

/// Exit code of a finished run: 0 when nothing failed or errored.
pub fn exit_code(summary: &Summary) -> i32 {
    if summary.ok() {
        0
    } else {
        1
    }
}
