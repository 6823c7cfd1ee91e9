//! Config parsing, the run driver and the bound report behind the
//! `mpcgs-cli` binary.

pub mod bound_table;
pub mod config;
pub mod run;

pub use bound_table::{bound_table, BoundTable, Verdict};
pub use config::{ConfigError, RunConfig};
pub use run::{run, Manifest, RunOutcome};
