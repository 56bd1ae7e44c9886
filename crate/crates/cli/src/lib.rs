//! Command-line front end for `nodal-core`: JSON run configurations, a
//! small flag set mirroring them, and CSV/JSON outputs.
//!
//! Exit status is 0 when every hard invariant and scaling check passed, 2
//! when one was violated, and 1 on errors.

pub mod args;
pub mod config;
mod run;

pub use args::Cli;
pub use config::{Command, FieldConfig, Member, ModelName, RandomConfig, ResolutionConfig, RunConfig, TermConfig, WeightConfig};
pub use run::{emit_plotdata, run, Outcome, BANACH_SLACK, DEFAULT_OUT_DIR};
