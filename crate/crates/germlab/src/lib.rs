//! File formats, JSON reports and the `germlab` command-line front-end
//! for `germlab-core`.

pub mod cli;
pub mod format;
pub mod report;
pub mod spec;

pub use cli::{run, Cli, Outcome};
pub use spec::{parse_spec, parse_spec_str, Spec, SpecError};
