//! Library surface of the `fibra` command-line tool: spec parsing, the
//! command registry, report types, and the matrix-exponential demo.

pub mod commands;
pub mod expm;
pub mod report;
pub mod spec;

pub use commands::{CliError, Command, CommandContext, CommandRegistry};
pub use report::Report;
pub use spec::{parse_spec, parse_spec_path, ParseError, SpecDocument};
