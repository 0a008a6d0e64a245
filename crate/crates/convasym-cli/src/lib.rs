//! Library side of the `convasym` binary: argument types, command bodies,
//! output rendering, and the verification suites. Kept as a lib so the
//! integration tests can drive commands in-process.

pub mod commands;
pub mod record;
pub mod verify;

pub use commands::{run_sampling, Cli, CliError, Command};
