//! Library side of the `siginv` command: file formats, subcommand bodies
//! and the benchmark harness.

pub mod bench;
pub mod commands;
pub mod error;
pub mod io;

pub use error::{CliError, Result};

/// Environment variable holding the worker thread count; `1` runs
/// everything sequentially.
pub const THREADS_ENV: &str = "SIGINV_THREADS";
