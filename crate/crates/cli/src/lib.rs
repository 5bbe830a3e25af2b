//! Command-line front end for `qrel-core`: scenario runner, invariant suite
//! and transform tables.

pub mod error;
pub mod output;
pub mod scenario;
pub mod table;
pub mod verify;

pub use error::{CliError, CliResult};
