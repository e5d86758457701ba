//! Library side of the `logent` command-line tool: the matrix file format,
//! report documents and the command implementations.

#![forbid(unsafe_code)]

pub mod commands;
pub mod error;
pub mod matrix_file;
pub mod report;

pub use commands::{Context, Outcome, Selector};
pub use error::CliError;
pub use matrix_file::{format_matrix_file, parse_matrix_file, StateFile, DEFAULT_MAX_DIM};
pub use report::ReportDocument;
