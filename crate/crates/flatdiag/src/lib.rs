//! File formats and the `flatdiag` command-line tool.
//!
//! The algorithms live in [`flatdiag_core`]; this crate adds everything that
//! touches the filesystem:
//!
//! * point clouds as headerless CSV, one point per row;
//! * persistence diagrams as CSV (`dimension,birth,death`) or JSON;
//! * flat diagrams as CSV (`dimension,birth,persistence`);
//! * the `sample`, `compute`, `plot`, `pipeline` and `reproduce-figures` subcommands.
//!
//! Essential features are written with the literal token `inf` for their death
//! (or persistence). Floats are written in Rust's shortest round-trip form, so
//! reading a file back gives bit-identical values.

pub mod cli;
pub mod formats;

mod error;

pub use error::Error;
pub use flatdiag_core as core;
