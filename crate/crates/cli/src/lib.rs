//! Command-line front end for `uhlmann-core`.
//!
//! The binary logic lives in this library so integration tests can drive the
//! full parse → execute → render pipeline in-process; `main` only forwards
//! `argv` and applies the exit code.

pub mod commands;
pub mod io;

pub use commands::run;
