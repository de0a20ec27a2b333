//! Command-line front end for `collapse-core`: run configuration, JSON file
//! formats for structures, catalogues and build schedules, deterministic
//! reports, and the shipped self-test fixtures.

pub mod cli;
pub mod config;
pub mod format;
pub mod report;
pub mod selftest;

pub use cli::{execute, run, Cli, Command};
