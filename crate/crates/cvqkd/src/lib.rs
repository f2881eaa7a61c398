//! File formats, configuration, parallel Monte-Carlo drivers and the
//! `cvqkd` command-line front end for [`cvqkd_core`].
//!
//! Each subcommand is available as a library function in [`commands`]
//! taking a fully resolved configuration; the binary only parses flags,
//! merges them over the optional TOML config file and writes the results.

pub mod cli;
pub mod commands;
pub mod config;
mod error;
pub mod formats;
pub mod output;
pub mod parallel;

pub use error::{Error, Result};
