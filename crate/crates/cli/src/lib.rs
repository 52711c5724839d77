//! Command-line front end: TOML problem specs in, JSON reports out.

pub mod cli;
pub mod commands;
pub mod report;
pub mod spec;
