//! Command-line front end for `whichpath-core`: configuration files,
//! subcommands and output formats.

pub mod commands;
pub mod config;
pub mod output;
