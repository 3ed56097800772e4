//! Experiment harness for the `hiernet` command-line tool.

pub mod config;
pub mod experiment;
pub mod files;
pub mod report;
pub mod store;
