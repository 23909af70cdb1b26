//! Command-line front end: configuration, JSON/text reports and drawings
//! around the `ergm-core` pipeline.

pub mod commands;
pub mod config;
pub mod draw;
pub mod error;
pub mod report;
