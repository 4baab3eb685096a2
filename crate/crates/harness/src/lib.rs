//! Experiment reproductions, bundled datasets and the `dcc` command line.

pub mod cli;
pub mod datasets;
pub mod experiments;
pub mod histogram;
pub mod report;
