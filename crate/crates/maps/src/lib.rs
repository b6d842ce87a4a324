//! Command line, sweep files and reports for `grazing-core`.

pub mod cli;
pub mod error;
pub mod load;
pub mod plot;
pub mod report;
pub mod sweep;
