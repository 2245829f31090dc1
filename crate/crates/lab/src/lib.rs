//! File formats, growth measurement, the acceptance suite and the command
//! line for `interlace-core`.

pub mod acceptance;
pub mod cli;
pub mod formats;
pub mod growth;
