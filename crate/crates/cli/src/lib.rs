//! Command-line front end for `nfib-core`, plus the OEIS client.

pub mod commands;
pub mod config;
pub mod family;
pub mod oeis;
pub mod report;

pub use commands::run;
