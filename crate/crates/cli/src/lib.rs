//! Command-line orchestration for the cone-lab numerics: identity suites,
//! Wallach scans, Monte Carlo verification, witness searches and reports.

pub mod cli;
pub mod config;
pub mod mcverify;
pub mod merge;
pub mod par;
pub mod report;
pub mod scan;
pub mod suites;
