//! Command-line front end: job configs, the `run` pipeline, reports and the
//! built-in self-test.

pub mod config;
pub mod report;
pub mod run;
pub mod selftest;
