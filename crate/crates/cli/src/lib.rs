//! Experiment harness for the chirality-discrimination simulator: scenario
//! configs, figure-style subcommands, sweep/ensemble execution, CSV/SVG
//! outputs. The `sim` binary is a thin dispatcher over this library.

pub mod commands;
pub mod config;
pub mod output;
