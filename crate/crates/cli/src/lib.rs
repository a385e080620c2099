//! Command-line pipeline over feature files: split, oversample, select,
//! evaluate, sweep-r and synth.

pub mod cli;
pub mod commands;
pub mod config;

pub use cli::run;
pub use config::PipelineConfig;
