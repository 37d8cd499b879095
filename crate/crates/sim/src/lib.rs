//! Configuration, file formats and subcommands of the `recoil-sim` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{Preset, RunConfig};
pub use error::SimError;
