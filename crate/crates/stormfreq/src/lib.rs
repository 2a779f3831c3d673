//! File formats, configuration and the command-line front end for
//! [`stormfreq_core`].

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod seriesio;

pub use error::{Error, Result};
pub use stormfreq_core as core;
