//! File formats, parallel experiment drivers and the command-line front end
//! for [`hspace_core`].
//!
//! Library users mostly need [`io`] (edge lists, coordinate and result
//! tables) and [`experiment`] (method lists, thread-parallel repetitions).
//! The `hspace` binary is a thin wrapper around [`cli::run`].

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;

pub use error::{CliError, Result};
pub use hspace_core;
