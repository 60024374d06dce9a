//! File formats, reporting, the fold pipeline and the `rankfuse` command
//! line, built on [`rankfuse_core`].

pub mod cli;
mod error;
pub mod io;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
