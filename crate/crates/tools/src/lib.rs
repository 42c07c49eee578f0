//! File formats, vehicle configuration, time synchronization and the batch
//! command-line front end for [`c2model`].
//!
//! Every command builds its complete output in memory ([`cli::Outputs`]) and
//! only writes once the whole pipeline has succeeded.

pub mod cli;
pub mod config;
pub mod csvio;
pub mod error;
pub mod format;
pub mod report;
pub mod sync;

pub use error::{ToolError, ToolResult};
