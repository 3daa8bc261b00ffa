//! IO, file formats, thread-pool drivers, and the command-line surface for
//! the sparse exponential-sum toolkit. All mathematics lives in `spex-core`;
//! this crate only moves bytes and schedules work.

pub mod cli;
pub mod format;
pub mod parallel;
pub mod scan;
pub mod verify;

mod error;

pub use error::{Error, Result};
pub use spex_core as core;
