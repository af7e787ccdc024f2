//! File formats and the `envcontour` command-line tool on top of
//! [`envcontour_core`].

pub mod cli;
pub mod error;
pub mod formats;
pub mod svg;
pub mod units;

pub use envcontour_core as core;
pub use error::{AppError, AppResult};
