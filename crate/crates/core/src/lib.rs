//! Convex environmental contours for general, possibly non-stationary,
//! environmental processes.
//!
//! The crate is `no_std` (it needs `alloc`). Math goes through `libm`, so
//! simulated paths and estimates are bit-reproducible for a given seed.

#![no_std]

extern crate alloc;

pub mod calibration;
pub mod contour;
pub mod error;
pub mod geometry;
pub mod hitting;
pub mod linalg;
pub mod math;
pub mod par;
pub mod process;
pub mod quadrature;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{HalfSpace, Point, Polygon, SupportGrid, UnitVector};
