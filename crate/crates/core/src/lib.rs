//! Sliding-mode tracking of moving isolines of a scalar field by a
//! unicycle with constant speed and a bounded turn rate.

// `!(x > 0.0)` guards are intentional: they reject NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod error;
pub mod field;
pub mod geometry;
pub mod scenario;
pub mod sim;
pub mod vehicle;
pub mod verify;

pub use error::{Error, Result};
