#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod admissible;
pub mod chars;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod phase;
pub mod rootsys;
pub mod smatrix;
pub mod walg;
pub mod weyl;

pub use error::{Error, Result};
