#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod cli_io;
pub mod ed1d;
pub mod error;
pub mod format;
pub mod gutzwiller;
pub mod observables;
pub mod operator;
pub mod optics;
pub mod phasemap;
pub mod wannier;

pub use error::{Error, Result};
