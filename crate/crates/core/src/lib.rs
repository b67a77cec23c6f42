//! Classical optics of a Fabry-Pérot cavity loaded with an optical lattice of
//! ultracold atoms that acts as an effective Bragg mirror.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic_mirror;
pub mod cavity_network;
pub mod cli_io;
pub mod error;
pub mod parallel;
pub mod resonances;

pub use error::{Error, Result};
