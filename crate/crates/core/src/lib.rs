// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(feature = "cli")]
pub mod cli;
pub mod control;
pub mod decoherence;
pub mod defaults;
pub mod device;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod readout;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
