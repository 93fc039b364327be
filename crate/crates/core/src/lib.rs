//! Path development layers on matrix Lie groups.
//!
//! The crate is organised bottom-up:
//!
//! - [`matexp`]: dense square matrices, the matrix exponential and its differential;
//! - [`liealg`]: Lie-algebra families, projections, group tests and trainable weights;
//! - [`sigpath`]: discrete paths and truncated signatures;
//! - [`devlayer`]: the development layer's forward and backward passes;
//! - [`train`]: losses, optimizers, synthetic datasets and the training loop.

pub mod devlayer;
pub mod error;
pub mod liealg;
pub mod matexp;
pub mod sigpath;
pub mod train;

pub use error::{Error, Result};
