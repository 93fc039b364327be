//! Discrete paths, truncated signatures and the canonical extension linking
//! signatures to developments.

mod series;
mod signature;

pub use series::{add_time, increments, TimeSeries};
pub use signature::{
    chen_product, extend_functional, sig_dim, sig_linear_segment, signature, TruncSig, MAX_DEPTH,
    MAX_LEVEL_SIZE,
};
