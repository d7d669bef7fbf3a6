//! Probes for the representational limits of single-vector embedding
//! retrieval.

pub mod error;
pub mod free_embed;
pub mod limit;
pub mod metrics;
pub mod qrel;
pub mod retrieval;
pub mod sweep;

pub use error::{Error, Result};
