//! Batch harness over definite ternary (and binary, quaternary) forms:
//! exhaustive or sampled enumeration by minima pattern, bucketing by
//! audible invariants, isometry classification and spectrum escalation.

pub mod config;
pub mod enumerate;
pub mod error;
pub mod harness;

pub use config::SearchConfig;
pub use error::{HarnessError, Result};
pub use harness::{search_isospectral, verify_theorems, Finding, VerificationReport};
