//! Definite quadratic lattices over `A = F_q[t]`: reduction, successive
//! minima, representation numbers, local invariants and theta series.

pub mod algebra;
pub mod error;
pub mod fieldsums;
pub mod isometry;
pub mod localdata;
pub mod qform;
pub mod spectrum;
pub mod theta;

pub use error::{Error, Result};
