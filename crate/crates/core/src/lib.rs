#![no_std]
extern crate alloc;

pub mod charpoly;
pub mod criteria;
pub mod error;
pub mod ratio;
pub mod recurrence;
pub mod scalar;

pub use error::{Error, Result};
pub use recurrence::{InitialConditions, Mode, Recurrence};
pub use scalar::{ApproxComplex, ExactComplex, Scalar};
