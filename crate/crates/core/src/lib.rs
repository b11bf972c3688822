//! Instance generators for the multicommodity capacitated fixed-charge
//! network design problem and its two-stage stochastic counterpart.

pub mod error;
pub mod feasibility;
pub mod hkw;
pub mod io;
pub mod model;
pub mod moments;
pub mod detgen;
pub mod prng;

pub use error::{Error, Result};
