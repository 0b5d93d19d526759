//! Gaussian-kernel support vector machines on synthetic distributions with
//! analytically known noise geometry.

pub mod approx;
pub mod complexity;
pub mod distributions;
pub mod error;
pub mod fitting;
pub mod geometry;
pub mod kernel;
pub mod noise;
pub mod quad;
pub mod rates;
pub mod seed;
pub mod solver;
pub mod witness;

pub use error::{Error, Result};
