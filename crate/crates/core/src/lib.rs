//! Distribution, moments and Monte-Carlo validation of the normalized
//! dissimilarity ratio `D = |X - Y| / (X + Y)` for two correlated Gamma
//! intensities built from correlated circular complex Gaussian fields.

pub mod dist;
pub mod error;
pub mod quad;
pub mod sampling;
pub mod specfun;
pub mod validate;

pub use error::{Error, Result};
