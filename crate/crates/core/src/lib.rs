pub mod boundary;
pub mod error;
pub mod fixtures;
pub mod gauge;
pub mod graph;
pub mod homology;
pub mod linalg;
pub mod phase;
pub mod potential;
pub mod spectral;
pub mod svd;

pub use error::{Error, Result};
