pub mod bridges;
pub mod error;
pub mod expcli;
pub mod kernels;
pub mod parallel;
pub mod pathsim;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
