pub mod cli;
pub mod error;
pub mod geometry;
pub mod green;
pub mod inequalities;
pub mod kernel_analysis;
pub mod laplace;
pub mod representations;
pub mod special;
mod vecops;

pub use error::{Error, Result};
