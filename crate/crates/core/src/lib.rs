pub mod cli;
pub mod error;
pub mod eval;
pub mod graph;
pub mod linalg;
pub mod model;
pub mod ot;
pub mod train;

pub use error::{Error, Result};
