//! Dense matrices and the reverse-mode tape used to train through Sinkhorn loops.

mod matrix;
mod tape;

pub use matrix::Matrix;
pub use tape::{Gradients, Tape, Tensor, DIV_FLOOR};
