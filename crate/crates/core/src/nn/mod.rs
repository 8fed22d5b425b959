//! Dense and LSTM layers with hand-written backward passes, softmax
//! cross-entropy, Adam, and finite-difference gradient checking.

mod dense;
mod gradcheck;
mod loss;
mod lstm;
mod network;
mod optim;
mod scalar;
mod tensor;

pub use dense::{Activation, Dense, DenseGrads};
pub use gradcheck::{
    gradient_check, relative_error, BlockCheck, DenseObjective, Example, GradCheckReport, LstmObjective,
    NetworkObjective, Objective, REL_ERROR_FLOOR,
};
pub use loss::{softmax_into, softmax_xent};
pub use lstm::{LstmCell, LstmTrace};
pub use network::{NetInput, NetShape, Network, Topology, Workspace};
pub use optim::{Adam, AdamConfig};
pub use scalar::{axpy, dot, sigmoid, Scalar};
pub use tensor::Tensor2;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NnError {
    #[error("shape mismatch in {what}: expected {expected}, found {found}")]
    ShapeMismatch { what: &'static str, expected: usize, found: usize },
}
