//! Dense-network stack for the navigation policies: forward/backward passes
//! for weighted-sum + ReLU layers, a softmax policy head, Adam, and a
//! bit-exact checkpoint format. Everything is 64-bit and deterministic.

mod checkpoint;
mod net;
mod optim;
mod policy;
pub mod rng;

pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, Checkpoint,
    CheckpointMeta,
};
pub use net::{toy_dnn, Activation, DenseNet, ForwardTrace, Gradients, Layer};
pub use optim::AdamState;
pub use policy::{
    argmax_tie_lowest, entropy, log_softmax, sample_index, softmax, PolicyBundle, HIDDEN_DIMS,
};

use thiserror::Error;

/// Shape and dimension errors.
#[derive(Debug, Error)]
pub enum NetError {
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Checkpoint I/O errors.
#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint i/o: {0}")]
    Io(String),
    #[error("checkpoint format: {0}")]
    Format(String),
    #[error("checkpoint topology: {0}")]
    Topology(String),
}
