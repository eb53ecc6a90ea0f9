//! Trainable function approximators: the operator net, the energy net, and
//! the DeepONet baseline, all built on one minimal MLP.
//!
//! Forward passes are generic over the evaluation ring, so one definition
//! serves plain prediction, coordinate-jet expansion, and tape recording.

mod checkpoint;
mod deeponet;
mod energy;
mod mlp;
mod operator;
mod predictor;

pub use checkpoint::{load_checkpoint, save_checkpoint, AnyNet, CheckpointError};
pub use deeponet::{BranchStem, DeepOnet};
pub use energy::EnergyNet;
pub use mlp::{affine_layer, forward_in, Mlp, NetError};
pub use operator::{IoNorm, OperatorNet, Stem};
pub use predictor::Predictor;
