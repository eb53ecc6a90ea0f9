//! Exact derivatives of network outputs with respect to spatio-temporal
//! coordinates, and gradients of scalar losses with respect to network
//! parameters.
//!
//! Spatial derivatives come from forward-propagated truncated Taylor jets
//! (with a first-order tangent in time); parameter gradients come from a
//! reverse-accumulation tape underneath the jets. The two compose: a loss may
//! consume jet coefficients and still backpropagate exactly to parameters.

mod coord;
mod fd;
mod grad;
mod jet;
mod scalar;
mod tape;

pub use coord::{
    coordinate_inputs, coordinate_jet, parameter_gradient, CoordScalar, CoordinateJet, DiffError,
    ParamSpan, ParameterGradient,
};
pub use fd::{
    central_derivative, fd_gradient, fd_jet_check, max_gradient_deviation, relative_deviation,
    FdReport, FdSteps,
};
pub use grad::{Grad, MAX_TANGENTS};
pub use jet::{Jet, MAX_JET_LEN};
pub use scalar::{BaseScalar, NetScalar, Scalar};
pub use tape::{Backprop, Tape, TapeMark, Var};
