//! Energy-consistent neural operators.
//!
//! This crate learns solution operators of Hamiltonian and dissipative
//! PDEs/ODEs from trajectory data. Two networks are trained jointly: an
//! *operator net* mapping a discretized input function and a query point to
//! the solution value, and an *energy net* modeling the system's energy
//! density. A gradient-flow penalty ties them together: the operator's time
//! derivative is pushed toward `G dH/du`, the flow generated by the learned
//! energy functional through a known differential operator `G`, which makes
//! the predicted dynamics conserve or dissipate energy the way the physical
//! system does.
//!
//! Module map:
//!
//! * [`diffengine`] — coordinate Taylor jets over a reverse-mode parameter
//!   tape; all derivatives in the crate are exact.
//! * [`networks`] — the MLP-based operator net, energy net, and DeepONet
//!   baseline, plus checkpointing.
//! * [`energetics`] — variational derivatives, gradient flows, and
//!   energy/mass integrals for learned and closed-form densities.
//! * [`training`] — the joint loss (data + penalty), query-point sampling,
//!   Adam, early stopping, and the lambda grid search.
//! * [`datagen`] — structure-preserving reference trajectories for the
//!   benchmark systems (KdV, Cahn-Hilliard, three Hamiltonian oscillators).
//! * [`evaluation`] — super-resolution metrics, multi-seed experiment
//!   matrices, and SVG rendering.

pub mod datagen;
pub mod diffengine;
pub mod energetics;
pub mod evaluation;
pub mod networks;
pub mod seeding;
pub mod training;
