//! Functional derivatives of the (learned or true) energy functional, the
//! gradient flows obtained by applying the system's differential operator,
//! and energy/mass integrals.

mod density;
mod diffop;
mod quadrature;
mod variational;

pub use density::{EnergyDensity, LearnedEnergy, TrueEnergy};
pub use diffop::DiffOperator;
pub use quadrature::{
    d1_apply, d2_apply, discrete_energy, energy_integral, energy_rate, grid_density_args,
    mass_integral, uniform_spacing,
};
pub use variational::{gradient_flow, required_jet_order, variational_derivative, EnergeticsError};
