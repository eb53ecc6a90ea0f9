//! The differential operator `G` that turns a variational derivative into a
//! gradient flow. Skew-symmetric choices conserve the energy functional,
//! negative (semi) definite ones dissipate it.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiffOperator {
    /// `G = d/dx` (skew-symmetric under periodic boundary): KdV class.
    SkewFirstDeriv,
    /// `G = d^2/dx^2` (negative semi-definite): Cahn-Hilliard class.
    SecondDeriv,
    /// `G = [[0, 1], [-1, 0]]`: canonical Hamiltonian ODEs.
    SymplecticMatrix,
    /// `G = -I`: plain ODE dissipation.
    NegIdentity,
}

impl DiffOperator {
    /// Spatial differentiation order the operator adds on top of the
    /// variational derivative.
    pub fn spatial_order(self) -> usize {
        match self {
            DiffOperator::SkewFirstDeriv => 1,
            DiffOperator::SecondDeriv => 2,
            DiffOperator::SymplecticMatrix | DiffOperator::NegIdentity => 0,
        }
    }

    /// Conservative (skew-symmetric) operators keep `H` constant along the
    /// flow; the others are dissipative.
    pub fn is_conservative(self) -> bool {
        matches!(
            self,
            DiffOperator::SkewFirstDeriv | DiffOperator::SymplecticMatrix
        )
    }

    pub fn is_spatial(self) -> bool {
        self.spatial_order() > 0
    }
}
