//! Energy densities: closed forms for the benchmark systems and the learned
//! network density behind one shared evaluation interface.

use crate::diffengine::{BaseScalar, NetScalar};
use crate::networks::EnergyNet;

/// An energy density `F(u, d_x u, ..)` (or a Hamiltonian `H(q, p)` for ODE
/// systems, which is the zero-derivative-order case).
///
/// `B` is the parameter base ring (`f64`, or tape variables during training);
/// evaluation happens in any ring `S` over it, which is what lets one
/// definition serve quadrature, discrete variational derivatives, and the
/// jet-based continuous ones. Inputs are order-major:
/// `(u_1..u_M, d_x u_1..d_x u_M, ..)`.
pub trait EnergyDensity<B: BaseScalar> {
    /// Highest spatial derivative of `u` the density consumes.
    fn diff_order(&self) -> usize;

    /// Number of state components M.
    fn components(&self) -> usize;

    fn input_dim(&self) -> usize {
        self.components() * (self.diff_order() + 1)
    }

    fn eval_in<S: NetScalar<B>>(&self, args: &[S]) -> S;
}

/// Closed-form densities and Hamiltonians used for data generation and
/// evaluation (never for training).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrueEnergy {
    /// `F(u, u_x) = u^3 - (1/2) u_x^2`
    Kdv,
    /// `F(u, u_x) = (1/4) u^4 - (1/2) u^2 + (gamma/2) u_x^2`
    CahnHilliard { gamma: f64 },
    /// `H(q, p) = (1/2) k q^2 + p^2 / (2m)`
    MassSpring { k: f64, m: f64 },
    /// `H(q, p) = m g l (1 - cos q) + p^2 / (2 m l^2)`
    Pendulum { m: f64, g: f64, l: f64 },
    /// `H(q, p) = (1/2) p^2 + (alpha/2) q^2 + (beta/4) q^4`
    Duffing { alpha: f64, beta: f64 },
}

impl TrueEnergy {
    fn order(&self) -> usize {
        match self {
            TrueEnergy::Kdv | TrueEnergy::CahnHilliard { .. } => 1,
            _ => 0,
        }
    }

    fn m(&self) -> usize {
        match self {
            TrueEnergy::Kdv | TrueEnergy::CahnHilliard { .. } => 1,
            _ => 2,
        }
    }
}

impl<B: BaseScalar> EnergyDensity<B> for TrueEnergy {
    fn diff_order(&self) -> usize {
        self.order()
    }

    fn components(&self) -> usize {
        self.m()
    }

    fn eval_in<S: NetScalar<B>>(&self, args: &[S]) -> S {
        debug_assert_eq!(args.len(), self.m() * (self.order() + 1));
        match *self {
            TrueEnergy::Kdv => {
                let (u, ux) = (&args[0], &args[1]);
                u.powi(3).sub(&ux.powi(2).scale(0.5))
            }
            TrueEnergy::CahnHilliard { gamma } => {
                let (u, ux) = (&args[0], &args[1]);
                u.powi(4)
                    .scale(0.25)
                    .sub(&u.powi(2).scale(0.5))
                    .add(&ux.powi(2).scale(gamma / 2.0))
            }
            TrueEnergy::MassSpring { k, m } => {
                let (q, p) = (&args[0], &args[1]);
                q.powi(2).scale(k / 2.0).add(&p.powi(2).scale(0.5 / m))
            }
            TrueEnergy::Pendulum { m, g, l } => {
                let (q, p) = (&args[0], &args[1]);
                q.cos()
                    .neg()
                    .add_const(1.0)
                    .scale(m * g * l)
                    .add(&p.powi(2).scale(0.5 / (m * l * l)))
            }
            TrueEnergy::Duffing { alpha, beta } => {
                let (q, p) = (&args[0], &args[1]);
                p.powi(2)
                    .scale(0.5)
                    .add(&q.powi(2).scale(alpha / 2.0))
                    .add(&q.powi(4).scale(beta / 4.0))
            }
        }
    }
}

/// An [`EnergyNet`] bound to a parameter vector in base ring `B` (its own
/// `f64` weights, or lifted tape variables during training).
pub struct LearnedEnergy<'a, B> {
    net: &'a EnergyNet,
    params: &'a [B],
}

impl<'a, B: BaseScalar> LearnedEnergy<'a, B> {
    pub fn new(net: &'a EnergyNet, params: &'a [B]) -> Self {
        assert_eq!(params.len(), net.param_count());
        Self { net, params }
    }
}

impl<'a> LearnedEnergy<'a, f64> {
    /// Binds the network to its own stored weights.
    pub fn from_net(net: &'a EnergyNet) -> Self {
        Self::new(net, net.core().params())
    }
}

impl<'a, B: BaseScalar> EnergyDensity<B> for LearnedEnergy<'a, B> {
    fn diff_order(&self) -> usize {
        self.net.diff_order()
    }

    fn components(&self) -> usize {
        self.net.components()
    }

    fn eval_in<S: NetScalar<B>>(&self, args: &[S]) -> S {
        self.net
            .eval_in(self.params, args)
            .expect("caller supplies input_dim args")
    }
}
