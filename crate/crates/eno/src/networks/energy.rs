//! The energy net `F_phi(u, d_x u, ..)`: a scalar-output MLP over the state
//! components and their spatial derivatives up to a configured order.

use crate::diffengine::NetScalar;
use crate::seeding::derive_seed;

use super::mlp::{forward_in, Mlp, NetError};

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyNet {
    diff_order: usize,
    components: usize,
    core: Mlp,
}

impl EnergyNet {
    /// `diff_order` is the highest spatial derivative of `u` fed in; the input
    /// layout is order-major: `(u_1..u_M, d_x u_1..d_x u_M, ..)`.
    pub fn new(components: usize, diff_order: usize, hidden: &[usize]) -> Self {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(components * (diff_order + 1));
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        Self {
            diff_order,
            components,
            core: Mlp::new(&sizes),
        }
    }

    pub fn diff_order(&self) -> usize {
        self.diff_order
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn input_dim(&self) -> usize {
        self.components * (self.diff_order + 1)
    }

    pub fn core(&self) -> &Mlp {
        &self.core
    }

    pub fn core_mut(&mut self) -> &mut Mlp {
        &mut self.core
    }

    pub fn param_count(&self) -> usize {
        self.core.param_count()
    }

    pub fn init_weights(&mut self, seed: u64) {
        self.core.init_weights(derive_seed(seed, "energy"));
    }

    /// Scalar density value in any ring over the parameter base type.
    pub fn eval_in<V: Copy, S: NetScalar<V>>(&self, params: &[V], args: &[S]) -> Result<S, NetError> {
        if args.len() != self.input_dim() {
            return Err(NetError::Shape {
                what: "energy net input",
                expected: self.input_dim(),
                got: args.len(),
            });
        }
        Ok(forward_in(self.core.sizes(), params, args).remove(0))
    }

    pub fn eval_f64(&self, args: &[f64]) -> Result<f64, NetError> {
        self.eval_in(self.core.params(), args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_net_with_bias_is_constant() {
        let mut net = EnergyNet::new(1, 1, &[4]);
        let n = net.param_count();
        net.core_mut().params_mut()[n - 1] = 2.5; // output bias
        assert_eq!(net.eval_f64(&[0.3, -1.0]).unwrap(), 2.5);
        assert_eq!(net.eval_f64(&[5.0, 0.4]).unwrap(), 2.5);
    }

    #[test]
    fn first_order_scalar_density_takes_two_inputs() {
        let net = EnergyNet::new(1, 1, &[8]);
        assert_eq!(net.input_dim(), 2);
        assert!(net.eval_f64(&[1.0]).is_err());
    }

    #[test]
    fn seeded_net_matches_hand_arithmetic() {
        let mut net = EnergyNet::new(1, 1, &[2]);
        net.init_weights(21);
        let p = net.core().params().to_vec();
        let (u, ux) = (1.0, 0.0);
        let h0 = (p[0] * u + p[1] * ux + p[4]).tanh();
        let h1 = (p[2] * u + p[3] * ux + p[5]).tanh();
        let expect = p[6] * h0 + p[7] * h1 + p[8];
        assert_relative_eq!(net.eval_f64(&[u, ux]).unwrap(), expect, epsilon = 1e-15);
    }
}
