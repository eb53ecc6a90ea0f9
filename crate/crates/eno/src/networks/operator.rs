//! The operator net `S_theta[a](y)`: an MLP over the concatenation of the
//! discretized input function and the query coordinates.

use serde::{Deserialize, Serialize};

use crate::diffengine::{NetScalar, Scalar};
use crate::seeding::derive_seed;

use super::mlp::{affine_layer, Mlp, NetError};

/// Fixed affine input/output maps, estimated once from the training split and
/// stored with the checkpoint. The coordinate map is part of the recorded
/// expression, so coordinate jets account for it automatically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IoNorm {
    pub coord_shift: Vec<f64>,
    pub coord_scale: Vec<f64>,
    pub sensor_shift: f64,
    pub sensor_scale: f64,
    pub out_shift: Vec<f64>,
    pub out_scale: Vec<f64>,
}

impl IoNorm {
    pub fn identity(coord_dim: usize, out_dim: usize) -> Self {
        Self {
            coord_shift: vec![0.0; coord_dim],
            coord_scale: vec![1.0; coord_dim],
            sensor_shift: 0.0,
            sensor_scale: 1.0,
            out_shift: vec![0.0; out_dim],
            out_scale: vec![1.0; out_dim],
        }
    }
}

/// Per-sample precomputation: the first-layer contribution of the sensor
/// values plus bias. It is constant across query points, so a sample's many
/// queries share it.
#[derive(Clone, Debug)]
pub struct Stem<V> {
    hidden: Vec<V>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorNet {
    sensor_count: usize,
    coord_dim: usize,
    out_dim: usize,
    core: Mlp,
    norm: IoNorm,
}

impl OperatorNet {
    /// `coord_dim` is 2 for PDEs (query `(t, x)`) and 1 for ODEs (query `t`).
    pub fn new(sensor_count: usize, coord_dim: usize, hidden: &[usize], out_dim: usize) -> Self {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(sensor_count + coord_dim);
        sizes.extend_from_slice(hidden);
        sizes.push(out_dim);
        Self {
            sensor_count,
            coord_dim,
            out_dim,
            core: Mlp::new(&sizes),
            norm: IoNorm::identity(coord_dim, out_dim),
        }
    }

    pub fn sensor_count(&self) -> usize {
        self.sensor_count
    }

    pub fn coord_dim(&self) -> usize {
        self.coord_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn core(&self) -> &Mlp {
        &self.core
    }

    pub fn core_mut(&mut self) -> &mut Mlp {
        &mut self.core
    }

    pub fn norm(&self) -> &IoNorm {
        &self.norm
    }

    pub fn set_norm(&mut self, norm: IoNorm) {
        assert_eq!(norm.coord_shift.len(), self.coord_dim);
        assert_eq!(norm.out_shift.len(), self.out_dim);
        self.norm = norm;
    }

    pub fn param_count(&self) -> usize {
        self.core.param_count()
    }

    pub fn init_weights(&mut self, seed: u64) {
        self.core.init_weights(derive_seed(seed, "operator"));
    }

    fn check_sensors(&self, got: usize) -> Result<(), NetError> {
        if got != self.sensor_count {
            return Err(NetError::Shape {
                what: "operator sensor input",
                expected: self.sensor_count,
                got,
            });
        }
        Ok(())
    }

    /// First-layer contribution of a sample's sensor values (normalized) plus
    /// bias, at parameter level.
    pub fn stem<V: Copy + Scalar>(&self, params: &[V], a_bar: &[f64]) -> Result<Stem<V>, NetError> {
        self.check_sensors(a_bar.len())?;
        let sizes = self.core.sizes();
        let (n_in, n_out) = (sizes[0], sizes[1]);
        let bias_off = n_in * n_out;
        let hidden = (0..n_out)
            .map(|j| {
                let row = j * n_in;
                let mut acc = params[bias_off + j];
                for (i, &a) in a_bar.iter().enumerate() {
                    let scaled = (a - self.norm.sensor_shift) * self.norm.sensor_scale;
                    acc = acc.mul_const_add(scaled, &params[row + i]);
                }
                acc
            })
            .collect();
        Ok(Stem { hidden })
    }

    /// Completes the forward pass for one query point given the sample stem.
    /// `y` has `coord_dim` entries; the result has `out_dim`.
    pub fn eval_from_stem<V: Copy, S: NetScalar<V>>(
        &self,
        params: &[V],
        stem: &Stem<V>,
        y: &[S],
    ) -> Vec<S> {
        debug_assert_eq!(y.len(), self.coord_dim);
        let sizes = self.core.sizes();
        let (n_in, n_out) = (sizes[0], sizes[1]);

        // Finish layer 1: stem + coordinate columns, then tanh.
        let mut activ: Vec<S> = (0..n_out)
            .map(|j| {
                let row = j * n_in + self.sensor_count;
                let mut acc = S::from_param(stem.hidden[j], &y[0]);
                for (d, yd) in y.iter().enumerate() {
                    let yn = yd
                        .add_const(-self.norm.coord_shift[d])
                        .scale(self.norm.coord_scale[d]);
                    acc = acc.add(&yn.mul_param(params[row + d]));
                }
                acc.tanh()
            })
            .collect();

        // Remaining layers.
        let mut off = (n_in + 1) * n_out;
        let last = sizes.len() - 2;
        for (l, w) in sizes.windows(2).enumerate().skip(1) {
            let (n_in, n_out) = (w[0], w[1]);
            let mut pre = affine_layer(params, off, n_in, n_out, &activ);
            if l < last {
                for a in &mut pre {
                    *a = a.tanh();
                }
            }
            activ = pre;
            off += (n_in + 1) * n_out;
        }

        // De-standardize outputs.
        activ
            .into_iter()
            .enumerate()
            .map(|(m, z)| z.scale(self.norm.out_scale[m]).add_const(self.norm.out_shift[m]))
            .collect()
    }

    /// One-shot evaluation `u = S_theta[a](y)`.
    pub fn eval<V: Copy + Scalar, S: NetScalar<V>>(
        &self,
        params: &[V],
        a_bar: &[f64],
        y: &[S],
    ) -> Result<Vec<S>, NetError> {
        let stem = self.stem(params, a_bar)?;
        Ok(self.eval_from_stem(params, &stem, y))
    }

    /// Plain evaluation with the network's own parameters.
    pub fn eval_f64(&self, a_bar: &[f64], y: &[f64]) -> Result<Vec<f64>, NetError> {
        self.eval(self.core.params(), a_bar, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pde_input_dimension_arithmetic() {
        let net = OperatorNet::new(10, 2, &[16], 1);
        assert_eq!(net.core().input_dim(), 12);
    }

    #[test]
    fn ode_input_dimension_arithmetic() {
        // a_bar = (q0, p0), y = t
        let net = OperatorNet::new(2, 1, &[16], 2);
        assert_eq!(net.core().input_dim(), 3);
    }

    #[test]
    fn eval_is_deterministic() {
        let mut net = OperatorNet::new(4, 2, &[8, 8], 1);
        net.init_weights(11);
        let a = [0.1, -0.4, 0.7, 0.2];
        let y = [0.3, 5.0];
        let u1 = net.eval_f64(&a, &y).unwrap();
        let u2 = net.eval_f64(&a, &y).unwrap();
        assert_eq!(u1[0].to_bits(), u2[0].to_bits());
    }

    #[test]
    fn stem_path_equals_direct_forward() {
        // Splitting layer 1 into sensor and coordinate parts is exact:
        // compare against the monolithic MLP on the concatenated input.
        let mut net = OperatorNet::new(3, 2, &[8, 8], 1);
        net.init_weights(5);
        let a = [0.4, -0.2, 0.9];
        let y = [0.25, 1.5];
        let direct = net
            .core()
            .forward(&[a[0], a[1], a[2], y[0], y[1]])
            .unwrap();
        let via_stem = net.eval_f64(&a, &y).unwrap();
        assert_relative_eq!(direct[0], via_stem[0], epsilon = 1e-15);
    }

    #[test]
    fn sensor_count_checked() {
        let net = OperatorNet::new(3, 2, &[4], 1);
        assert!(net.eval_f64(&[1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn norm_roundtrip_is_affine_in_output() {
        let mut net = OperatorNet::new(2, 1, &[4], 1);
        net.init_weights(2);
        let raw = net.eval_f64(&[0.5, 0.1], &[0.3]).unwrap()[0];
        let mut norm = IoNorm::identity(1, 1);
        norm.out_shift = vec![2.0];
        norm.out_scale = vec![3.0];
        net.set_norm(norm);
        let scaled = net.eval_f64(&[0.5, 0.1], &[0.3]).unwrap()[0];
        assert_relative_eq!(scaled, 2.0 + 3.0 * raw, epsilon = 1e-14);
    }
}
