//! DeepONet baseline: prediction is the inner product of a branch embedding
//! of the sensor values and a trunk embedding of the query point.

use crate::diffengine::NetScalar;
use crate::seeding::derive_seed;

use super::mlp::{forward_in, Mlp, NetError};
use super::operator::IoNorm;

/// Branch and trunk nets both end in `out_dim * latent` units; component `m`
/// of the prediction is the dot product of block `m` of the two embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct DeepOnet {
    sensor_count: usize,
    coord_dim: usize,
    out_dim: usize,
    latent: usize,
    branch: Mlp,
    trunk: Mlp,
    norm: IoNorm,
}

/// Per-sample branch embedding, reused across that sample's query points.
#[derive(Clone, Debug)]
pub struct BranchStem<V> {
    embedding: Vec<V>,
}

impl DeepOnet {
    pub fn new(
        sensor_count: usize,
        coord_dim: usize,
        hidden: &[usize],
        out_dim: usize,
        latent: usize,
    ) -> Self {
        let mut bsizes = vec![sensor_count];
        bsizes.extend_from_slice(hidden);
        bsizes.push(out_dim * latent);
        let mut tsizes = vec![coord_dim];
        tsizes.extend_from_slice(hidden);
        tsizes.push(out_dim * latent);
        Self {
            sensor_count,
            coord_dim,
            out_dim,
            latent,
            branch: Mlp::new(&bsizes),
            trunk: Mlp::new(&tsizes),
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

    pub fn latent(&self) -> usize {
        self.latent
    }

    pub fn branch(&self) -> &Mlp {
        &self.branch
    }

    pub fn trunk(&self) -> &Mlp {
        &self.trunk
    }

    pub fn branch_mut(&mut self) -> &mut Mlp {
        &mut self.branch
    }

    pub fn trunk_mut(&mut self) -> &mut Mlp {
        &mut self.trunk
    }

    pub fn norm(&self) -> &IoNorm {
        &self.norm
    }

    pub fn set_norm(&mut self, norm: IoNorm) {
        assert_eq!(norm.coord_shift.len(), self.coord_dim);
        assert_eq!(norm.out_shift.len(), self.out_dim);
        self.norm = norm;
    }

    /// Total trainable parameters (branch then trunk in the flat layout).
    pub fn param_count(&self) -> usize {
        self.branch.param_count() + self.trunk.param_count()
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = self.branch.params().to_vec();
        p.extend_from_slice(self.trunk.params());
        p
    }

    pub fn set_params(&mut self, params: &[f64]) {
        let nb = self.branch.param_count();
        self.branch.set_params(&params[..nb]);
        self.trunk.set_params(&params[nb..]);
    }

    pub fn init_weights(&mut self, seed: u64) {
        self.branch.init_weights(derive_seed(seed, "deeponet-branch"));
        self.trunk.init_weights(derive_seed(seed, "deeponet-trunk"));
    }

    /// Branch embedding of one sample's (normalized) sensor values.
    /// `params` is the flat branch+trunk vector.
    pub fn branch_stem<V: Copy + NetScalar<V>>(
        &self,
        params: &[V],
        a_bar: &[f64],
    ) -> Result<BranchStem<V>, NetError> {
        if a_bar.len() != self.sensor_count {
            return Err(NetError::Shape {
                what: "deeponet sensor input",
                expected: self.sensor_count,
                got: a_bar.len(),
            });
        }
        let like = params[0];
        let input: Vec<V> = a_bar
            .iter()
            .map(|&a| like.constant_like((a - self.norm.sensor_shift) * self.norm.sensor_scale))
            .collect();
        let nb = self.branch.param_count();
        Ok(BranchStem {
            embedding: forward_in(self.branch.sizes(), &params[..nb], &input),
        })
    }

    /// Trunk pass plus the per-component inner products.
    pub fn eval_from_stem<V: Copy, S: NetScalar<V>>(
        &self,
        params: &[V],
        stem: &BranchStem<V>,
        y: &[S],
    ) -> Vec<S> {
        debug_assert_eq!(y.len(), self.coord_dim);
        let yn: Vec<S> = y
            .iter()
            .enumerate()
            .map(|(d, yd)| {
                yd.add_const(-self.norm.coord_shift[d])
                    .scale(self.norm.coord_scale[d])
            })
            .collect();
        let nb = self.branch.param_count();
        let trunk_out = forward_in(self.trunk.sizes(), &params[nb..], &yn);
        (0..self.out_dim)
            .map(|m| {
                let base = m * self.latent;
                let mut acc = trunk_out[base].mul_param(stem.embedding[base]);
                for q in 1..self.latent {
                    acc = acc.add(&trunk_out[base + q].mul_param(stem.embedding[base + q]));
                }
                acc.scale(self.norm.out_scale[m]).add_const(self.norm.out_shift[m])
            })
            .collect()
    }

    pub fn eval<V: Copy + NetScalar<V>, S: NetScalar<V>>(
        &self,
        params: &[V],
        a_bar: &[f64],
        y: &[S],
    ) -> Result<Vec<S>, NetError> {
        let stem = self.branch_stem(params, a_bar)?;
        Ok(self.eval_from_stem(params, &stem, y))
    }

    pub fn eval_f64(&self, a_bar: &[f64], y: &[f64]) -> Result<Vec<f64>, NetError> {
        self.eval(&self.params(), a_bar, y)
    }
}
