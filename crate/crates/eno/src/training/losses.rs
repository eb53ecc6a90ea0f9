//! The two loss terms and their composition.
//!
//! `data_loss` is the nested mean-squared error over samples and their
//! observation points. `penalty` measures the squared mismatch between the
//! operator's time derivative and the gradient flow of the learned energy
//! functional at query points. Both have a plain `f64` evaluation path, used
//! for validation, diagnostics, and tests; the trainer re-derives the same
//! quantities on the tape for gradients, and the two paths agree exactly.

use thiserror::Error;

use crate::diffengine::{BaseScalar, Grad, Jet};
use crate::energetics::{gradient_flow, required_jet_order, DiffOperator, EnergeticsError, LearnedEnergy};
use crate::networks::{EnergyNet, NetError, OperatorNet, Predictor, Stem};

#[derive(Debug, Error)]
pub enum LossError {
    #[error("empty batch")]
    EmptyBatch,
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Energetics(#[from] EnergeticsError),
}

/// One input-output function pair: sensor values of the input function,
/// observation coordinates, and observed solution values.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub a_bar: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
}

/// Mean over samples of the mean over observation points of the squared
/// Euclidean error.
pub fn data_loss(model: &Predictor, batch: &[&Sample]) -> Result<f64, LossError> {
    if batch.is_empty() {
        return Err(LossError::EmptyBatch);
    }
    let mut acc = 0.0;
    for sample in batch {
        let preds = model.eval_many(&sample.a_bar, &sample.points)?;
        let mut per_sample = 0.0;
        for (u_hat, u_obs) in preds.iter().zip(sample.targets.iter()) {
            per_sample += u_hat
                .iter()
                .zip(u_obs.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
        }
        acc += per_sample / sample.points.len() as f64;
    }
    Ok(acc / batch.len() as f64)
}

/// Operator-net output expanded in the coordinates at one query point:
/// the time derivative per component, and the spatial jets the gradient flow
/// needs. For ODE systems (`coord_dim == 1`) the jets have order zero.
pub fn operator_jets_at<B: BaseScalar>(
    op: &OperatorNet,
    params: &[B],
    stem: &Stem<B>,
    y: &[f64],
    x_order: usize,
    seeds: (B, B),
) -> (Vec<B>, Vec<Jet<B>>) {
    let (t_leaf, x_leaf) = seeds;
    let coords: Vec<Jet<Grad<B>>> = if op.coord_dim() == 2 {
        vec![
            Jet::constant(Grad::seed(t_leaf, 1, 0), x_order),
            Jet::variable(Grad::constant(x_leaf, 1), x_order),
        ]
    } else {
        vec![Jet::constant(Grad::seed(t_leaf, 1, 0), 0)]
    };
    debug_assert_eq!(coords.len(), y.len());
    let out = op.eval_from_stem(params, stem, &coords);
    let u_dot: Vec<B> = out.iter().map(|j| *j.coeff(0).tangent(0)).collect();
    let u_jets: Vec<Jet<B>> = out.iter().map(|j| j.map(|g| g.re)).collect();
    (u_dot, u_jets)
}

/// Squared residual `|| du/dt - G dH/du ||^2` for one sample at one query
/// point, in any base ring (f64 for evaluation, tape variables for training).
pub fn penalty_residual_sq<B: BaseScalar>(
    op: &OperatorNet,
    op_params: &[B],
    stem: &Stem<B>,
    energy: &EnergyNet,
    energy_params: &[B],
    g: DiffOperator,
    y: &[f64],
    seeds: (B, B),
) -> Result<B, LossError> {
    let density = LearnedEnergy::new(energy, energy_params);
    let order = required_jet_order(&density, g);
    let (u_dot, u_jets) = operator_jets_at(op, op_params, stem, y, order, seeds);
    let flow = gradient_flow(g, &density, &u_jets)?;
    let mut acc: Option<B> = None;
    for (ud, fl) in u_dot.iter().zip(flow.iter()) {
        let r = ud.sub(fl);
        let sq = r.mul(&r);
        acc = Some(match acc {
            None => sq,
            Some(a) => a.add(&sq),
        });
    }
    Ok(acc.expect("at least one component"))
}

/// Mean over batch samples of the mean over query points of the squared
/// gradient-flow residual (plain evaluation path).
pub fn penalty(
    op: &OperatorNet,
    energy: &EnergyNet,
    g: DiffOperator,
    batch: &[&Sample],
    query_points: &[Vec<f64>],
) -> Result<f64, LossError> {
    if batch.is_empty() || query_points.is_empty() {
        return Err(LossError::EmptyBatch);
    }
    let op_params = op.core().params();
    let en_params = energy.core().params();
    let mut acc = 0.0;
    for sample in batch {
        let stem = op.stem(op_params, &sample.a_bar)?;
        let mut per_sample = 0.0;
        for y in query_points {
            let seeds = (y[0], if y.len() > 1 { y[1] } else { 0.0 });
            per_sample +=
                penalty_residual_sq(op, op_params, &stem, energy, en_params, g, y, seeds)?;
        }
        acc += per_sample / query_points.len() as f64;
    }
    Ok(acc / batch.len() as f64)
}

/// `data_loss + lambda * penalty`.
pub fn eno_loss(data: f64, lambda: f64, penalty: f64) -> f64 {
    data + lambda * penalty
}
