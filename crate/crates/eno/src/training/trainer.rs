//! Joint optimization of the operator net and the energy net.
//!
//! One epoch is one optimization iteration: draw a mini-batch, draw query
//! points, assemble `data_loss + lambda * penalty` on the tape, update both
//! parameter sets with their own Adam states and learning rates, then score
//! the validation split. Early stopping restores the best-validation
//! parameters.
//!
//! Gradients are accumulated one loss term at a time (one backward sweep per
//! sample for the data term, per sample-query pair for the penalty), which
//! keeps the tape small and is exactly the gradient of the averaged loss.

use std::time::Instant;

use rand::seq::index::sample as index_sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffengine::{Backprop, Scalar, Tape, Var};
use crate::networks::{DeepOnet, EnergyNet, IoNorm, NetError, OperatorNet, Predictor};
use crate::seeding::rng_for;

use super::adam::{adam_step, AdamState};
use super::config::{Method, PenaltyMode, TrainConfig};
use super::losses::{data_loss, penalty_residual_sq, LossError, Sample};
use super::sampler::{sample_query_points, Domain};
use crate::energetics::DiffOperator;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("training and validation splits must be non-empty")]
    EmptyData,
    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Diverged { epoch: usize },
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// What the penalty needs to know about the physical system.
#[derive(Clone, Copy, Debug)]
pub struct PenaltySystem {
    pub g: DiffOperator,
    pub domain: Domain,
}

#[derive(Clone, Debug, Default)]
pub struct TrainData {
    pub train: Vec<Sample>,
    pub val: Vec<Sample>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub data_loss: f64,
    pub penalty: f64,
    pub val_loss: f64,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub predictor: Predictor,
    pub energy: Option<EnergyNet>,
    pub log: Vec<EpochRecord>,
    pub best_val: f64,
    pub best_epoch: usize,
}

/// Everything needed to continue a run exactly where it stopped.
#[derive(Clone, Serialize, Deserialize)]
pub struct TrainState {
    pub epoch: usize,
    pub theta: Vec<f64>,
    pub phi: Option<Vec<f64>>,
    pub adam_theta: AdamState,
    pub adam_phi: Option<AdamState>,
    pub rng_batch: ChaCha8Rng,
    pub rng_query: ChaCha8Rng,
    pub best_val: f64,
    pub best_epoch: usize,
    pub best_theta: Vec<f64>,
    pub best_phi: Option<Vec<f64>>,
    pub stall: usize,
}

/// Writes the training log as CSV.
pub fn write_log_csv(path: &std::path::Path, log: &[EpochRecord]) -> std::io::Result<()> {
    use std::io::Write;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "epoch,train_loss,data_loss,penalty,val_loss,wall_seconds")?;
    for r in log {
        writeln!(
            f,
            "{},{},{},{},{},{}",
            r.epoch, r.train_loss, r.data_loss, r.penalty, r.val_loss, r.wall_seconds
        )?;
    }
    Ok(())
}

fn sensor_stats(samples: &[Sample]) -> (f64, f64) {
    let mut n = 0usize;
    let mut mean = 0.0;
    for s in samples {
        for &a in &s.a_bar {
            n += 1;
            mean += a;
        }
    }
    mean /= n.max(1) as f64;
    let mut var = 0.0;
    for s in samples {
        for &a in &s.a_bar {
            var += (a - mean) * (a - mean);
        }
    }
    let std = (var / n.max(1) as f64).sqrt();
    (mean, if std > 1e-12 { std } else { 1.0 })
}

fn target_stats(samples: &[Sample], out_dim: usize) -> (Vec<f64>, Vec<f64>) {
    let mut n = 0usize;
    let mut mean = vec![0.0; out_dim];
    for s in samples {
        for u in &s.targets {
            n += 1;
            for (m, &v) in u.iter().enumerate() {
                mean[m] += v;
            }
        }
    }
    for m in &mut mean {
        *m /= n.max(1) as f64;
    }
    let mut var = vec![0.0; out_dim];
    for s in samples {
        for u in &s.targets {
            for (m, &v) in u.iter().enumerate() {
                var[m] += (v - mean[m]) * (v - mean[m]);
            }
        }
    }
    let std = var
        .iter()
        .map(|v| {
            let s = (v / n.max(1) as f64).sqrt();
            if s > 1e-12 {
                s
            } else {
                1.0
            }
        })
        .collect();
    (mean, std)
}

/// Input/output standardization estimated from the training split and the
/// domain: coordinates map to [-1, 1], sensors and targets to zero mean and
/// unit variance.
pub fn norm_from_data(domain: &Domain, samples: &[Sample], out_dim: usize) -> IoNorm {
    let coord_dim = domain.coord_dim();
    let mut norm = IoNorm::identity(coord_dim, out_dim);
    norm.coord_shift[0] = 0.5 * (domain.t.0 + domain.t.1);
    norm.coord_scale[0] = 2.0 / (domain.t.1 - domain.t.0);
    if let Some((x0, x1)) = domain.x {
        norm.coord_shift[1] = 0.5 * (x0 + x1);
        norm.coord_scale[1] = 2.0 / (x1 - x0);
    }
    let (s_mean, s_std) = sensor_stats(samples);
    norm.sensor_shift = s_mean;
    norm.sensor_scale = 1.0 / s_std;
    let (t_mean, t_std) = target_stats(samples, out_dim);
    norm.out_shift = t_mean;
    norm.out_scale = t_std;
    norm
}

struct Shapes {
    sensor_count: usize,
    coord_dim: usize,
    out_dim: usize,
}

fn check_shapes(data: &TrainData) -> Result<Shapes, TrainError> {
    if data.train.is_empty() || data.val.is_empty() {
        return Err(TrainError::EmptyData);
    }
    let first = &data.train[0];
    if first.points.is_empty() || first.targets.len() != first.points.len() {
        return Err(TrainError::Config("sample without observations".into()));
    }
    Ok(Shapes {
        sensor_count: first.a_bar.len(),
        coord_dim: first.points[0].len(),
        out_dim: first.targets[0].len(),
    })
}

/// Deduplicated union of all training observation coordinates, in a
/// deterministic order (the fixed-query pool).
fn fixed_query_pool(samples: &[Sample]) -> Vec<Vec<f64>> {
    let mut pool: Vec<Vec<f64>> = samples.iter().flat_map(|s| s.points.iter().cloned()).collect();
    pool.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    pool.dedup();
    pool
}

/// Trains from scratch.
pub fn train(
    cfg: &TrainConfig,
    method: Method,
    data: &TrainData,
    system: &PenaltySystem,
) -> Result<TrainOutcome, TrainError> {
    train_resumable(cfg, method, data, system, None).map(|(outcome, _)| outcome)
}

/// Trains, optionally continuing from a saved state; returns the outcome and
/// the final state (suitable for a later resume).
pub fn train_resumable(
    cfg: &TrainConfig,
    method: Method,
    data: &TrainData,
    system: &PenaltySystem,
    resume: Option<TrainState>,
) -> Result<(TrainOutcome, TrainState), TrainError> {
    cfg.validate().map_err(TrainError::Config)?;
    let shapes = check_shapes(data)?;
    let norm = norm_from_data(&system.domain, &data.train, shapes.out_dim);

    let penalty_active = method.uses_penalty() && cfg.lambda > 0.0;
    let penalty_mode = method.penalty_mode().unwrap_or(cfg.penalty_mode);

    // Architectures. The energy net exists only when the penalty is active:
    // with lambda = 0 it would receive no gradient signal at all.
    let mut operator = if method == Method::Deeponet {
        None
    } else {
        let mut op = OperatorNet::new(
            shapes.sensor_count,
            shapes.coord_dim,
            &cfg.operator_hidden,
            shapes.out_dim,
        );
        op.set_norm(norm.clone());
        op.init_weights(cfg.seed);
        Some(op)
    };
    let mut deeponet = if method == Method::Deeponet {
        let mut net = DeepOnet::new(
            shapes.sensor_count,
            shapes.coord_dim,
            &cfg.deeponet_hidden,
            shapes.out_dim,
            cfg.deeponet_latent,
        );
        net.set_norm(norm);
        net.init_weights(cfg.seed);
        Some(net)
    } else {
        None
    };
    let mut energy = if penalty_active {
        let mut en = EnergyNet::new(shapes.out_dim, cfg.energy_diff_order, &cfg.energy_hidden);
        en.init_weights(cfg.seed);
        Some(en)
    } else {
        None
    };

    let theta_len = operator
        .as_ref()
        .map(|o| o.param_count())
        .or_else(|| deeponet.as_ref().map(|d| d.param_count()))
        .unwrap();
    let phi_len = energy.as_ref().map(|e| e.param_count()).unwrap_or(0);

    let mut adam_theta = AdamState::new(theta_len);
    let mut adam_phi = AdamState::new(phi_len);
    let mut rng_batch = rng_for(cfg.seed, "batch");
    let mut rng_query = rng_for(cfg.seed, "query");

    let mut start_epoch = 0usize;
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0usize;
    let mut best_theta: Vec<f64> = Vec::new();
    let mut best_phi: Option<Vec<f64>> = None;
    let mut stall = 0usize;

    if let Some(state) = resume {
        if state.theta.len() != theta_len || state.phi.as_ref().map_or(0, Vec::len) != phi_len {
            return Err(TrainError::Config(
                "resume state does not match the configured architecture".into(),
            ));
        }
        if let Some(op) = operator.as_mut() {
            op.core_mut().set_params(&state.theta);
        }
        if let Some(net) = deeponet.as_mut() {
            net.set_params(&state.theta);
        }
        if let (Some(en), Some(phi)) = (energy.as_mut(), state.phi.as_ref()) {
            en.core_mut().set_params(phi);
        }
        adam_theta = state.adam_theta;
        if let Some(s) = state.adam_phi {
            adam_phi = s;
        }
        rng_batch = state.rng_batch;
        rng_query = state.rng_query;
        start_epoch = state.epoch;
        best_val = state.best_val;
        best_epoch = state.best_epoch;
        best_theta = state.best_theta;
        best_phi = state.best_phi;
        stall = state.stall;
    }

    let fixed_pool = if penalty_active && penalty_mode == PenaltyMode::Fixed {
        fixed_query_pool(&data.train)
    } else {
        Vec::new()
    };

    let val_refs: Vec<&Sample> = data.val.iter().collect();
    let n_train = data.train.len();
    let batch_size = cfg.batch_size.min(n_train);

    let mut log = Vec::with_capacity(cfg.max_epochs);
    let mut bp = Backprop::new();
    let mut g_theta = vec![0.0; theta_len];
    let mut g_phi = vec![0.0; phi_len];
    let started = Instant::now();

    for epoch in start_epoch + 1..=start_epoch + cfg.max_epochs {
        let batch_idx: Vec<usize> = index_sample(&mut rng_batch, n_train, batch_size).into_vec();
        let query_points = if penalty_active {
            sample_query_points(
                &system.domain,
                cfg.query_count,
                penalty_mode,
                &fixed_pool,
                &mut rng_query,
            )
        } else {
            Vec::new()
        };

        g_theta.iter_mut().for_each(|g| *g = 0.0);
        g_phi.iter_mut().for_each(|g| *g = 0.0);

        let tape = Tape::with_capacity(1 << 16);
        let theta_vars: Vec<Var<'_>> = match (&operator, &deeponet) {
            (Some(op), _) => tape.leaves(op.core().params()),
            (_, Some(net)) => tape.leaves(&net.params()),
            _ => unreachable!(),
        };
        let phi_vars: Vec<Var<'_>> = match &energy {
            Some(en) if penalty_active => tape.leaves(en.core().params()),
            _ => Vec::new(),
        };
        let phi_start = theta_len;
        let params_mark = tape.mark();

        let mut data_value = 0.0;
        let mut penalty_value = 0.0;
        let inv_batch = 1.0 / batch_size as f64;
        let k_count = query_points.len().max(1);
        let inv_pen = cfg.lambda * inv_batch / k_count as f64;

        for &si in &batch_idx {
            let sample = &data.train[si];

            // Per-sample precomputation shared by both loss terms.
            enum SampleStem<'t> {
                Op(crate::networks::Stem<Var<'t>>),
                Deep(crate::networks::BranchStem<Var<'t>>),
            }
            let stem = match (&operator, &deeponet) {
                (Some(op), _) => SampleStem::Op(op.stem(&theta_vars, &sample.a_bar)?),
                (_, Some(net)) => SampleStem::Deep(net.branch_stem(&theta_vars, &sample.a_bar)?),
                _ => unreachable!(),
            };
            let sample_mark = tape.mark();

            // Data term: mean over this sample's observation points.
            let inv_points = 1.0 / sample.points.len() as f64;
            let mut term: Option<Var<'_>> = None;
            for (y, target) in sample.points.iter().zip(sample.targets.iter()) {
                let y_vars: Vec<Var<'_>> = y.iter().map(|&c| tape.leaf(c)).collect();
                let u = match (&operator, &deeponet, &stem) {
                    (Some(op), _, SampleStem::Op(st)) => op.eval_from_stem(&theta_vars, st, &y_vars),
                    (_, Some(net), SampleStem::Deep(st)) => {
                        net.eval_from_stem(&theta_vars, st, &y_vars)
                    }
                    _ => unreachable!(),
                };
                for (m, um) in u.iter().enumerate() {
                    let r = um.add_const(-target[m]);
                    let sq = r.mul(r);
                    term = Some(match term {
                        None => sq,
                        Some(t) => t.add(sq),
                    });
                }
            }
            let term = term.expect("non-empty points").scale(inv_points);
            data_value += term.value() * inv_batch;
            bp.accumulate(&tape, term, inv_batch, 0, &mut g_theta);
            tape.rewind(sample_mark);

            // Penalty term: mean over query points of the squared residual.
            if penalty_active {
                let (op, en) = (
                    operator.as_ref().expect("penalty implies operator net"),
                    energy.as_ref().expect("penalty implies energy net"),
                );
                let SampleStem::Op(st) = &stem else { unreachable!() };
                for y in &query_points {
                    let point_mark = tape.mark();
                    let seeds = (
                        tape.leaf(y[0]),
                        tape.leaf(if y.len() > 1 { y[1] } else { 0.0 }),
                    );
                    let r2 = penalty_residual_sq(
                        op,
                        &theta_vars,
                        st,
                        en,
                        &phi_vars,
                        system.g,
                        y,
                        seeds,
                    )?;
                    penalty_value += r2.value() * inv_batch / k_count as f64;
                    bp.accumulate_pair(
                        &tape,
                        r2,
                        inv_pen,
                        (0, &mut g_theta),
                        (phi_start, &mut g_phi),
                    );
                    tape.rewind(point_mark);
                }
            }
            tape.rewind(params_mark);
        }

        let train_loss = data_value + cfg.lambda * penalty_value;
        if !train_loss.is_finite() {
            return Err(TrainError::Diverged { epoch });
        }

        if let Some(op) = operator.as_mut() {
            adam_step(op.core_mut().params_mut(), &g_theta, &mut adam_theta, cfg.lr_theta);
        }
        if let Some(net) = deeponet.as_mut() {
            let mut params = net.params();
            adam_step(&mut params, &g_theta, &mut adam_theta, cfg.lr_theta);
            net.set_params(&params);
        }
        if penalty_active {
            if let Some(en) = energy.as_mut() {
                adam_step(en.core_mut().params_mut(), &g_phi, &mut adam_phi, cfg.lr_phi);
            }
        }

        let predictor = match (&operator, &deeponet) {
            (Some(op), _) => Predictor::Operator(op.clone()),
            (_, Some(net)) => Predictor::DeepOnet(net.clone()),
            _ => unreachable!(),
        };
        let val_loss = data_loss(&predictor, &val_refs)?;
        if !val_loss.is_finite() {
            return Err(TrainError::Diverged { epoch });
        }

        if val_loss < best_val {
            best_val = val_loss;
            best_epoch = epoch;
            best_theta = match (&operator, &deeponet) {
                (Some(op), _) => op.core().params().to_vec(),
                (_, Some(net)) => net.params(),
                _ => unreachable!(),
            };
            best_phi = energy.as_ref().map(|e| e.core().params().to_vec());
            stall = 0;
        } else {
            stall += 1;
        }

        log.push(EpochRecord {
            epoch,
            train_loss,
            data_loss: data_value,
            penalty: penalty_value,
            val_loss,
            wall_seconds: started.elapsed().as_secs_f64(),
        });

        if stall >= cfg.patience {
            break;
        }
    }

    // Restore the best-validation checkpoint.
    if !best_theta.is_empty() {
        if let Some(op) = operator.as_mut() {
            op.core_mut().set_params(&best_theta);
        }
        if let Some(net) = deeponet.as_mut() {
            net.set_params(&best_theta);
        }
        if let (Some(en), Some(phi)) = (energy.as_mut(), best_phi.as_ref()) {
            en.core_mut().set_params(phi);
        }
    }

    let final_epoch = log.last().map(|r| r.epoch).unwrap_or(start_epoch);
    let state = TrainState {
        epoch: final_epoch,
        theta: match (&operator, &deeponet) {
            (Some(op), _) => op.core().params().to_vec(),
            (_, Some(net)) => net.params(),
            _ => unreachable!(),
        },
        phi: energy.as_ref().map(|e| e.core().params().to_vec()),
        adam_theta,
        adam_phi: if phi_len > 0 { Some(adam_phi) } else { None },
        rng_batch,
        rng_query,
        best_val,
        best_epoch,
        best_theta: best_theta.clone(),
        best_phi: best_phi.clone(),
        stall,
    };

    let predictor = match (operator, deeponet) {
        (Some(op), _) => Predictor::Operator(op),
        (_, Some(net)) => Predictor::DeepOnet(net),
        _ => unreachable!(),
    };
    Ok((
        TrainOutcome {
            predictor,
            energy,
            log,
            best_val,
            best_epoch,
        },
        state,
    ))
}
