//! Bias-corrected Adam.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl AdamState {
    /// beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
    pub fn new(param_count: usize) -> Self {
        Self {
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
            step: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

pub fn adam_step(params: &mut [f64], grad: &[f64], state: &mut AdamState, lr: f64) {
    assert_eq!(params.len(), grad.len(), "gradient length mismatch");
    assert_eq!(params.len(), state.m.len(), "optimizer state length mismatch");
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - state.beta1.powi(t);
    let bc2 = 1.0 - state.beta2.powi(t);
    for i in 0..params.len() {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + state.eps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut params = vec![1.0, -2.0, 0.5];
        let before = params.clone();
        let mut state = AdamState::new(3);
        adam_step(&mut params, &[0.0, 0.0, 0.0], &mut state, 1e-3);
        assert_eq!(params, before);
        assert_eq!(state.step_count(), 1);
    }

    #[test]
    fn first_step_is_signed_learning_rate() {
        // With eps -> 0 the first update is -lr * sign(g); eps = 1e-8 keeps
        // the deviation below lr * 1e-3 for |g| >= 1e-4.
        let lr = 1e-3;
        for &g in &[2.5_f64, -0.3, 1e-4, -1e-4] {
            let mut params = vec![0.7];
            let mut state = AdamState::new(1);
            adam_step(&mut params, &[g], &mut state, lr);
            let delta = params[0] - 0.7;
            assert!(
                (delta + lr * g.signum()).abs() <= lr * 1e-3,
                "g = {g}, delta = {delta}"
            );
        }
    }

    #[test]
    fn two_steps_match_hand_recurrence() {
        let (b1, b2, eps, lr) = (0.9, 0.999, 1e-8, 1e-2);
        let g = 0.4;
        let mut w = 1.0;
        let (mut m, mut v) = (0.0, 0.0);
        for t in 1..=2 {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let mh = m / (1.0 - b1_pow(b1, t));
            let vh = v / (1.0 - b1_pow(b2, t));
            w -= lr * mh / (vh.sqrt() + eps);
        }

        let mut params = vec![1.0];
        let mut state = AdamState::new(1);
        adam_step(&mut params, &[g], &mut state, lr);
        adam_step(&mut params, &[g], &mut state, lr);
        assert!((params[0] - w).abs() < 1e-15, "{} vs {w}", params[0]);
    }

    fn b1_pow(b: f64, t: usize) -> f64 {
        b.powi(t as i32)
    }
}
