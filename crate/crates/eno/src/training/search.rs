//! Lambda grid search on validation data loss.

use super::config::{Method, TrainConfig};
use super::trainer::{train, PenaltySystem, TrainData, TrainError, TrainOutcome};

/// Index of the winning lambda: minimum validation score, ties broken toward
/// the larger lambda (prefer more physics regularization at equal data fit).
pub fn select_lambda(scores: &[(f64, f64)]) -> usize {
    assert!(!scores.is_empty(), "lambda grid must be non-empty");
    let mut best = 0;
    for (i, &(lambda, val)) in scores.iter().enumerate().skip(1) {
        let (bl, bv) = scores[best];
        if val < bv || (val == bv && lambda > bl) {
            best = i;
        }
    }
    best
}

#[derive(Debug)]
pub struct LambdaSearchOutcome {
    pub lambda: f64,
    pub outcome: TrainOutcome,
    /// (lambda, best validation data loss) per grid point, in grid order.
    pub scores: Vec<(f64, f64)>,
}

/// Trains once per grid value and keeps the model minimizing the validation
/// data loss.
pub fn lambda_search(
    cfg: &TrainConfig,
    method: Method,
    data: &TrainData,
    system: &PenaltySystem,
) -> Result<LambdaSearchOutcome, TrainError> {
    if cfg.lambda_grid.is_empty() {
        return Err(TrainError::Config("lambda grid must be non-empty".into()));
    }
    let mut runs = Vec::with_capacity(cfg.lambda_grid.len());
    let mut scores = Vec::with_capacity(cfg.lambda_grid.len());
    for &lambda in &cfg.lambda_grid {
        let run_cfg = TrainConfig {
            lambda,
            ..cfg.clone()
        };
        let outcome = train(&run_cfg, method, data, system)?;
        scores.push((lambda, outcome.best_val));
        runs.push(outcome);
    }
    let winner = select_lambda(&scores);
    Ok(LambdaSearchOutcome {
        lambda: scores[winner].0,
        outcome: runs.swap_remove(winner),
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmin_is_respected() {
        let scores = vec![(1e-4, 0.5), (1e-3, 0.2), (1e-2, 0.9)];
        assert_eq!(select_lambda(&scores), 1);
    }

    #[test]
    fn ties_break_toward_larger_lambda() {
        let scores = vec![(1e-4, 0.2), (1e-3, 0.2), (1e-2, 0.3)];
        assert_eq!(select_lambda(&scores), 1);
        let scores = vec![(1e-2, 0.2), (1e-4, 0.2)];
        assert_eq!(select_lambda(&scores), 0);
    }

    #[test]
    fn singleton_grid_returns_its_only_entry() {
        assert_eq!(select_lambda(&[(0.0, 7.0)]), 0);
    }
}
