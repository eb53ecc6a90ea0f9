//! The joint training loop: data loss plus gradient-flow penalty, query-point
//! sampling, Adam, early stopping, and the lambda grid search.

mod adam;
mod config;
mod losses;
mod sampler;
mod search;
mod trainer;

pub use adam::{adam_step, AdamState};
pub use config::{Method, PenaltyMode, TrainConfig};
pub use losses::{
    data_loss, eno_loss, operator_jets_at, penalty, penalty_residual_sq, LossError, Sample,
};
pub use sampler::{sample_query_points, Domain};
pub use search::{lambda_search, select_lambda, LambdaSearchOutcome};
pub use trainer::{
    norm_from_data, train, train_resumable, write_log_csv, EpochRecord, PenaltySystem, TrainData,
    TrainError, TrainOutcome, TrainState,
};
