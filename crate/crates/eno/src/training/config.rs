//! Training configuration and method selection.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    /// Query points drawn fresh and uniformly from the spatio-temporal domain
    /// every iteration.
    Resampled,
    /// Query points restricted to the training grid; when the grid has at
    /// most K points all of them are used.
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Operator net + energy net + gradient-flow penalty at resampled points.
    Eno,
    /// Same, with the penalty evaluated only at fixed training grid points.
    EnoFixed,
    /// Operator net, data loss only.
    Vanilla,
    /// Branch/trunk baseline, data loss only.
    Deeponet,
}

impl Method {
    pub fn uses_penalty(self) -> bool {
        matches!(self, Method::Eno | Method::EnoFixed)
    }

    pub fn penalty_mode(self) -> Option<PenaltyMode> {
        match self {
            Method::Eno => Some(PenaltyMode::Resampled),
            Method::EnoFixed => Some(PenaltyMode::Fixed),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Eno => "eno",
            Method::EnoFixed => "eno-fixed",
            Method::Vanilla => "vanilla",
            Method::Deeponet => "deeponet",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eno" => Ok(Method::Eno),
            "eno-fixed" => Ok(Method::EnoFixed),
            "vanilla" => Ok(Method::Vanilla),
            "deeponet" => Ok(Method::Deeponet),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Penalty weight; zero disables the energy net entirely.
    pub lambda: f64,
    /// Query points K per iteration.
    pub query_count: usize,
    /// Mini-batch size I_b.
    pub batch_size: usize,
    pub lr_theta: f64,
    pub lr_phi: f64,
    /// One epoch is one optimization step of Algorithm-style training:
    /// sample a mini-batch, sample query points, update both nets, then
    /// record the validation loss.
    pub max_epochs: usize,
    /// Early stopping: epochs without validation improvement before halting.
    pub patience: usize,
    pub seed: u64,
    pub penalty_mode: PenaltyMode,
    pub lambda_grid: Vec<f64>,
    pub operator_hidden: Vec<usize>,
    pub energy_hidden: Vec<usize>,
    pub energy_diff_order: usize,
    pub deeponet_hidden: Vec<usize>,
    pub deeponet_latent: usize,
}

impl TrainConfig {
    /// Paper-scale PDE defaults: K = 200, I_b = 30, lr 1e-3 / 1e-4,
    /// three-layer 200-unit MLPs, lambda grid 1e-8..1e-1.
    pub fn pde_paper() -> Self {
        Self {
            lambda: 0.0,
            query_count: 200,
            batch_size: 30,
            lr_theta: 1e-3,
            lr_phi: 1e-4,
            max_epochs: 10_000,
            patience: 500,
            seed: 0,
            penalty_mode: PenaltyMode::Resampled,
            lambda_grid: (0..8).map(|k| 10f64.powi(-8 + k)).collect(),
            operator_hidden: vec![200, 200],
            energy_hidden: vec![200, 200],
            energy_diff_order: 1,
            deeponet_hidden: vec![200, 200],
            deeponet_latent: 30,
        }
    }

    /// Paper-scale ODE defaults: K = 20, I_b = 20, five-layer 32-unit MLPs,
    /// latent dimension 10, the appendix lambda grid.
    pub fn ode_paper() -> Self {
        Self {
            lambda: 0.0,
            query_count: 20,
            batch_size: 20,
            lr_theta: 1e-3,
            lr_phi: 1e-4,
            max_epochs: 10_000,
            patience: 500,
            seed: 0,
            penalty_mode: PenaltyMode::Resampled,
            lambda_grid: vec![0.001, 0.01, 0.1, 0.5, 1.0, 2.0],
            operator_hidden: vec![32, 32, 32, 32],
            energy_hidden: vec![32, 32, 32, 32],
            energy_diff_order: 0,
            deeponet_hidden: vec![32, 32, 32, 32],
            deeponet_latent: 10,
        }
    }

    /// Desk-scale PDE profile: the pinned experiment protocol (K = 200,
    /// 2000 epochs, 3-point lambda grid) with networks and mini-batches sized
    /// for CPU budgets.
    pub fn pde_desk() -> Self {
        Self {
            batch_size: 10,
            max_epochs: 2000,
            patience: 500,
            lambda_grid: vec![1e-4, 1e-3, 1e-2],
            operator_hidden: vec![32, 32],
            energy_hidden: vec![16, 16],
            deeponet_hidden: vec![32, 32],
            deeponet_latent: 16,
            ..Self::pde_paper()
        }
    }

    /// Desk-scale ODE profile: the appendix protocol at 1000 epochs.
    pub fn ode_desk() -> Self {
        Self {
            max_epochs: 1000,
            patience: 500,
            ..Self::ode_paper()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.lambda < 0.0 {
            return Err(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if self.query_count == 0 {
            return Err("query_count must be >= 1".into());
        }
        if self.batch_size == 0 {
            return Err("batch_size must be >= 1".into());
        }
        if self.lr_theta <= 0.0 || self.lr_phi <= 0.0 {
            return Err("learning rates must be positive".into());
        }
        Ok(())
    }
}
