//! A trained solution-operator model of either architecture, for plain
//! (f64) prediction.

use super::deeponet::DeepOnet;
use super::mlp::NetError;
use super::operator::OperatorNet;

#[derive(Clone, Debug, PartialEq)]
pub enum Predictor {
    Operator(OperatorNet),
    DeepOnet(DeepOnet),
}

impl Predictor {
    pub fn sensor_count(&self) -> usize {
        match self {
            Predictor::Operator(n) => n.sensor_count(),
            Predictor::DeepOnet(n) => n.sensor_count(),
        }
    }

    pub fn coord_dim(&self) -> usize {
        match self {
            Predictor::Operator(n) => n.coord_dim(),
            Predictor::DeepOnet(n) => n.coord_dim(),
        }
    }

    pub fn out_dim(&self) -> usize {
        match self {
            Predictor::Operator(n) => n.out_dim(),
            Predictor::DeepOnet(n) => n.out_dim(),
        }
    }

    pub fn eval(&self, a_bar: &[f64], y: &[f64]) -> Result<Vec<f64>, NetError> {
        match self {
            Predictor::Operator(n) => n.eval_f64(a_bar, y),
            Predictor::DeepOnet(n) => n.eval_f64(a_bar, y),
        }
    }

    /// Predictions at many query points of one sample; the per-sample
    /// precomputation (operator stem / branch embedding) is shared.
    pub fn eval_many(&self, a_bar: &[f64], points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, NetError> {
        match self {
            Predictor::Operator(n) => {
                let params = n.core().params();
                let stem = n.stem(params, a_bar)?;
                Ok(points
                    .iter()
                    .map(|y| n.eval_from_stem(params, &stem, y))
                    .collect())
            }
            Predictor::DeepOnet(n) => {
                let params = n.params();
                let stem = n.branch_stem(&params, a_bar)?;
                Ok(points
                    .iter()
                    .map(|y| n.eval_from_stem(&params, &stem, y))
                    .collect())
            }
        }
    }
}
