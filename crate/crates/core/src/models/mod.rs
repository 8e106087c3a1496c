//! Trainable score functions, the Adam optimiser and the mini-batch trainer.
//!
//! Models keep their parameters in one flat vector so that the optimiser,
//! gradient checks and snapshots treat every architecture the same way.

mod adam;
mod linear;
mod mlp;
mod snapshot;
mod train;

pub use adam::AdamState;
pub use linear::LinearModel;
pub use mlp::{MlpModel, HIDDEN_WIDTH};
pub use snapshot::{read_snapshot, write_snapshot};
pub use train::{objective_risk, train, TrainConfig, TrainReport};

use rand::Rng;

use crate::error::{Error, Result};

/// A differentiable map from features to a score vector.
pub trait ScoreModel: Send + Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn params(&self) -> &[f64];
    fn params_mut(&mut self) -> &mut [f64];

    /// Scores without a dimension check.
    fn forward_unchecked(&self, x: &[f64]) -> Vec<f64>;

    /// Adds `d(upstream . scores)/d(params)` at `x` into `grad`.
    fn accumulate_backward(&self, x: &[f64], upstream: &[f64], grad: &mut [f64]);

    fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(self.forward_unchecked(x))
    }

    /// Parameter gradient of `upstream . scores` at `x`.
    fn backward(&self, x: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        if upstream.len() != self.output_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.output_dim(),
                got: upstream.len(),
            });
        }
        let mut grad = vec![0.0; self.params().len()];
        self.accumulate_backward(x, upstream, &mut grad);
        Ok(grad)
    }
}

/// Architecture selector used by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Linear,
    Mlp,
}

/// Either architecture behind one type.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Linear(LinearModel),
    Mlp(MlpModel),
}

impl Model {
    pub fn init<R: Rng + ?Sized>(kind: ModelKind, input_dim: usize, output_dim: usize, rng: &mut R) -> Model {
        match kind {
            ModelKind::Linear => Model::Linear(LinearModel::init(input_dim, output_dim, rng)),
            ModelKind::Mlp => Model::Mlp(MlpModel::init(input_dim, HIDDEN_WIDTH, output_dim, rng)),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Linear(_) => ModelKind::Linear,
            Model::Mlp(_) => ModelKind::Mlp,
        }
    }

    fn inner(&self) -> &dyn ScoreModel {
        match self {
            Model::Linear(m) => m,
            Model::Mlp(m) => m,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn ScoreModel {
        match self {
            Model::Linear(m) => m,
            Model::Mlp(m) => m,
        }
    }
}

impl ScoreModel for Model {
    fn input_dim(&self) -> usize {
        self.inner().input_dim()
    }
    fn output_dim(&self) -> usize {
        self.inner().output_dim()
    }
    fn params(&self) -> &[f64] {
        self.inner().params()
    }
    fn params_mut(&mut self) -> &mut [f64] {
        self.inner_mut().params_mut()
    }
    fn forward_unchecked(&self, x: &[f64]) -> Vec<f64> {
        self.inner().forward_unchecked(x)
    }
    fn accumulate_backward(&self, x: &[f64], upstream: &[f64], grad: &mut [f64]) {
        self.inner().accumulate_backward(x, upstream, grad)
    }
}
