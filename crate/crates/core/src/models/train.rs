use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AdamState, ScoreModel};
use crate::domain::Dataset;
use crate::error::{Error, Result};
use crate::objective::Objective;

/// Optimiser settings for mini-batch training.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Seeds the per-epoch shuffles.
    pub seed: u64,
    /// L2 penalty added to the gradient as `weight_decay * params`.
    pub weight_decay: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            batch_size: 256,
            epochs: 100,
            seed: 0,
            weight_decay: 0.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidArgument("learning rate must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be positive".into()));
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(Error::InvalidArgument("weight decay must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean training objective before the first update.
    pub initial_risk: f64,
    /// Mean training objective after each completed epoch.
    pub epoch_risks: Vec<f64>,
    /// Set when a parameter or the objective became non-finite; training
    /// stops at that point.
    pub diverged: bool,
}

impl TrainReport {
    pub fn final_risk(&self) -> f64 {
        self.epoch_risks.last().copied().unwrap_or(self.initial_risk)
    }
}

/// Mean objective value of `model` over `data`.
pub fn objective_risk<M: ScoreModel + ?Sized>(model: &M, data: &Dataset, objective: &dyn Objective) -> f64 {
    let total: f64 = data
        .iter()
        .map(|s| objective.loss(&model.forward_unchecked(&s.features), s.label))
        .sum();
    total / data.len() as f64
}

/// Minimises the mean objective with Adam over shuffled mini-batches.
///
/// The last batch of an epoch may be smaller than `batch_size`; it is kept.
/// Given the same initial model, data and config the result is bit-identical.
pub fn train<M: ScoreModel + ?Sized>(
    model: &mut M,
    data: &Dataset,
    objective: &dyn Objective,
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    if data.dim() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            got: data.dim(),
        });
    }
    let k = objective.output_dim(data.classes());
    if k != model.output_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.output_dim(),
            got: k,
        });
    }

    let initial_risk = objective_risk(model, data, objective);
    let mut report = TrainReport {
        initial_risk,
        epoch_risks: Vec::with_capacity(config.epochs),
        diverged: !initial_risk.is_finite(),
    };
    if report.diverged {
        return Ok(report);
    }

    let n_params = model.params().len();
    let mut adam = AdamState::new(n_params);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut grad = vec![0.0; n_params];
    let mut score_grad = vec![0.0; k];
    let samples = data.samples();

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                let s = &samples[i];
                let scores = model.forward_unchecked(&s.features);
                objective.loss_grad(&scores, s.label, &mut score_grad);
                model.accumulate_backward(&s.features, &score_grad, &mut grad);
            }
            let scale = 1.0 / batch.len() as f64;
            let params = model.params();
            for (g, p) in grad.iter_mut().zip(params) {
                *g = *g * scale + config.weight_decay * p;
            }
            adam.step(model.params_mut(), &grad, config.learning_rate);
        }
        if model.params().iter().any(|p| !p.is_finite()) {
            report.diverged = true;
            return Ok(report);
        }
        let risk = objective_risk(model, data, objective);
        report.epoch_risks.push(risk);
        if !risk.is_finite() {
            report.diverged = true;
            return Ok(report);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Label, LabeledSample, RejectionCost};
    use crate::losses::MarginLoss;
    use crate::models::{LinearModel, Model, ModelKind};
    use crate::surrogate::CsSurrogate;

    fn toy() -> Dataset {
        let samples = (0..40)
            .map(|i| {
                let x = (i as f64 - 19.5) / 10.0;
                LabeledSample {
                    features: vec![x, 1.0 - x],
                    label: if x > 0.0 { Label::POSITIVE } else { Label::NEGATIVE },
                }
            })
            .collect();
        Dataset::new(samples, 2).unwrap()
    }

    fn objective() -> CsSurrogate {
        CsSurrogate::new(MarginLoss::Logistic, RejectionCost::new(0.2).unwrap())
    }

    #[test]
    fn zero_epochs_leaves_parameters_unchanged() {
        let mut m = LinearModel::zeros(2, 2);
        let before = m.clone();
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let r = train(&mut m, &toy(), &objective(), &cfg).unwrap();
        assert_eq!(m, before);
        assert!(r.epoch_risks.is_empty());
    }

    #[test]
    fn replay_is_bit_identical() {
        let data = toy();
        let cfg = TrainConfig {
            epochs: 5,
            batch_size: 7,
            seed: 11,
            learning_rate: 0.01,
            weight_decay: 0.0,
        };
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let mut m = Model::init(ModelKind::Mlp, 2, 2, &mut rng);
            let r = train(&mut m, &data, &objective(), &cfg).unwrap();
            (m, r)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn risk_decreases_on_separable_data() {
        let mut m = LinearModel::zeros(2, 2);
        let cfg = TrainConfig {
            epochs: 50,
            batch_size: 8,
            learning_rate: 0.05,
            ..TrainConfig::default()
        };
        let r = train(&mut m, &toy(), &objective(), &cfg).unwrap();
        assert!(!r.diverged);
        assert!(r.final_risk() < 0.5 * r.initial_risk);
    }

    #[test]
    fn dimension_checks() {
        let mut m = LinearModel::zeros(3, 2);
        assert!(train(&mut m, &toy(), &objective(), &TrainConfig::default()).is_err());
        let mut m = LinearModel::zeros(2, 3);
        assert!(train(&mut m, &toy(), &objective(), &TrainConfig::default()).is_err());
        let bad = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(train(&mut LinearModel::zeros(2, 2), &toy(), &objective(), &bad).is_err());
    }
}
