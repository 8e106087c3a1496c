//! Softmax cross-entropy with a confidence threshold after temperature scaling.

use super::{candidate_grid, model_scores, tune, Tuned};
use crate::domain::{Dataset, Decision, Label, RejectReason, RejectionCost};
use crate::error::Result;
use crate::models::ScoreModel;
use crate::objective::{DecisionRule, Objective};

/// `exp(g_i / T) / sum_j exp(g_j / T)`, shifted by the maximum for stability.
pub fn softmax(g: &[f64], temperature: f64) -> Vec<f64> {
    assert!(temperature > 0.0, "temperature must be positive");
    let max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = g.iter().map(|&v| ((v - max) / temperature).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn log_softmax(g: &[f64]) -> Vec<f64> {
    let max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + g.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
    g.iter().map(|&v| v - lse).collect()
}

/// Returns `-log softmax_y(g)` and its gradient `softmax(g) - onehot(y)`.
pub fn sce_loss_grad(g: &[f64], y: Label) -> (f64, Vec<f64>) {
    let loss = -log_softmax(g)[y.index()];
    let mut grad = softmax(g, 1.0);
    grad[y.index()] -= 1.0;
    (loss, grad)
}

/// Chow's rule applied to the temperature-scaled softmax.
pub fn sce_decide(g: &[f64], temperature: f64, cost: RejectionCost) -> Decision {
    let p = softmax(g, temperature);
    let (arg, max) = p
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if max <= 1.0 - cost.value() {
        Decision::Reject(RejectReason::Distance)
    } else {
        Decision::Predict(Label::from_index(arg))
    }
}

/// Temperature minimising validation zero-one-c risk over `candidates`
/// (defaults to [`candidate_grid`] when `None`).
pub fn tune_temperature<M: ScoreModel + ?Sized>(
    model: &M,
    val: &Dataset,
    cost: RejectionCost,
    candidates: Option<&[f64]>,
) -> Result<Tuned> {
    let scores = model_scores(model, val)?;
    let grid;
    let candidates = match candidates {
        Some(c) => c,
        None => {
            grid = candidate_grid();
            &grid
        }
    };
    tune(&scores, &val.labels(), cost, candidates, |t, g| sce_decide(g, t, cost))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sce;

impl Objective for Sce {
    fn output_dim(&self, classes: usize) -> usize {
        classes
    }

    fn loss_grad(&self, scores: &[f64], label: Label, grad: &mut [f64]) -> f64 {
        let (loss, g) = sce_loss_grad(scores, label);
        grad.copy_from_slice(&g);
        loss
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SceRule {
    pub temperature: f64,
    pub cost: RejectionCost,
}

impl DecisionRule for SceRule {
    fn decide(&self, scores: &[f64]) -> Decision {
        sce_decide(scores, self.temperature, self.cost)
    }
}
