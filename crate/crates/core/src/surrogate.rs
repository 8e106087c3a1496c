//! The cost-sensitive one-vs-rest surrogate and its decision rule.
//!
//! For scores `g = (g_1, ..., g_K)` and a label `y`, the surrogate is
//!
//! ```text
//! L(g; y) = c * phi(g_y) + (1 - c) * sum_{y' != y} phi(-g_{y'})
//! ```
//!
//! i.e. `K` cost-sensitive binary problems, one per class, each weighting a
//! missed positive by `c` and a false positive by `1 - c`. A learned `g` is
//! turned into a decision by [`decide`]: reject when no score is positive
//! (distance rejection) or when several are (ambiguity rejection), otherwise
//! predict the single positive class.

use crate::domain::{Dataset, Decision, Label, RejectReason, RejectionCost};
use crate::error::{Error, Result};
use crate::losses::MarginLoss;
use crate::objective::{DecisionRule, Objective};
use crate::theory::PosteriorSimplex;

/// Scores `g_1(x), ..., g_K(x)` of the one-vs-rest ensemble.
pub type ScoreVector = Vec<f64>;

pub fn cs_surrogate_loss(loss: MarginLoss, cost: RejectionCost, g: &[f64], y: Label) -> f64 {
    let c = cost.value();
    let mut negatives = 0.0;
    for (j, &gj) in g.iter().enumerate() {
        if j != y.index() {
            negatives += loss.eval(-gj);
        }
    }
    c * loss.eval(g[y.index()]) + (1.0 - c) * negatives
}

pub fn cs_surrogate_grad(loss: MarginLoss, cost: RejectionCost, g: &[f64], y: Label) -> Vec<f64> {
    let c = cost.value();
    g.iter()
        .enumerate()
        .map(|(j, &gj)| {
            if j == y.index() {
                c * loss.grad(gj)
            } else {
                -(1.0 - c) * loss.grad(-gj)
            }
        })
        .collect()
}

/// Mean surrogate loss of `score_fn` over `data`.
pub fn empirical_risk<F>(loss: MarginLoss, cost: RejectionCost, score_fn: F, data: &Dataset) -> Result<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if data.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let total: f64 = data
        .iter()
        .map(|s| cs_surrogate_loss(loss, cost, &score_fn(&s.features), s.label))
        .sum();
    Ok(total / data.len() as f64)
}

/// Ensemble decision rule.
///
/// Rejects for distance when `max_y g_y <= 0`, for ambiguity when two or more
/// scores are strictly positive, and otherwise predicts the unique positive
/// class.
pub fn decide(g: &[f64]) -> Decision {
    let mut positive = None;
    let mut n_positive = 0;
    for (j, &gj) in g.iter().enumerate() {
        if gj > 0.0 {
            n_positive += 1;
            positive.get_or_insert(j);
        }
    }
    match (n_positive, positive) {
        (0, _) => Decision::Reject(RejectReason::Distance),
        (1, Some(j)) => Decision::Predict(Label::from_index(j)),
        _ => Decision::Reject(RejectReason::Ambiguity),
    }
}

/// `W(g; eta) = sum_y eta_y * L(g; y)`.
pub fn pointwise_conditional_risk(
    loss: MarginLoss,
    cost: RejectionCost,
    g: &[f64],
    eta: &PosteriorSimplex,
) -> f64 {
    eta.probs()
        .iter()
        .enumerate()
        .map(|(y, &p)| p * cs_surrogate_loss(loss, cost, g, Label::from_index(y)))
        .sum()
}

/// The same risk written class by class:
/// `sum_y [eta_y c phi(g_y) + (1 - eta_y)(1 - c) phi(-g_y)]`.
pub fn pointwise_conditional_risk_decomposed(
    loss: MarginLoss,
    cost: RejectionCost,
    g: &[f64],
    eta: &PosteriorSimplex,
) -> f64 {
    let c = cost.value();
    eta.probs()
        .iter()
        .zip(g)
        .map(|(&p, &gy)| p * c * loss.eval(gy) + (1.0 - p) * (1.0 - c) * loss.eval(-gy))
        .sum()
}

/// Training objective for the cost-sensitive surrogate.
///
/// Uses the clamped exponential-loss values of [`MarginLoss::eval_train`].
#[derive(Debug, Clone, Copy)]
pub struct CsSurrogate {
    pub loss: MarginLoss,
    pub cost: RejectionCost,
}

impl CsSurrogate {
    pub fn new(loss: MarginLoss, cost: RejectionCost) -> Self {
        CsSurrogate { loss, cost }
    }
}

impl Objective for CsSurrogate {
    fn output_dim(&self, classes: usize) -> usize {
        classes
    }

    fn loss_grad(&self, scores: &[f64], label: Label, grad: &mut [f64]) -> f64 {
        let c = self.cost.value();
        let mut value = 0.0;
        for (j, (&gj, out)) in scores.iter().zip(grad.iter_mut()).enumerate() {
            if j == label.index() {
                value += c * self.loss.eval_train(gj);
                *out = c * self.loss.grad_train(gj);
            } else {
                value += (1.0 - c) * self.loss.eval_train(-gj);
                *out = -(1.0 - c) * self.loss.grad_train(-gj);
            }
        }
        value
    }
}

/// [`decide`] as a [`DecisionRule`].
#[derive(Debug, Clone, Copy, Default)]
pub struct EnsembleRule;

impl DecisionRule for EnsembleRule {
    fn decide(&self, scores: &[f64]) -> Decision {
        decide(scores)
    }
}
