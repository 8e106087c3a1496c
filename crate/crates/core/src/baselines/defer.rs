//! Cross-entropy with an extra rejection output at index `K`.

use crate::domain::{Decision, Label, RejectReason, RejectionCost};
use crate::objective::{DecisionRule, Objective};

use super::sce::softmax;

/// Sign of the DEFER objective.
///
/// `Negated` minimises `-log p_y - (1 - c) log p_{K+1}`. `Printed` keeps the
/// un-negated expression and exists only to compare against it; minimising it
/// drives the true-class probability to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeferSign {
    #[default]
    Negated,
    Printed,
}

/// Loss and gradient for a score vector of length `K + 1`.
pub fn defer_loss_grad(g: &[f64], y: Label, cost: RejectionCost, sign: DeferSign) -> (f64, Vec<f64>) {
    let k1 = g.len();
    let w = 1.0 - cost.value();
    let max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + g.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
    let loss = -(g[y.index()] - lse) - w * (g[k1 - 1] - lse);
    let p = softmax(g, 1.0);
    let mut grad: Vec<f64> = p.iter().map(|&pi| (1.0 + w) * pi).collect();
    grad[y.index()] -= 1.0;
    grad[k1 - 1] -= w;
    match sign {
        DeferSign::Negated => (loss, grad),
        DeferSign::Printed => (-loss, grad.into_iter().map(|v| -v).collect()),
    }
}

/// Rejects when the rejection output is strictly larger than every class
/// score; otherwise predicts the first class attaining the maximum.
pub fn defer_decide(g: &[f64]) -> Decision {
    let (classes, reject) = g.split_at(g.len() - 1);
    let (arg, max) = classes
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if reject[0] > max {
        Decision::Reject(RejectReason::Distance)
    } else {
        Decision::Predict(Label::from_index(arg))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Defer {
    pub cost: RejectionCost,
    pub sign: DeferSign,
}

impl Defer {
    pub fn new(cost: RejectionCost) -> Self {
        Defer {
            cost,
            sign: DeferSign::Negated,
        }
    }
}

impl Objective for Defer {
    fn output_dim(&self, classes: usize) -> usize {
        classes + 1
    }

    fn loss_grad(&self, scores: &[f64], label: Label, grad: &mut [f64]) -> f64 {
        let (loss, g) = defer_loss_grad(scores, label, self.cost, self.sign);
        grad.copy_from_slice(&g);
        loss
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DeferRule;

impl DecisionRule for DeferRule {
    fn decide(&self, scores: &[f64]) -> Decision {
        defer_decide(scores)
    }
}
