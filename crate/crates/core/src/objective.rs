//! Per-sample training objectives and decision rules, abstracted over the
//! method so that the trainers and the harness are method-agnostic.

use crate::domain::{Decision, Label};

/// A per-sample loss on a score vector, with its gradient.
pub trait Objective: Send + Sync {
    /// Length of the score vector the objective expects for `classes` classes.
    fn output_dim(&self, classes: usize) -> usize;

    /// Writes `dL/dscores` into `grad` (overwriting it) and returns `L`.
    fn loss_grad(&self, scores: &[f64], label: Label, grad: &mut [f64]) -> f64;

    fn loss(&self, scores: &[f64], label: Label) -> f64 {
        let mut scratch = vec![0.0; scores.len()];
        self.loss_grad(scores, label, &mut scratch)
    }
}

/// Maps a score vector onto a prediction or a rejection.
pub trait DecisionRule: Send + Sync {
    fn decide(&self, scores: &[f64]) -> Decision;
}

impl<F> DecisionRule for F
where
    F: Fn(&[f64]) -> Decision + Send + Sync,
{
    fn decide(&self, scores: &[f64]) -> Decision {
        self(scores)
    }
}
