//! Comparison methods: confidence thresholding of a softmax classifier
//! ([`sce`]), an extra rejection output trained with cross-entropy
//! ([`defer`]) and the angle-based bent-hinge method ([`angle`]).
//!
//! SCE and ANGLE each carry one hyperparameter (temperature `T`, threshold
//! `delta`) chosen on validation data by [`tune`].

pub mod angle;
pub mod defer;
pub mod sce;

pub use angle::{
    angle_decide, angle_loss_grad, angle_vertices, bent_hinge, soft_threshold, tune_delta, Angle,
    AngleConfig, AngleRule, BendSlope,
};
pub use defer::{defer_decide, defer_loss_grad, Defer, DeferRule, DeferSign};
pub use sce::{sce_decide, sce_loss_grad, softmax, tune_temperature, Sce, SceRule};

use crate::domain::{compute_metrics, Decision, Label, RejectionCost};
use crate::error::{Error, Result};
use crate::models::ScoreModel;

/// 20 log-spaced values in `[1e-3, 1]` followed by the integers `2..=10`.
///
/// The last log-spaced value is exactly `1.0`, so `T = 1` is always a
/// candidate.
pub fn candidate_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..20)
        .map(|i| if i == 19 { 1.0 } else { 10f64.powf(-3.0 + 3.0 * i as f64 / 19.0) })
        .collect();
    grid.extend((2..=10).map(f64::from));
    grid
}

/// Threshold candidates for ANGLE: `0` followed by [`candidate_grid`], so the
/// untuned default `delta = 0` is always considered.
pub fn delta_candidates() -> Vec<f64> {
    let mut grid = vec![0.0];
    grid.extend(candidate_grid());
    grid
}

/// A selected hyperparameter and the validation zero-one-c risk it achieved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuned {
    pub value: f64,
    pub risk: f64,
}

/// Picks the candidate with the lowest zero-one-c risk of `rule(candidate,
/// scores)` on the given validation scores; ties go to the smallest candidate.
pub fn tune<F>(
    scores: &[Vec<f64>],
    labels: &[Label],
    cost: RejectionCost,
    candidates: &[f64],
    rule: F,
) -> Result<Tuned>
where
    F: Fn(f64, &[f64]) -> Decision,
{
    tune_by(candidates, |v| validation_risk(scores, labels, cost, |g| rule(v, g)))
}

/// Picks the candidate minimising an arbitrary validation risk; ties go to the
/// smallest candidate.
pub fn tune_by<F>(candidates: &[f64], risk_of: F) -> Result<Tuned>
where
    F: Fn(f64) -> Result<f64>,
{
    if candidates.is_empty() {
        return Err(Error::Empty("candidates"));
    }
    let mut sorted = candidates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best: Option<Tuned> = None;
    for &v in &sorted {
        let risk = risk_of(v)?;
        if best.is_none_or(|b| risk < b.risk) {
            best = Some(Tuned { value: v, risk });
        }
    }
    Ok(best.expect("candidates are non-empty"))
}

/// Zero-one-c risk of a decision rule applied to precomputed scores.
pub fn validation_risk<F>(scores: &[Vec<f64>], labels: &[Label], cost: RejectionCost, rule: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Decision,
{
    let decisions: Vec<Decision> = scores.iter().map(|g| rule(g)).collect();
    Ok(compute_metrics(&decisions, labels, cost)?.risk01c)
}

/// Scores of `model` on every sample of `data`.
pub fn model_scores<M: ScoreModel + ?Sized>(model: &M, data: &crate::domain::Dataset) -> Result<Vec<Vec<f64>>> {
    data.iter().map(|s| model.forward(&s.features)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = candidate_grid();
        assert_eq!(g.len(), 29);
        assert!((g[0] - 1e-3).abs() < 1e-18);
        assert_eq!(g[19], 1.0);
        assert_eq!(g[28], 10.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(delta_candidates()[0], 0.0);
    }

    #[test]
    fn single_candidate_is_returned() {
        let scores = vec![vec![1.0, 0.0]];
        let labels = vec![Label::POSITIVE];
        let c = RejectionCost::new(0.2).unwrap();
        let t = tune(&scores, &labels, c, &[3.5], |_, _| Decision::Predict(Label::POSITIVE)).unwrap();
        assert_eq!(t.value, 3.5);
        assert!(tune(&scores, &labels, c, &[], |_, _| Decision::Predict(Label::POSITIVE)).is_err());
    }

    #[test]
    fn ties_go_to_smallest() {
        let scores = vec![vec![1.0, 0.0]];
        let labels = vec![Label::POSITIVE];
        let c = RejectionCost::new(0.2).unwrap();
        let t = tune(&scores, &labels, c, &[5.0, 0.5, 2.0], |_, _| Decision::Predict(Label::POSITIVE)).unwrap();
        assert_eq!(t.value, 0.5);
        assert_eq!(t.risk, 0.0);
    }
}
