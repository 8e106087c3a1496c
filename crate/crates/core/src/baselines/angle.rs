//! Angle-based classification with rejection.
//!
//! Scores live in `R^{K-1}`; class `j` is represented by the vertex `y_j` of a
//! regular simplex centred at the origin and the decision looks at the
//! projections `y_j . g`.

use super::{delta_candidates, model_scores, tune, Tuned};
use crate::domain::{Dataset, Decision, Label, RejectReason, RejectionCost};
use crate::error::{Error, Result};
use crate::models::ScoreModel;
use crate::objective::{DecisionRule, Objective};

/// The `K` simplex vertices in `R^{K-1}`.
pub fn angle_vertices(classes: usize) -> Result<Vec<Vec<f64>>> {
    if classes < 2 {
        return Err(Error::TooFewClasses(classes));
    }
    let k = classes as f64;
    let m = classes - 1;
    let mut vertices = vec![vec![(k - 1.0).powf(-0.5); m]];
    let shift = -(1.0 + k.sqrt()) / (k - 1.0).powf(1.5);
    let scale = (k / (k - 1.0)).sqrt();
    for j in 1..classes {
        let mut v = vec![shift; m];
        v[j - 1] += scale;
        vertices.push(v);
    }
    Ok(vertices)
}

/// Value and derivative of the bent hinge: `1 - a u` for `u < 0`, `1 - u` on
/// `[0, 1)` and `0` from `1` on. At a kink the right-hand derivative is used.
pub fn bent_hinge(u: f64, a: f64) -> (f64, f64) {
    if u < 0.0 {
        (1.0 - a * u, -a)
    } else if u < 1.0 {
        (1.0 - u, -1.0)
    } else {
        (0.0, 0.0)
    }
}

/// `sign(v) * max(|v| - delta, 0)`.
pub fn soft_threshold(v: f64, delta: f64) -> f64 {
    v.signum() * (v.abs() - delta).max(0.0)
}

/// Which of the two suggested bend slopes to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BendSlope {
    /// `(K - 1 - c) / (K c - c)`
    #[default]
    A1,
    /// `(K - 1)(1 - c) / c`
    A2,
}

impl BendSlope {
    pub fn value(self, classes: usize, cost: RejectionCost) -> f64 {
        let k = classes as f64;
        let c = cost.value();
        match self {
            BendSlope::A1 => (k - 1.0 - c) / (k * c - c),
            BendSlope::A2 => (k - 1.0) * (1.0 - c) / c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleConfig {
    pub a: f64,
    pub delta: f64,
    pub vertices: Vec<Vec<f64>>,
}

impl AngleConfig {
    pub fn new(classes: usize, cost: RejectionCost, slope: BendSlope) -> Result<Self> {
        Ok(AngleConfig {
            a: slope.value(classes, cost),
            delta: 0.0,
            vertices: angle_vertices(classes)?,
        })
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    fn projections(&self, g: &[f64]) -> Vec<f64> {
        self.vertices
            .iter()
            .map(|v| v.iter().zip(g).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// `sum_{y' != y} bent_hinge(-y_{y'} . g)` and its gradient in `g`.
pub fn angle_loss_grad(g: &[f64], y: Label, config: &AngleConfig) -> (f64, Vec<f64>) {
    let mut loss = 0.0;
    let mut grad = vec![0.0; g.len()];
    for (j, (v, p)) in config.vertices.iter().zip(config.projections(g)).enumerate() {
        if j == y.index() {
            continue;
        }
        let (val, d) = bent_hinge(-p, config.a);
        loss += val;
        for (gi, vi) in grad.iter_mut().zip(v) {
            *gi -= d * vi;
        }
    }
    (loss, grad)
}

/// Rejects when every soft-thresholded projection vanishes, otherwise predicts
/// the class with the largest projection.
pub fn angle_decide(g: &[f64], config: &AngleConfig) -> Decision {
    decide_with_delta(g, config, config.delta)
}

fn decide_with_delta(g: &[f64], config: &AngleConfig, delta: f64) -> Decision {
    let proj = config.projections(g);
    if proj.iter().all(|&p| soft_threshold(p, delta) == 0.0) {
        return Decision::Reject(RejectReason::Distance);
    }
    let (arg, _) = proj
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    Decision::Predict(Label::from_index(arg))
}

/// Threshold minimising validation zero-one-c risk over `candidates`
/// (defaults to [`delta_candidates`] when `None`).
pub fn tune_delta<M: ScoreModel + ?Sized>(
    model: &M,
    val: &Dataset,
    cost: RejectionCost,
    config: &AngleConfig,
    candidates: Option<&[f64]>,
) -> Result<Tuned> {
    let scores = model_scores(model, val)?;
    let grid;
    let candidates = match candidates {
        Some(c) => c,
        None => {
            grid = delta_candidates();
            &grid
        }
    };
    tune(&scores, &val.labels(), cost, candidates, |d, g| {
        decide_with_delta(g, config, d)
    })
}

#[derive(Debug, Clone)]
pub struct Angle {
    pub config: AngleConfig,
}

impl Objective for Angle {
    fn output_dim(&self, classes: usize) -> usize {
        classes - 1
    }

    fn loss_grad(&self, scores: &[f64], label: Label, grad: &mut [f64]) -> f64 {
        let (loss, g) = angle_loss_grad(scores, label, &self.config);
        grad.copy_from_slice(&g);
        loss
    }
}

#[derive(Debug, Clone)]
pub struct AngleRule {
    pub config: AngleConfig,
}

impl DecisionRule for AngleRule {
    fn decide(&self, scores: &[f64]) -> Decision {
        angle_decide(scores, &self.config)
    }
}
