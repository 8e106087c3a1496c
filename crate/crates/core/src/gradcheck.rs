//! Central-difference gradient checks for every loss, directly in the scores
//! and through both model kinds.
//!
//! A coordinate whose forward and backward differences disagree is straddling
//! a kink; it is skipped and counted rather than compared.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baselines::{Angle, AngleConfig, BendSlope, Defer, Sce};
use crate::domain::{Dataset, Label, LabeledSample, RejectionCost};
use crate::losses::MarginLoss;
use crate::models::{LinearModel, MlpModel, ScoreModel};
use crate::objective::Objective;
use crate::surrogate::CsSurrogate;

/// Finite-difference step.
pub const STEP: f64 = 1e-6;
/// Pass threshold on the relative error.
pub const TOLERANCE: f64 = 1e-4;
/// One-sided differences further apart than this mark a kink.
const KINK_GAP: f64 = 1e-4;

/// `|a - n| / max(1, |a|, |n|)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / 1f64.max(analytic.abs()).max(numeric.abs())
}

/// Central differences of `f` at `x`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = f(&probe);
            probe[i] = orig - h;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub name: String,
    pub checked: usize,
    pub skipped: usize,
    pub max_rel_err: f64,
}

impl GradCheck {
    pub fn passed(&self) -> bool {
        self.checked > 0 && self.max_rel_err < TOLERANCE
    }

    fn new(name: impl Into<String>) -> Self {
        GradCheck {
            name: name.into(),
            checked: 0,
            skipped: 0,
            max_rel_err: 0.0,
        }
    }

    /// Compares `analytic` with differences of `f` at `x`.
    pub fn compare(&mut self, f: impl Fn(&[f64]) -> f64, x: &[f64], analytic: &[f64]) {
        let f0 = f(x);
        let mut probe = x.to_vec();
        for i in 0..x.len() {
            let orig = probe[i];
            probe[i] = orig + STEP;
            let up = f(&probe);
            probe[i] = orig - STEP;
            let down = f(&probe);
            probe[i] = orig;
            let fwd = (up - f0) / STEP;
            let bwd = (f0 - down) / STEP;
            if relative_error(fwd, bwd) > KINK_GAP {
                self.skipped += 1;
                continue;
            }
            self.checked += 1;
            self.max_rel_err = self.max_rel_err.max(relative_error(analytic[i], (up - down) / (2.0 * STEP)));
        }
    }
}

/// Scalar check of a margin loss at `points` random arguments in `[-3, 3]`.
pub fn check_margin_loss(loss: MarginLoss, points: usize, rng: &mut impl Rng) -> GradCheck {
    let mut r = GradCheck::new(format!("phi {loss}"));
    for _ in 0..points {
        let z = rng.random_range(-3.0..3.0);
        r.compare(|v| loss.eval(v[0]), &[z], &[loss.grad(z)]);
    }
    r
}

/// Checks an objective's gradient in the scores at random score vectors.
pub fn check_objective_scores(name: &str, obj: &dyn Objective, classes: usize, trials: usize, rng: &mut impl Rng) -> GradCheck {
    let mut r = GradCheck::new(name);
    let dim = obj.output_dim(classes);
    let mut grad = vec![0.0; dim];
    for _ in 0..trials {
        let g: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y = Label::from_index(rng.random_range(0..classes));
        obj.loss_grad(&g, y, &mut grad);
        r.compare(|s| obj.loss(s, y), &g, &grad);
    }
    r
}

/// Checks the gradient of the mean objective over `data` with respect to the
/// parameters of `model`.
pub fn check_through_model<M: ScoreModel + Clone>(name: &str, model: &M, obj: &dyn Objective, data: &Dataset) -> GradCheck {
    let mut r = GradCheck::new(name);
    let n = data.len() as f64;
    let risk = |params: &[f64]| {
        let mut m = model.clone();
        m.params_mut().copy_from_slice(params);
        data.iter().map(|s| obj.loss(&m.forward_unchecked(&s.features), s.label)).sum::<f64>() / n
    };
    let mut analytic = vec![0.0; model.params().len()];
    let mut sg = vec![0.0; model.output_dim()];
    for s in data.iter() {
        obj.loss_grad(&model.forward_unchecked(&s.features), s.label, &mut sg);
        model.accumulate_backward(&s.features, &sg, &mut analytic);
    }
    analytic.iter_mut().for_each(|g| *g /= n);
    r.compare(risk, model.params(), &analytic);
    r
}

fn random_dataset(n: usize, dim: usize, classes: usize, rng: &mut impl Rng) -> Dataset {
    let samples = (0..n)
        .map(|i| LabeledSample {
            features: (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect(),
            label: Label::from_index(i % classes),
        })
        .collect();
    Dataset::new(samples, classes).expect("generated data is valid")
}

/// The full suite: every margin loss, the surrogate through both model kinds,
/// and the three baseline losses in the scores and through a linear model.
pub fn run_suite(seed: u64) -> Vec<GradCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cost = RejectionCost::new(0.2).expect("valid cost");
    let classes = 3;
    let dim = 4;
    let data = random_dataset(6, dim, classes, &mut rng);
    let mut out = Vec::new();

    for loss in MarginLoss::ALL {
        out.push(check_margin_loss(loss, 200, &mut rng));
    }
    for loss in MarginLoss::ALL {
        let obj = CsSurrogate::new(loss, cost);
        out.push(check_objective_scores(&format!("L_CS {loss} / scores"), &obj, classes, 50, &mut rng));
        let lin = LinearModel::init(dim, classes, &mut rng);
        out.push(check_through_model(&format!("L_CS {loss} / linear"), &lin, &obj, &data));
        let mlp = MlpModel::init(dim, 16, classes, &mut rng);
        out.push(check_through_model(&format!("L_CS {loss} / mlp"), &mlp, &obj, &data));
    }
    let angle = Angle {
        config: AngleConfig::new(classes, cost, BendSlope::A1).expect("K >= 2"),
    };
    let baselines: [(&str, Box<dyn Objective>); 3] =
        [("sce", Box::new(Sce)), ("defer", Box::new(Defer::new(cost))), ("angle", Box::new(angle))];
    for (name, obj) in &baselines {
        out.push(check_objective_scores(&format!("{name} / scores"), obj.as_ref(), classes, 50, &mut rng));
        let lin = LinearModel::init(dim, obj.output_dim(classes), &mut rng);
        out.push(check_through_model(&format!("{name} / linear"), &lin, obj.as_ref(), &data));
        let mlp = MlpModel::init(dim, 16, obj.output_dim(classes), &mut rng);
        out.push(check_through_model(&format!("{name} / mlp"), &mlp, obj.as_ref(), &data));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_difference_of_a_cubic() {
        let d = central_difference(|x| x[0].powi(3) + 2.0 * x[1], &[2.0, 5.0], 1e-5);
        assert!((d[0] - 12.0).abs() < 1e-6);
        assert!((d[1] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn kinks_are_skipped() {
        let mut r = GradCheck::new("abs");
        r.compare(|x| x[0].abs(), &[0.0], &[0.0]);
        assert_eq!((r.checked, r.skipped), (0, 1));
        r.compare(|x| x[0].abs(), &[1.0], &[1.0]);
        assert!(r.passed());
    }

    #[test]
    fn wrong_gradient_fails() {
        let mut r = GradCheck::new("square");
        r.compare(|x| x[0] * x[0], &[1.0], &[3.0]);
        assert!(!r.passed());
    }

    #[test]
    fn relative_error_floor() {
        assert_eq!(relative_error(1e-9, 0.0), 1e-9);
        assert_eq!(relative_error(100.0, 99.0), 0.01);
    }
}
