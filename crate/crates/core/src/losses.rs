//! Binary margin losses `phi(z)` with analytic derivatives and property flags.
//!
//! All nine losses are classification-calibrated. Two of them (ramp and
//! sigmoid) are symmetric, `phi(z) + phi(-z) = 1`, and five are convex.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Margin at which exponential-loss values are frozen during training.
pub const EXP_TRAIN_CLAMP: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarginLoss {
    Squared,
    SquaredHinge,
    Exponential,
    Logistic,
    Hinge,
    Savage,
    Tangent,
    Ramp,
    Sigmoid,
}

impl MarginLoss {
    pub const ALL: [MarginLoss; 9] = [
        MarginLoss::Squared,
        MarginLoss::SquaredHinge,
        MarginLoss::Exponential,
        MarginLoss::Logistic,
        MarginLoss::Hinge,
        MarginLoss::Savage,
        MarginLoss::Tangent,
        MarginLoss::Ramp,
        MarginLoss::Sigmoid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MarginLoss::Squared => "squared",
            MarginLoss::SquaredHinge => "squared_hinge",
            MarginLoss::Exponential => "exponential",
            MarginLoss::Logistic => "logistic",
            MarginLoss::Hinge => "hinge",
            MarginLoss::Savage => "savage",
            MarginLoss::Tangent => "tangent",
            MarginLoss::Ramp => "ramp",
            MarginLoss::Sigmoid => "sigmoid",
        }
    }

    pub fn is_convex(self) -> bool {
        matches!(
            self,
            MarginLoss::Squared
                | MarginLoss::SquaredHinge
                | MarginLoss::Exponential
                | MarginLoss::Logistic
                | MarginLoss::Hinge
        )
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, MarginLoss::Ramp | MarginLoss::Sigmoid)
    }

    pub fn is_calibrated(self) -> bool {
        true
    }

    /// Points where the loss is not differentiable.
    pub fn kinks(self) -> &'static [f64] {
        match self {
            MarginLoss::Hinge | MarginLoss::SquaredHinge => &[1.0],
            MarginLoss::Ramp => &[-1.0, 1.0],
            _ => &[],
        }
    }

    /// `phi(z)`.
    pub fn eval(self, z: f64) -> f64 {
        match self {
            MarginLoss::Squared => (1.0 - z).powi(2),
            MarginLoss::SquaredHinge => (1.0 - z).max(0.0).powi(2),
            MarginLoss::Exponential => (-z).exp(),
            MarginLoss::Logistic => {
                if z >= 0.0 {
                    (-z).exp().ln_1p()
                } else {
                    -z + z.exp().ln_1p()
                }
            }
            MarginLoss::Hinge => (1.0 - z).max(0.0),
            MarginLoss::Savage => sigmoid(-2.0 * z).powi(2),
            MarginLoss::Tangent => (2.0 * z.atan() - 1.0).powi(2),
            MarginLoss::Ramp => (0.5 - 0.5 * z).clamp(0.0, 1.0),
            MarginLoss::Sigmoid => sigmoid(-z),
        }
    }

    /// `phi'(z)`, with right-continuous subgradients at kinks: hinge and
    /// squared hinge give 0 at `z = 1`; ramp gives -0.5 at `z = -1` and 0 at
    /// `z = 1`.
    pub fn grad(self, z: f64) -> f64 {
        match self {
            MarginLoss::Squared => -2.0 * (1.0 - z),
            MarginLoss::SquaredHinge => -2.0 * (1.0 - z).max(0.0),
            MarginLoss::Exponential => -(-z).exp(),
            MarginLoss::Logistic => -sigmoid(-z),
            MarginLoss::Hinge => {
                if z < 1.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            MarginLoss::Savage => {
                let s = sigmoid(-2.0 * z);
                -4.0 * s * s * (1.0 - s)
            }
            MarginLoss::Tangent => 4.0 * (2.0 * z.atan() - 1.0) / (1.0 + z * z),
            MarginLoss::Ramp => {
                if (-1.0..1.0).contains(&z) {
                    -0.5
                } else {
                    0.0
                }
            }
            MarginLoss::Sigmoid => {
                let s = sigmoid(z);
                -s * (1.0 - s)
            }
        }
    }

    /// Value used inside training objectives: identical to [`eval`](Self::eval)
    /// except that the exponential loss is frozen at `exp(30)` for margins
    /// below -30.
    pub fn eval_train(self, z: f64) -> f64 {
        match self {
            MarginLoss::Exponential => self.eval(z.max(-EXP_TRAIN_CLAMP)),
            _ => self.eval(z),
        }
    }

    /// Derivative of [`eval_train`](Self::eval_train).
    pub fn grad_train(self, z: f64) -> f64 {
        match self {
            MarginLoss::Exponential if z < -EXP_TRAIN_CLAMP => 0.0,
            _ => self.grad(z),
        }
    }
}

impl fmt::Display for MarginLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MarginLoss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MarginLoss::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// Logistic sigmoid, stable for large `|x|`.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `eta1 * phi(v) + (1 - eta1) * phi(-v)`.
pub fn binary_conditional_risk(loss: MarginLoss, eta1: f64, v: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&eta1));
    eta1 * loss.eval(v) + (1.0 - eta1) * loss.eval(-v)
}

/// Settings for the bounded one-dimensional minimiser.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalRiskMinimizer {
    /// Search interval is `[-bound, bound]`.
    pub bound: f64,
    /// Grid spacing of the initial scan.
    pub step: f64,
}

impl Default for ConditionalRiskMinimizer {
    fn default() -> Self {
        ConditionalRiskMinimizer {
            bound: 20.0,
            step: 1e-3,
        }
    }
}

impl ConditionalRiskMinimizer {
    /// Minimises `v -> w_pos * phi(v) + w_neg * phi(-v)` on `[-bound, bound]`.
    ///
    /// A dense grid scan locates the global basin (needed for the non-convex
    /// losses), then golden-section search refines inside the neighbouring
    /// cells. Among grid points whose value is within `1e-12` of the minimum
    /// the one closest to zero wins, so flat objectives (equal weights on a
    /// symmetric loss) report `0`.
    pub fn argmin(&self, loss: MarginLoss, w_pos: f64, w_neg: f64) -> Result<f64> {
        if !(w_pos >= 0.0 && w_neg >= 0.0) || w_pos + w_neg <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "weights must be non-negative with positive sum, got ({w_pos}, {w_neg})"
            )));
        }
        Ok(self.argmin_by(|v| w_pos * loss.eval(v) + w_neg * loss.eval(-v)))
    }

    /// Same search for an arbitrary objective on `[-bound, bound]`.
    pub fn argmin_by(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = (2.0 * self.bound / self.step).round() as i64;
        let point = |i: i64| -self.bound + i as f64 * self.step;

        let values: Vec<f64> = (0..=n).map(|i| f(point(i))).collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-12 * min.abs().max(1.0);
        let best = (0..=n)
            .filter(|&i| values[i as usize] <= min + tol)
            .min_by(|&a, &b| point(a).abs().total_cmp(&point(b).abs()))
            .expect("grid is non-empty");
        let v0 = point(best);

        let lo = (v0 - self.step).max(-self.bound);
        let hi = (v0 + self.step).min(self.bound);
        let v1 = golden_section(&f, lo, hi, 1e-10);
        if f(v1) < values[best as usize] - tol {
            v1
        } else {
            v0
        }
    }
}

/// [`ConditionalRiskMinimizer::argmin`] with default settings.
pub fn argmin_weighted_conditional_risk(loss: MarginLoss, w_pos: f64, w_neg: f64) -> Result<f64> {
    ConditionalRiskMinimizer::default().argmin(loss, w_pos, w_neg)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn table_flags() {
        let convex: Vec<_> = MarginLoss::ALL.iter().filter(|l| l.is_convex()).collect();
        assert_eq!(convex.len(), 5);
        let symmetric: Vec<_> = MarginLoss::ALL
            .iter()
            .copied()
            .filter(|l| l.is_symmetric())
            .collect();
        assert_eq!(symmetric, vec![MarginLoss::Ramp, MarginLoss::Sigmoid]);
        assert!(MarginLoss::ALL.iter().all(|l| l.is_calibrated()));
    }

    #[test]
    fn names_round_trip() {
        for l in MarginLoss::ALL {
            assert_eq!(l.name().parse::<MarginLoss>().unwrap(), l);
        }
        assert!("cauchy".parse::<MarginLoss>().is_err());
    }

    #[test]
    fn point_values() {
        assert_eq!(MarginLoss::Sigmoid.eval(0.0), 0.5);
        assert_eq!(MarginLoss::Hinge.eval(1.0), 0.0);
        assert_eq!(MarginLoss::Squared.eval(-1.0), 4.0);
        assert_eq!(MarginLoss::Ramp.eval(-3.0), 1.0);
        assert_eq!(MarginLoss::Ramp.eval(0.0), 0.5);
        assert!((MarginLoss::Savage.eval(0.0) - 0.25).abs() < 1e-15);
        assert!((MarginLoss::Tangent.eval(0.0) - 1.0).abs() < 1e-15);
        assert!((MarginLoss::Logistic.eval(0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn point_grads() {
        assert_eq!(MarginLoss::Sigmoid.grad(0.0), -0.25);
        assert_eq!(MarginLoss::Squared.grad(0.0), -2.0);
        assert_eq!(MarginLoss::Hinge.grad(2.0), 0.0);
        assert_eq!(MarginLoss::Hinge.grad(1.0), 0.0);
        assert_eq!(MarginLoss::SquaredHinge.grad(1.0), 0.0);
        assert_eq!(MarginLoss::Ramp.grad(-1.0), -0.5);
        assert_eq!(MarginLoss::Ramp.grad(1.0), 0.0);
    }

    #[test]
    fn logistic_is_stable() {
        assert!((MarginLoss::Logistic.eval(-800.0) - 800.0).abs() < 1e-9);
        assert!(MarginLoss::Logistic.eval(800.0) >= 0.0);
        assert!(MarginLoss::Logistic.grad(-800.0).is_finite());
        assert!(MarginLoss::Savage.grad(-400.0).is_finite());
        assert!(MarginLoss::Savage.eval(400.0).is_finite());
    }

    #[test]
    fn exponential_training_clamp() {
        let l = MarginLoss::Exponential;
        assert_eq!(l.eval_train(-100.0), 30f64.exp());
        assert_eq!(l.grad_train(-100.0), 0.0);
        assert_eq!(l.eval_train(-2.0), 2f64.exp());
    }

    #[test]
    fn symmetry_on_grid() {
        for l in [MarginLoss::Ramp, MarginLoss::Sigmoid] {
            for i in 0..=10_000 {
                let z = -50.0 + i as f64 * 0.01;
                assert!((l.eval(z) + l.eval(-z) - 1.0).abs() < 1e-12, "{l} at {z}");
            }
        }
    }

    #[test]
    fn gradients_match_central_differences() {
        let h = 1e-6;
        for l in MarginLoss::ALL {
            for i in 0..=1000 {
                let z = -5.0 + i as f64 * 0.01;
                if l.kinks().iter().any(|k| (z - k).abs() < 1e-3) {
                    continue;
                }
                let fd = (l.eval(z + h) - l.eval(z - h)) / (2.0 * h);
                let g = l.grad(z);
                assert!((g - fd).abs() / g.abs().max(1.0) < 1e-5, "{l} z={z}: {g} vs {fd}");
            }
        }
    }

    #[test]
    fn conditional_risk_examples() {
        assert!((binary_conditional_risk(MarginLoss::Sigmoid, 0.5, 3.7) - 0.5).abs() < 1e-15);
        assert_eq!(binary_conditional_risk(MarginLoss::Hinge, 1.0, 1.0), 0.0);
        assert!((binary_conditional_risk(MarginLoss::Squared, 0.7, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn argmin_examples() {
        let v = argmin_weighted_conditional_risk(MarginLoss::Squared, 0.8, 0.2).unwrap();
        assert!((v - 0.6).abs() < 1e-8, "{v}");
        let v = argmin_weighted_conditional_risk(MarginLoss::Hinge, 0.9, 0.1).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
        for l in [MarginLoss::Sigmoid, MarginLoss::Ramp] {
            assert_eq!(argmin_weighted_conditional_risk(l, 0.4, 0.4).unwrap(), 0.0);
        }
        assert!(argmin_weighted_conditional_risk(MarginLoss::Hinge, 0.0, 0.0).is_err());
        assert!(argmin_weighted_conditional_risk(MarginLoss::Hinge, -1.0, 2.0).is_err());
    }

    #[test]
    fn argmin_logistic_closed_form() {
        // minimiser of a*log(1+e^-v) + b*log(1+e^v) is ln(a/b)
        let v = argmin_weighted_conditional_risk(MarginLoss::Logistic, 0.75, 0.25).unwrap();
        assert!((v - 3f64.ln()).abs() < 1e-7);
    }

    #[test]
    fn classification_calibration_signs() {
        for l in MarginLoss::ALL {
            for k in 1..=19 {
                if k == 10 {
                    continue;
                }
                let eta = k as f64 * 0.05;
                let v = argmin_weighted_conditional_risk(l, eta, 1.0 - eta).unwrap();
                assert_eq!(v > 0.0, eta > 0.5, "{l} eta={eta} v={v}");
                assert!(v != 0.0, "{l} eta={eta}");
            }
        }
    }

    proptest! {
        #[test]
        fn convex_losses_midpoint(a in -20.0f64..20.0, b in -20.0f64..20.0) {
            for l in MarginLoss::ALL.into_iter().filter(|l| l.is_convex()) {
                let mid = l.eval(0.5 * (a + b));
                let avg = 0.5 * (l.eval(a) + l.eval(b));
                prop_assert!(mid <= avg + 1e-12 * avg.abs().max(1.0), "{}", l);
            }
        }
    }
}
