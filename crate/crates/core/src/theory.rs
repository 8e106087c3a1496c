//! Exact oracles for classification with rejection and numerical auditors
//! for the surrogate's guarantees.
//!
//! Everything here works on known class posteriors: Chow's rule, the Bayes
//! cost-sensitive binary classifier, the one-vs-rest reconstruction of Chow's
//! rule from `K` such classifiers, the psi-transforms for the squared and hinge
//! losses, and an exhaustive evaluator of the excess-risk chain on finite
//! distributions.

use crate::domain::{Decision, Label, RejectReason, RejectionCost};
use crate::error::{Error, Result};
use crate::losses::{ConditionalRiskMinimizer, MarginLoss};
use crate::surrogate::decide;

/// Class-posterior vector `eta(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSimplex(Vec<f64>);

impl PosteriorSimplex {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty("posterior"));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidSimplex(format!("negative or non-finite entry in {probs:?}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidSimplex(format!("entries sum to {sum}")));
        }
        Ok(PosteriorSimplex(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest entry and its index (smallest index on ties).
    pub fn max(&self) -> (Label, f64) {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > self.0[best] {
                best = i;
            }
        }
        (Label::from_index(best), self.0[best])
    }
}

/// A finitely supported input distribution with known posteriors.
#[derive(Debug, Clone)]
pub struct FiniteDistribution {
    points: Vec<SupportPoint>,
    classes: usize,
}

#[derive(Debug, Clone)]
pub struct SupportPoint {
    pub id: usize,
    pub eta: PosteriorSimplex,
    pub weight: f64,
}

impl FiniteDistribution {
    pub fn new(points: Vec<SupportPoint>) -> Result<Self> {
        let classes = points.first().ok_or(Error::Empty("support"))?.eta.len();
        if points.iter().any(|p| p.eta.len() != classes) {
            return Err(Error::InvalidArgument("posteriors of differing length".into()));
        }
        if points.iter().any(|p| !(p.weight >= 0.0)) {
            return Err(Error::InvalidArgument("negative marginal weight".into()));
        }
        let total: f64 = points.iter().map(|p| p.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("marginal weights sum to {total}")));
        }
        Ok(FiniteDistribution { points, classes })
    }

    pub fn points(&self) -> &[SupportPoint] {
        &self.points
    }

    pub fn classes(&self) -> usize {
        self.classes
    }
}

/// Chow's rule: reject when `max_y eta_y <= 1 - c`, else predict the argmax.
pub fn chow_rule(eta: &PosteriorSimplex, cost: RejectionCost) -> Decision {
    let (label, top) = eta.max();
    if top <= 1.0 - cost.value() {
        Decision::Reject(RejectReason::Oracle)
    } else {
        Decision::Predict(label)
    }
}

/// Verdict of a binary classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Positive,
    Negative,
}

/// Bayes cost-sensitive binary classifier with false-positive cost `alpha`:
/// positive iff `p(y = +1 | x) > alpha`.
pub fn bayes_cs_binary(p_pos: f64, alpha: f64) -> Verdict {
    if p_pos > alpha {
        Verdict::Positive
    } else {
        Verdict::Negative
    }
}

/// Binary Chow's rule assembled from the two classifiers at `alpha = 1 - c`
/// and `alpha = c`.
pub fn binary_three_way(p_pos: f64, cost: RejectionCost) -> Decision {
    let c = cost.value();
    if bayes_cs_binary(p_pos, 1.0 - c) == Verdict::Positive {
        Decision::Predict(Label::POSITIVE)
    } else if bayes_cs_binary(p_pos, c) == Verdict::Negative {
        Decision::Predict(Label::NEGATIVE)
    } else {
        Decision::Reject(RejectReason::Oracle)
    }
}

/// Chow's rule assembled from `K` one-vs-rest classifiers at `alpha = 1 - c`.
///
/// # Panics
///
/// If two verdicts are positive, which cannot happen for `c < 0.5` on a valid
/// simplex.
pub fn ensemble_chow(eta: &PosteriorSimplex, cost: RejectionCost) -> Decision {
    let alpha = 1.0 - cost.value();
    let mut positives = eta
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, &p)| bayes_cs_binary(p, alpha) == Verdict::Positive)
        .map(|(i, _)| i);
    match (positives.next(), positives.next()) {
        (None, _) => Decision::Reject(RejectReason::Oracle),
        (Some(i), None) => Decision::Predict(Label::from_index(i)),
        (Some(_), Some(_)) => panic!("two one-vs-rest verdicts above 1 - c = {alpha}"),
    }
}

/// Score vector whose signs are the Bayes one-vs-rest verdicts (`+1`/`-1`).
pub fn optimal_scores(eta: &PosteriorSimplex, cost: RejectionCost) -> Vec<f64> {
    let alpha = 1.0 - cost.value();
    eta.probs()
        .iter()
        .map(|&p| match bayes_cs_binary(p, alpha) {
            Verdict::Positive => 1.0,
            Verdict::Negative => -1.0,
        })
        .collect()
}

/// Componentwise minimiser of the pointwise conditional surrogate risk: each
/// `g_y` minimises `eta_y c phi(v) + (1 - eta_y)(1 - c) phi(-v)`.
pub fn conditional_risk_minimizer(
    loss: MarginLoss,
    eta: &PosteriorSimplex,
    cost: RejectionCost,
) -> Vec<f64> {
    let c = cost.value();
    let minimizer = ConditionalRiskMinimizer::default();
    eta.probs()
        .iter()
        .map(|&p| {
            minimizer
                .argmin(loss, p * c, (1.0 - p) * (1.0 - c))
                .expect("weights are non-negative and sum to a positive value")
        })
        .collect()
}

fn check_psi_loss(loss: MarginLoss) -> Result<()> {
    match loss {
        MarginLoss::Squared | MarginLoss::Hinge => Ok(()),
        other => Err(Error::InvalidArgument(format!(
            "no closed-form psi-transform implemented for the {other} loss"
        ))),
    }
}

/// The psi-transform of the cost-sensitive binary problem with weights
/// `c` (missed positive) and `1 - c` (false positive): a convex,
/// non-decreasing `psi` with `psi(0) = 0` and
/// `psi(zero-one regret) <= surrogate regret`.
///
/// For the hinge loss `psi(theta) = theta`. For the squared loss the
/// wrong-sign regret at a point with `|eta - (1 - c)| = theta` is
/// `theta^2 / (2c(1-c) -+ theta(1-2c))` depending on the side; `psi` is the
/// smaller branch, `theta^2 / (2c(1-c) + theta(1-2c))`.
pub fn psi(loss: MarginLoss, cost: RejectionCost, theta: f64) -> Result<f64> {
    check_psi_loss(loss)?;
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::OutOfDomain(theta));
    }
    let c = cost.value();
    Ok(match loss {
        MarginLoss::Hinge => theta,
        _ => theta * theta / (2.0 * c * (1.0 - c) + theta * (1.0 - 2.0 * c)),
    })
}

/// Inverse of [`psi`]: bounds the zero-one regret of one cost-sensitive
/// binary problem by its surrogate regret `eps`.
pub fn psi_inverse(loss: MarginLoss, cost: RejectionCost, eps: f64) -> Result<f64> {
    check_psi_loss(loss)?;
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::OutOfDomain(eps));
    }
    let c = cost.value();
    Ok(match loss {
        MarginLoss::Hinge => eps,
        _ => {
            // positive root of theta^2 - eps*b*theta - eps*a = 0
            let a = 2.0 * c * (1.0 - c);
            let b = 1.0 - 2.0 * c;
            0.5 * (eps * b + (eps * eps * b * b + 4.0 * eps * a).sqrt())
        }
    })
}

/// Surrogate with the zero-one loss on verdicts (`g > 0` is a positive
/// verdict): `c [g_y <= 0] + (1 - c) sum_{y' != y} [g_{y'} > 0]`.
pub fn cs_zero_one_loss(cost: RejectionCost, g: &[f64], y: Label) -> f64 {
    let c = cost.value();
    let mut v = if g[y.index()] > 0.0 { 0.0 } else { c };
    for (j, &gj) in g.iter().enumerate() {
        if j != y.index() && gj > 0.0 {
            v += 1.0 - c;
        }
    }
    v
}

/// Both sides of the zero-one-c / cost-sensitive zero-one regret inequality.
#[derive(Debug, Clone)]
pub struct ExcessChainReport {
    /// Zero-one-c regret of the rule induced by the scores.
    pub lhs: f64,
    /// Regret of the cost-sensitive surrogate under the zero-one loss.
    pub rhs: f64,
    pub violated: bool,
    /// Zero-one regret of each one-vs-rest problem; these sum to `rhs`.
    pub class_regrets: Vec<f64>,
}

/// Tolerance used when flagging a violated inequality.
pub const AUDIT_TOLERANCE: f64 = 1e-12;

/// Evaluates the excess-risk inequality exactly on a finite distribution.
///
/// The zero-one-c optimum comes from Chow's rule; the surrogate optimum is
/// found by enumerating all `2^K` verdict combinations at each support point.
pub fn audit_excess_chain(
    dist: &FiniteDistribution,
    scores: &[Vec<f64>],
    cost: RejectionCost,
) -> Result<ExcessChainReport> {
    if scores.len() != dist.points().len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: dist.points().len(),
        });
    }
    let k = dist.classes();
    if k > 20 {
        return Err(Error::InvalidArgument("verdict enumeration limited to K <= 20".into()));
    }
    let c = cost.value();
    let expected_01c = |d: Decision, eta: &PosteriorSimplex| -> f64 {
        match d {
            Decision::Reject(_) => c,
            Decision::Predict(l) => 1.0 - eta.probs()[l.index()],
        }
    };
    let expected_cs01 = |g: &[f64], eta: &PosteriorSimplex| -> f64 {
        eta.probs()
            .iter()
            .enumerate()
            .map(|(y, &p)| p * cs_zero_one_loss(cost, g, Label::from_index(y)))
            .sum()
    };

    let (mut lhs, mut rhs) = (0.0, 0.0);
    let mut class_regrets = vec![0.0; k];
    for (point, g) in dist.points().iter().zip(scores) {
        if g.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: g.len(),
            });
        }
        let eta = &point.eta;
        let w = point.weight;
        lhs += w * (expected_01c(decide(g), eta) - expected_01c(chow_rule(eta, cost), eta));

        let best = (0..1usize << k)
            .map(|mask| {
                let verdicts: Vec<f64> =
                    (0..k).map(|j| if mask >> j & 1 == 1 { 1.0 } else { -1.0 }).collect();
                expected_cs01(&verdicts, eta)
            })
            .fold(f64::INFINITY, f64::min);
        rhs += w * (expected_cs01(g, eta) - best);

        for (j, (&gj, &p)) in g.iter().zip(eta.probs()).enumerate() {
            let (miss, false_pos) = (p * c, (1.0 - p) * (1.0 - c));
            let risk = if gj > 0.0 { false_pos } else { miss };
            class_regrets[j] += w * (risk - miss.min(false_pos));
        }
    }
    Ok(ExcessChainReport {
        lhs,
        rhs,
        violated: lhs > rhs + AUDIT_TOLERANCE,
        class_regrets,
    })
}

/// The psi-bounded step: the cost-sensitive zero-one regret against
/// `sum_i psi^{-1}(surrogate regret of class i)`.
#[derive(Debug, Clone)]
pub struct PsiBoundReport {
    /// Cost-sensitive zero-one regret (the `rhs` of [`ExcessChainReport`]).
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
    /// Surrogate regret of each one-vs-rest problem.
    pub class_surrogate_regrets: Vec<f64>,
}

pub fn audit_psi_bound(
    dist: &FiniteDistribution,
    scores: &[Vec<f64>],
    cost: RejectionCost,
    loss: MarginLoss,
) -> Result<PsiBoundReport> {
    check_psi_loss(loss)?;
    let chain = audit_excess_chain(dist, scores, cost)?;
    let c = cost.value();
    let k = dist.classes();
    let mut regrets = vec![0.0; k];
    for (point, g) in dist.points().iter().zip(scores) {
        for (j, (&gj, &p)) in g.iter().zip(point.eta.probs()).enumerate() {
            let (a, b) = (p * c, (1.0 - p) * (1.0 - c));
            let risk = a * loss.eval(gj) + b * loss.eval(-gj);
            let best = match loss {
                MarginLoss::Hinge => 2.0 * a.min(b),
                _ if a + b > 0.0 => 4.0 * a * b / (a + b),
                _ => 0.0,
            };
            regrets[j] += point.weight * (risk - best).max(0.0);
        }
    }
    let rhs = regrets
        .iter()
        .map(|&r| psi_inverse(loss, cost, r))
        .sum::<Result<f64>>()?;
    Ok(PsiBoundReport {
        lhs: chain.rhs,
        rhs,
        violated: chain.rhs > rhs + AUDIT_TOLERANCE,
        class_surrogate_regrets: regrets,
    })
}
