//! Shared primitives: labels, decisions, the rejection cost, datasets and the
//! zero-one-c evaluation metric.
//!
//! Labels are 1-based in the public vocabulary (`1..=K`) and expose a 0-based
//! [`Label::index`] for array access. Binary problems are plain `K = 2`
//! problems; the `{+1, -1}` convention maps `+1` to class 1 and `-1` to class 2.

use std::fmt;

use crate::error::{Error, Result};

/// A class label in `1..=K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(usize);

impl Label {
    /// Builds a label from its 1-based value, checking it against `classes`.
    pub fn new(value: usize, classes: usize) -> Result<Self> {
        if value == 0 || value > classes {
            return Err(Error::InvalidLabel { value, classes });
        }
        Ok(Label(value - 1))
    }

    /// Builds a label from a 0-based index. No range check.
    pub const fn from_index(index: usize) -> Self {
        Label(index)
    }

    /// 1-based value.
    pub const fn value(self) -> usize {
        self.0 + 1
    }

    /// 0-based index.
    pub const fn index(self) -> usize {
        self.0
    }

    /// Class 1, i.e. `+1` in binary notation.
    pub const POSITIVE: Label = Label(0);
    /// Class 2, i.e. `-1` in binary notation.
    pub const NEGATIVE: Label = Label(1);

    /// Maps a binary sign (`+1` / `-1`) onto the two-class labels.
    pub fn from_sign(sign: i8) -> Self {
        if sign > 0 {
            Label::POSITIVE
        } else {
            Label::NEGATIVE
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Why an input was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    /// No score is positive: no class is confident.
    Distance,
    /// Two or more scores are positive: conflicting one-vs-rest verdicts.
    Ambiguity,
    /// Emitted by exact oracles, which do not distinguish the two.
    Oracle,
}

/// Output of a classification rule with a reject option.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Predict(Label),
    Reject(RejectReason),
}

impl Decision {
    pub fn is_reject(&self) -> bool {
        matches!(self, Decision::Reject(_))
    }

    pub fn predicted(&self) -> Option<Label> {
        match self {
            Decision::Predict(l) => Some(*l),
            Decision::Reject(_) => None,
        }
    }

    /// Equality that ignores the rejection reason.
    pub fn same_outcome(&self, other: &Decision) -> bool {
        match (self, other) {
            (Decision::Predict(a), Decision::Predict(b)) => a == b,
            (Decision::Reject(_), Decision::Reject(_)) => true,
            _ => false,
        }
    }
}

/// The fixed cost `c` paid on rejection, restricted to `0 < c < 0.5`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RejectionCost(f64);

impl RejectionCost {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 && c < 0.5 {
            Ok(RejectionCost(c))
        } else {
            Err(Error::InvalidCost(c))
        }
    }

    pub const fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for RejectionCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: Vec<f64>,
    pub label: Label,
}

/// A non-empty collection of labelled samples sharing a feature dimension and
/// class count.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<LabeledSample>,
    dim: usize,
    classes: usize,
}

impl Dataset {
    pub fn new(samples: Vec<LabeledSample>, classes: usize) -> Result<Self> {
        let first = samples.first().ok_or(Error::Empty("dataset"))?;
        let dim = first.features.len();
        for s in &samples {
            if s.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.features.len(),
                });
            }
            if s.label.index() >= classes {
                return Err(Error::InvalidLabel {
                    value: s.label.value(),
                    classes,
                });
            }
            if s.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("non-finite feature value".into()));
            }
        }
        Ok(Dataset {
            samples,
            dim,
            classes,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false for a constructed dataset; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn iter(&self) -> impl Iterator<Item = &LabeledSample> {
        self.samples.iter()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.samples.iter().map(|s| s.label).collect()
    }

    pub fn into_samples(self) -> Vec<LabeledSample> {
        self.samples
    }

    /// Builds a dataset from a subset of indices (order as given).
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let samples = indices.iter().map(|&i| self.samples[i].clone()).collect();
        Dataset::new(samples, self.classes)
    }

    /// Same samples with labels replaced.
    pub fn with_labels(&self, labels: &[Label]) -> Result<Dataset> {
        if labels.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: self.len(),
            });
        }
        let samples = self
            .samples
            .iter()
            .zip(labels)
            .map(|(s, &label)| LabeledSample {
                features: s.features.clone(),
                label,
            })
            .collect();
        Dataset::new(samples, self.classes)
    }
}

/// Test-set summary under the zero-one-c loss.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub n: usize,
    pub risk01c: f64,
    pub rejection_ratio: f64,
    /// Error rate among accepted samples; 0 when nothing was accepted.
    pub accepted_error: f64,
    pub n_reject_distance: usize,
    pub n_reject_ambiguity: usize,
    /// Oracle-tagged rejections (neither distance nor ambiguity).
    pub n_reject_oracle: usize,
    pub n_wrong_accepted: usize,
    /// Set when no sample was accepted, so `accepted_error` is a placeholder.
    pub nothing_accepted: bool,
}

impl MetricsRecord {
    pub fn n_rejected(&self) -> usize {
        self.n_reject_distance + self.n_reject_ambiguity + self.n_reject_oracle
    }

    pub fn n_accepted(&self) -> usize {
        self.n - self.n_rejected()
    }
}

/// `c` on rejection, 0 on a correct prediction, 1 otherwise.
pub fn zero_one_c_loss(decision: Decision, label: Label, cost: RejectionCost) -> f64 {
    match decision {
        Decision::Reject(_) => cost.value(),
        Decision::Predict(p) if p == label => 0.0,
        Decision::Predict(_) => 1.0,
    }
}

pub fn compute_metrics(
    decisions: &[Decision],
    labels: &[Label],
    cost: RejectionCost,
) -> Result<MetricsRecord> {
    if decisions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: decisions.len(),
            right: labels.len(),
        });
    }
    if decisions.is_empty() {
        return Err(Error::Empty("decisions"));
    }
    let n = decisions.len();
    let (mut dist, mut amb, mut oracle, mut wrong) = (0usize, 0usize, 0usize, 0usize);
    for (d, y) in decisions.iter().zip(labels) {
        match d {
            Decision::Reject(RejectReason::Distance) => dist += 1,
            Decision::Reject(RejectReason::Ambiguity) => amb += 1,
            Decision::Reject(RejectReason::Oracle) => oracle += 1,
            Decision::Predict(p) if p != y => wrong += 1,
            Decision::Predict(_) => {}
        }
    }
    let rejected = dist + amb + oracle;
    let accepted = n - rejected;
    let c = cost.value();
    // Computed from counts so the decomposition identity holds exactly.
    let risk01c = (c * rejected as f64 + wrong as f64) / n as f64;
    let accepted_error = if accepted == 0 {
        0.0
    } else {
        wrong as f64 / accepted as f64
    };
    Ok(MetricsRecord {
        n,
        risk01c,
        rejection_ratio: rejected as f64 / n as f64,
        accepted_error,
        n_reject_distance: dist,
        n_reject_ambiguity: amb,
        n_reject_oracle: oracle,
        n_wrong_accepted: wrong,
        nothing_accepted: accepted == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cost(c: f64) -> RejectionCost {
        RejectionCost::new(c).unwrap()
    }

    #[test]
    fn zero_one_c_values() {
        let y = Label::new(2, 3).unwrap();
        let c = cost(0.3);
        assert_eq!(zero_one_c_loss(Decision::Reject(RejectReason::Distance), y, c), 0.3);
        assert_eq!(zero_one_c_loss(Decision::Predict(y), y, c), 0.0);
        assert_eq!(
            zero_one_c_loss(Decision::Predict(Label::new(1, 3).unwrap()), y, c),
            1.0
        );
    }

    #[test]
    fn cost_bounds_are_strict() {
        for bad in [0.0, 0.5, -0.1, 0.7, f64::NAN] {
            assert!(RejectionCost::new(bad).is_err());
        }
        assert!(RejectionCost::new(0.4999).is_ok());
    }

    #[test]
    fn label_range() {
        assert!(Label::new(0, 2).is_err());
        assert!(Label::new(3, 2).is_err());
        assert_eq!(Label::new(2, 2).unwrap(), Label::NEGATIVE);
        assert_eq!(Label::from_sign(1), Label::POSITIVE);
        assert_eq!(Label::from_sign(-1).value(), 2);
    }

    #[test]
    fn all_reject_costs_c() {
        let d = vec![Decision::Reject(RejectReason::Distance); 10];
        let y = vec![Label::POSITIVE; 10];
        let m = compute_metrics(&d, &y, cost(0.2)).unwrap();
        assert_eq!(m.risk01c, 0.2);
        assert_eq!(m.rejection_ratio, 1.0);
        assert_eq!(m.accepted_error, 0.0);
        assert!(m.nothing_accepted);
    }

    #[test]
    fn all_correct_is_zero() {
        let y = vec![Label::POSITIVE, Label::NEGATIVE];
        let d: Vec<_> = y.iter().map(|&l| Decision::Predict(l)).collect();
        let m = compute_metrics(&d, &y, cost(0.2)).unwrap();
        assert_eq!(m.risk01c, 0.0);
        assert_eq!(m.rejection_ratio, 0.0);
    }

    #[test]
    fn mixed_decomposition() {
        let y = vec![Label::POSITIVE; 4];
        let d = vec![
            Decision::Reject(RejectReason::Distance),
            Decision::Reject(RejectReason::Ambiguity),
            Decision::Predict(Label::NEGATIVE),
            Decision::Predict(Label::POSITIVE),
        ];
        let m = compute_metrics(&d, &y, cost(0.25)).unwrap();
        assert_eq!(m.risk01c, 0.375);
        assert_eq!(m.rejection_ratio, 0.5);
        assert_eq!(m.accepted_error, 0.5);
        assert_eq!((m.n_reject_distance, m.n_reject_ambiguity), (1, 1));
        assert_eq!(m.n_wrong_accepted, 1);
    }

    #[test]
    fn empty_and_mismatch_errors() {
        assert!(compute_metrics(&[], &[], cost(0.1)).is_err());
        assert!(compute_metrics(&[Decision::Predict(Label::POSITIVE)], &[], cost(0.1)).is_err());
    }

    #[test]
    fn dataset_validation() {
        let s = |v: Vec<f64>, l: usize| LabeledSample {
            features: v,
            label: Label::from_index(l),
        };
        assert!(Dataset::new(vec![], 2).is_err());
        assert!(Dataset::new(vec![s(vec![1.0], 0), s(vec![1.0, 2.0], 1)], 2).is_err());
        assert!(Dataset::new(vec![s(vec![1.0], 2)], 2).is_err());
        assert!(Dataset::new(vec![s(vec![f64::NAN], 0)], 2).is_err());
        let d = Dataset::new(vec![s(vec![1.0], 0), s(vec![2.0], 1)], 2).unwrap();
        assert_eq!((d.len(), d.dim(), d.classes()), (2, 1, 2));
    }
}
