//! Randomised audits of the exact oracles and of the excess-risk bounds.
//!
//! Each audit draws its instances in independent shards (one seed per shard)
//! and runs the shards in parallel, so the outcome depends only on the seed
//! and the instance count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};
use rayon::prelude::*;

use crate::domain::RejectionCost;
use crate::harness::splitmix64;
use crate::losses::MarginLoss;
use crate::surrogate::decide;
use crate::theory::{
    audit_excess_chain, audit_psi_bound, binary_three_way, chow_rule, conditional_risk_minimizer, ensemble_chow,
    FiniteDistribution, PosteriorSimplex, SupportPoint,
};

/// Posteriors within this distance of `1 - c` count as ties.
pub const TIE_MARGIN: f64 = 1e-12;
/// Distance from `1 - c` kept by the calibration audit.
pub const CALIBRATION_MARGIN: f64 = 0.02;

const SHARDS: usize = 32;

/// Uniform draw from the probability simplex of size `k`.
pub fn random_simplex<R: Rng + ?Sized>(k: usize, rng: &mut R) -> PosteriorSimplex {
    let e: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = e.iter().sum();
    PosteriorSimplex::new(e.into_iter().map(|v| v / total).collect()).expect("normalised draws")
}

/// Uniform draw of a cost in `(0, 0.5)`.
pub fn random_cost<R: Rng + ?Sized>(rng: &mut R) -> RejectionCost {
    loop {
        if let Ok(c) = RejectionCost::new(0.5 * rng.random::<f64>()) {
            return c;
        }
    }
}

fn shard_sizes(n: usize) -> Vec<(usize, usize)> {
    (0..SHARDS)
        .map(|s| (s, n / SHARDS + usize::from(s < n % SHARDS)))
        .filter(|&(_, m)| m > 0)
        .collect()
}

fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(shard as u64 + 1)))
}

/// Outcome of [`oracle_audit`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OracleAuditReport {
    pub cases: usize,
    pub excluded_ties: usize,
    pub ensemble_disagreements: usize,
    pub three_way_disagreements: usize,
}

impl OracleAuditReport {
    pub fn passed(&self) -> bool {
        self.cases > 0 && self.ensemble_disagreements == 0 && self.three_way_disagreements == 0
    }

    fn merge(mut self, o: Self) -> Self {
        self.cases += o.cases;
        self.excluded_ties += o.excluded_ties;
        self.ensemble_disagreements += o.ensemble_disagreements;
        self.three_way_disagreements += o.three_way_disagreements;
        self
    }
}

/// Compares the ensemble reconstruction (for `K` in `2..=6`) and the binary
/// three-way rule against Chow's rule on `n` random draws each.
pub fn oracle_audit(n: usize, seed: u64) -> OracleAuditReport {
    shard_sizes(n)
        .into_par_iter()
        .map(|(shard, m)| {
            let mut rng = shard_rng(seed, shard);
            let mut r = OracleAuditReport::default();
            for _ in 0..m {
                let k = rng.random_range(2..=6);
                let eta = random_simplex(k, &mut rng);
                let cost = random_cost(&mut rng);
                let p: f64 = rng.random();
                let binary = PosteriorSimplex::new(vec![p, 1.0 - p]).expect("two-point simplex");
                let tie = |e: &PosteriorSimplex| (e.max().1 - (1.0 - cost.value())).abs() < TIE_MARGIN;
                if tie(&eta) || tie(&binary) {
                    r.excluded_ties += 1;
                    continue;
                }
                r.cases += 1;
                if !ensemble_chow(&eta, cost).same_outcome(&chow_rule(&eta, cost)) {
                    r.ensemble_disagreements += 1;
                }
                if !binary_three_way(p, cost).same_outcome(&chow_rule(&binary, cost)) {
                    r.three_way_disagreements += 1;
                }
            }
            r
        })
        .reduce(OracleAuditReport::default, OracleAuditReport::merge)
}

/// Per-loss outcome of [`calibration_audit`].
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationAuditReport {
    pub cases: usize,
    pub per_loss: Vec<(MarginLoss, usize)>,
}

impl CalibrationAuditReport {
    pub fn passed(&self) -> bool {
        self.cases > 0 && self.per_loss.iter().all(|&(_, d)| d == 0)
    }
}

/// Draws `n` posteriors and costs with every `eta_y` at least
/// [`CALIBRATION_MARGIN`] away from `1 - c`, minimises the weighted conditional
/// risk class by class, and counts decisions that differ from Chow's rule.
pub fn calibration_audit(losses: &[MarginLoss], n: usize, seed: u64) -> CalibrationAuditReport {
    let counts = shard_sizes(n)
        .into_par_iter()
        .map(|(shard, m)| {
            let mut rng = shard_rng(seed, shard);
            let mut disagreements = vec![0usize; losses.len()];
            for _ in 0..m {
                let (eta, cost) = loop {
                    let k = rng.random_range(2..=6);
                    let eta = random_simplex(k, &mut rng);
                    let cost = random_cost(&mut rng);
                    let t = 1.0 - cost.value();
                    if eta.probs().iter().all(|p| (p - t).abs() > CALIBRATION_MARGIN) {
                        break (eta, cost);
                    }
                };
                let oracle = chow_rule(&eta, cost);
                for (i, &loss) in losses.iter().enumerate() {
                    let g = conditional_risk_minimizer(loss, &eta, cost);
                    if !decide(&g).same_outcome(&oracle) {
                        disagreements[i] += 1;
                    }
                }
            }
            disagreements
        })
        .reduce(
            || vec![0; losses.len()],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );
    CalibrationAuditReport {
        cases: n,
        per_loss: losses.iter().copied().zip(counts).collect(),
    }
}

/// Outcome of [`excess_risk_audit`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExcessAuditReport {
    pub instances: usize,
    /// Instances where the zero-one-c regret exceeds the summed class regret.
    pub chain_violations: usize,
    pub psi_violations_squared: usize,
    pub psi_violations_hinge: usize,
    /// Largest `lhs - rhs` seen in the first inequality.
    pub max_chain_gap: f64,
}

impl ExcessAuditReport {
    pub fn passed(&self) -> bool {
        self.instances > 0
            && self.chain_violations == 0
            && self.psi_violations_squared == 0
            && self.psi_violations_hinge == 0
    }

    fn merge(mut self, o: Self) -> Self {
        self.instances += o.instances;
        self.chain_violations += o.chain_violations;
        self.psi_violations_squared += o.psi_violations_squared;
        self.psi_violations_hinge += o.psi_violations_hinge;
        self.max_chain_gap = self.max_chain_gap.max(o.max_chain_gap);
        self
    }
}

/// A random finite distribution with `1..=5` support points and `2..=4`
/// classes, together with a random score table.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R) -> (FiniteDistribution, Vec<Vec<f64>>, RejectionCost) {
    let k = rng.random_range(2..=4);
    let support = rng.random_range(1..=5);
    let weights = random_simplex(support, rng);
    let points = weights
        .probs()
        .iter()
        .enumerate()
        .map(|(id, &weight)| SupportPoint {
            id,
            eta: random_simplex(k, rng),
            weight,
        })
        .collect();
    let dist = FiniteDistribution::new(points).expect("weights form a simplex");
    let scale = [0.1, 1.0, 3.0][rng.random_range(0..3)];
    let normal = Normal::new(0.0, scale).expect("positive scale");
    let scores = (0..support)
        .map(|_| (0..k).map(|_| normal.sample(rng)).collect())
        .collect();
    (dist, scores, random_cost(rng))
}

/// Checks both excess-risk inequalities on `n` random instances.
pub fn excess_risk_audit(n: usize, seed: u64) -> ExcessAuditReport {
    shard_sizes(n)
        .into_par_iter()
        .map(|(shard, m)| {
            let mut rng = shard_rng(seed, shard);
            let mut r = ExcessAuditReport {
                max_chain_gap: f64::NEG_INFINITY,
                ..Default::default()
            };
            for _ in 0..m {
                let (dist, scores, cost) = random_instance(&mut rng);
                let chain = audit_excess_chain(&dist, &scores, cost).expect("consistent instance");
                r.instances += 1;
                r.max_chain_gap = r.max_chain_gap.max(chain.lhs - chain.rhs);
                r.chain_violations += usize::from(chain.violated);
                let sq = audit_psi_bound(&dist, &scores, cost, MarginLoss::Squared).expect("squared has psi");
                r.psi_violations_squared += usize::from(sq.violated);
                let hi = audit_psi_bound(&dist, &scores, cost, MarginLoss::Hinge).expect("hinge has psi");
                r.psi_violations_hinge += usize::from(hi.violated);
            }
            r
        })
        .reduce(
            || ExcessAuditReport {
                max_chain_gap: f64::NEG_INFINITY,
                ..Default::default()
            },
            ExcessAuditReport::merge,
        )
}

/// One line of the audit table.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Instance counts for [`run_all`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditSizes {
    pub oracle: usize,
    pub calibration: usize,
    pub excess: usize,
}

impl Default for AuditSizes {
    fn default() -> Self {
        AuditSizes {
            oracle: 100_000,
            calibration: 1_000,
            excess: 10_000,
        }
    }
}

/// The calibrated losses covered by the calibration audit.
pub const CALIBRATION_LOSSES: [MarginLoss; 4] =
    [MarginLoss::Sigmoid, MarginLoss::Hinge, MarginLoss::Squared, MarginLoss::Logistic];

pub fn run_all(sizes: AuditSizes, seed: u64) -> Vec<AuditLine> {
    let o = oracle_audit(sizes.oracle, seed);
    let c = calibration_audit(&CALIBRATION_LOSSES, sizes.calibration, splitmix64(seed ^ 0xC0));
    let e = excess_risk_audit(sizes.excess, splitmix64(seed ^ 0xE0));
    vec![
        AuditLine {
            name: "oracle equivalence",
            passed: o.passed(),
            detail: format!(
                "{} cases, {} ties excluded, ensemble mismatches {}, three-way mismatches {}",
                o.cases, o.excluded_ties, o.ensemble_disagreements, o.three_way_disagreements
            ),
        },
        AuditLine {
            name: "calibration",
            passed: c.passed(),
            detail: c
                .per_loss
                .iter()
                .map(|(l, d)| format!("{l}: {d}/{}", c.cases))
                .collect::<Vec<_>>()
                .join(", "),
        },
        AuditLine {
            name: "excess-risk chain",
            passed: e.passed(),
            detail: format!(
                "{} instances, violations {} (squared psi {}, hinge psi {}), max gap {:.3e}",
                e.instances, e.chain_violations, e.psi_violations_squared, e.psi_violations_hinge, e.max_chain_gap
            ),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_audits_pass() {
        assert!(oracle_audit(2_000, 1).passed());
        assert!(calibration_audit(&[MarginLoss::Hinge, MarginLoss::Squared], 20, 2).passed());
        assert!(excess_risk_audit(500, 3).passed());
    }

    #[test]
    fn audits_are_seeded() {
        assert_eq!(oracle_audit(500, 9), oracle_audit(500, 9));
        assert_eq!(excess_risk_audit(100, 9), excess_risk_audit(100, 9));
    }

    #[test]
    fn random_simplex_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for k in 1..8 {
            let s = random_simplex(k, &mut rng);
            assert!((s.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
