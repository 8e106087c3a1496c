//! Trains the cost-sensitive ensemble on the two-Gaussian benchmark and
//! compares its test metrics with Chow's rule on the true posterior.
//!
//! ```text
//! cargo run --release --example twonorm_training
//! ```

use cs_reject::data::{gen_twonorm, split, standardize};
use cs_reject::models::{train, LinearModel, ScoreModel, TrainConfig};
use cs_reject::theory::chow_rule;
use cs_reject::{compute_metrics, decide, CsSurrogate, MarginLoss, RejectionCost, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let cost = RejectionCost::new(0.1)?;
    let (data, mixture) = gen_twonorm(7400, &mut ChaCha8Rng::seed_from_u64(7))?;
    let parts = split(&data, &[0.6, 0.4], 8)?;
    let (scaler, train_set) = standardize(&parts[0])?;
    let test_set = scaler.apply(&parts[1])?;

    let chow: Vec<_> = parts[1]
        .iter()
        .map(|s| chow_rule(&mixture.posterior(&s.features), cost))
        .collect();
    let oracle = compute_metrics(&chow, &parts[1].labels(), cost)?;
    println!("chow oracle       risk {:.4}  rejected {:.3}", oracle.risk01c, oracle.rejection_ratio);

    for loss in [MarginLoss::Sigmoid, MarginLoss::Hinge, MarginLoss::Logistic] {
        let mut model = LinearModel::init(train_set.dim(), 2, &mut ChaCha8Rng::seed_from_u64(9));
        let config = TrainConfig {
            epochs: 50,
            seed: 10,
            ..TrainConfig::default()
        };
        let report = train(&mut model, &train_set, &CsSurrogate::new(loss, cost), &config)?;
        let decisions: Vec<_> = test_set.iter().map(|s| decide(&model.forward_unchecked(&s.features))).collect();
        let m = compute_metrics(&decisions, &test_set.labels(), cost)?;
        println!(
            "cs-{:<14} risk {:.4}  rejected {:.3}  accepted error {:.4}  (surrogate {:.4} -> {:.4})",
            loss.name(),
            m.risk01c,
            m.rejection_ratio,
            m.accepted_error,
            report.initial_risk,
            report.final_risk()
        );
    }
    Ok(())
}
