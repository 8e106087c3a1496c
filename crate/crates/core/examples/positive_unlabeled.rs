//! Learns a classifier with rejection from positive and unlabeled data only,
//! using the non-negative risk correction.
//!
//! ```text
//! cargo run --release --example positive_unlabeled
//! ```

use cs_reject::data::{gen_twonorm, split, standardize};
use cs_reject::models::{LinearModel, ScoreModel, TrainConfig};
use cs_reject::weaksup::{make_pu_dataset, train_pu, PUConfig};
use cs_reject::{compute_metrics, decide, CsSurrogate, MarginLoss, RejectionCost, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let prior = 0.7;
    let cost = RejectionCost::new(0.1)?;
    let (data, _) = gen_twonorm(7400, &mut ChaCha8Rng::seed_from_u64(11))?;
    let parts = split(&data, &[0.6, 0.4], 12)?;
    let (scaler, source) = standardize(&parts[0])?;
    let test_set = scaler.apply(&parts[1])?;

    let config = PUConfig::largest_for(&source, prior)?;
    let pu = make_pu_dataset(&source, &config, &mut ChaCha8Rng::seed_from_u64(13))?;
    println!(
        "{} labeled positives, {} unlabeled (class prior {prior})",
        pu.positives.len(),
        pu.unlabeled.len()
    );

    for loss in [MarginLoss::Sigmoid, MarginLoss::Hinge, MarginLoss::Exponential] {
        let mut model = LinearModel::init(source.dim(), 2, &mut ChaCha8Rng::seed_from_u64(14));
        let tc = TrainConfig {
            batch_size: 64,
            epochs: 100,
            seed: 15,
            ..TrainConfig::default()
        };
        let report = train_pu(&mut model, &CsSurrogate::new(loss, cost), &pu, prior, &tc)?;
        let decisions: Vec<_> = test_set.iter().map(|s| decide(&model.forward_unchecked(&s.features))).collect();
        let m = compute_metrics(&decisions, &test_set.labels(), cost)?;
        println!(
            "{:<12} risk {:.4}  rejected {:.3}  clamp hit in {} of {} batches",
            loss.name(),
            m.risk01c,
            m.rejection_ratio,
            report.clamp_activations,
            report.batches
        );
    }
    Ok(())
}
