//! Flips a quarter of the training labels and compares a symmetric loss
//! with the hinge loss. With this much noise the hinge ensemble ends up
//! rejecting nearly everything while the sigmoid stays close to clean.
//!
//! ```text
//! cargo run --release --example noisy_labels
//! ```

use cs_reject::data::{gen_twonorm, split, standardize};
use cs_reject::models::{train, LinearModel, ScoreModel, TrainConfig};
use cs_reject::weaksup::inject_uniform_noise;
use cs_reject::{compute_metrics, decide, CsSurrogate, MarginLoss, RejectionCost, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let cost = RejectionCost::new(0.1)?;
    let (data, _) = gen_twonorm(7400, &mut ChaCha8Rng::seed_from_u64(1))?;
    let parts = split(&data, &[0.6, 0.4], 2)?;
    let (scaler, clean) = standardize(&parts[0])?;
    let test_set = scaler.apply(&parts[1])?;
    let noisy = inject_uniform_noise(&clean, 0.25, &mut ChaCha8Rng::seed_from_u64(3))?;
    let flipped = clean.iter().zip(noisy.iter()).filter(|(a, b)| a.label != b.label).count();
    println!("flipped {flipped} of {} training labels", clean.len());

    for loss in [MarginLoss::Sigmoid, MarginLoss::Ramp, MarginLoss::Hinge] {
        for (name, train_set) in [("clean", &clean), ("noisy", &noisy)] {
            let mut model = LinearModel::init(train_set.dim(), 2, &mut ChaCha8Rng::seed_from_u64(4));
            let config = TrainConfig {
                epochs: 50,
                seed: 5,
                ..TrainConfig::default()
            };
            train(&mut model, train_set, &CsSurrogate::new(loss, cost), &config)?;
            let decisions: Vec<_> = test_set.iter().map(|s| decide(&model.forward_unchecked(&s.features))).collect();
            let m = compute_metrics(&decisions, &test_set.labels(), cost)?;
            println!(
                "{:<8} {name}  risk {:.4}  rejected {:.3}  accepted error {:.4}",
                loss.name(),
                m.risk01c,
                m.rejection_ratio,
                m.accepted_error
            );
        }
    }
    Ok(())
}
