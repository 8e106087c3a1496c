//! Trains a small MLP on a three-class mixture, saves it in the text
//! snapshot format and checks that the reloaded model decides identically.
//!
//! ```text
//! cargo run --release --example model_snapshot
//! ```

use cs_reject::data::GaussianMixture;
use cs_reject::models::{read_snapshot, train, write_snapshot, Model, ModelKind, ScoreModel, TrainConfig};
use cs_reject::{decide, CsSurrogate, MarginLoss, RejectionCost, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let r3 = 3f64.sqrt();
    let mixture = GaussianMixture::spherical(vec![vec![2.0, 0.0], vec![-1.0, r3], vec![-1.0, -r3]], 1.0, vec![1.0 / 3.0; 3])?;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let data = mixture.sample(1500, &mut rng)?;

    let mut model = Model::init(ModelKind::Mlp, 2, 3, &mut rng);
    let objective = CsSurrogate::new(MarginLoss::Logistic, RejectionCost::new(0.25)?);
    let config = TrainConfig {
        epochs: 30,
        batch_size: 64,
        ..TrainConfig::default()
    };
    let report = train(&mut model, &data, &objective, &config)?;
    println!("surrogate risk {:.4} -> {:.4}", report.initial_risk, report.final_risk());

    let path = std::env::temp_dir().join("cs_reject_mlp.txt");
    write_snapshot(&model, std::fs::File::create(&path)?)?;
    let restored = read_snapshot(std::fs::File::open(&path)?)?;
    println!("{} parameters saved to {}", restored.params().len(), path.display());

    let same = data
        .iter()
        .all(|s| decide(&model.forward_unchecked(&s.features)) == decide(&restored.forward_unchecked(&s.features)));
    println!("decisions identical after reload: {same}");
    Ok(())
}
