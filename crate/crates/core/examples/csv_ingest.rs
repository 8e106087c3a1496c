//! Loads a labelled CSV table (integer labels such as 3, 7, 9 are remapped
//! to classes in sorted order), then runs a two-method grid on it through the harness.
//!
//! ```text
//! cargo run --release --example csv_ingest
//! ```

use cs_reject::data::{load_csv_from_reader, LabelColumn};
use cs_reject::harness::{aggregate, run_grid, write_summary, DatasetSpec, GridSpec, MethodId};
use cs_reject::{MarginLoss, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut text = String::from("width,height,part\n");
    for _ in 0..1500 {
        let kind = [3, 7, 9][rng.random_range(0..3)];
        let centre = match kind {
            3 => (2.0, 0.0),
            7 => (-1.0, 1.7),
            _ => (-1.0, -1.7),
        };
        let w = centre.0 + rng.random_range(-1.5..1.5);
        let h = centre.1 + rng.random_range(-1.5..1.5);
        text.push_str(&format!("{w:.3},{h:.3},{kind}\n"));
    }

    let preview = load_csv_from_reader(text.as_bytes(), &LabelColumn::Name("part".into()), true)?;
    println!("{} rows, {} features, {} classes", preview.len(), preview.dim(), preview.classes());

    let path = std::env::temp_dir().join("parts.csv");
    std::fs::write(&path, &text)?;
    let grid = GridSpec {
        datasets: vec![DatasetSpec::csv(&path, true)],
        methods: vec![MethodId::Cs(MarginLoss::Sigmoid), MethodId::Cs(MarginLoss::Logistic), MethodId::Sce],
        costs: vec![0.2],
        trials: 2,
        epochs: 200,
        ..GridSpec::default()
    };
    write_summary(&aggregate(&run_grid(&grid)?), 100.0, std::io::stdout().lock())?;
    Ok(())
}
