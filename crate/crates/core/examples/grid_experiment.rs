//! A small seeded experiment grid: trains every method for a few costs and
//! trials, writes the per-cell rows as CSV, and prints the aggregated table
//! in percent.
//!
//! ```text
//! cargo run --release --example grid_experiment
//! ```

use cs_reject::harness::{aggregate, run_grid, write_rows, write_summary, GridSpec, Setting};
use cs_reject::Result;

fn main() -> Result<()> {
    let grid = GridSpec {
        costs: vec![0.1, 0.3],
        trials: 3,
        epochs: 30,
        setting: Setting::Clean,
        ..GridSpec::default()
    };
    let rows = run_grid(&grid)?;

    let path = std::env::temp_dir().join("cs_reject_grid.csv");
    write_rows(&rows, std::fs::File::create(&path)?)?;
    println!("{} rows written to {}\n", rows.len(), path.display());

    write_summary(&aggregate(&rows), 100.0, std::io::stdout().lock())?;
    Ok(())
}
