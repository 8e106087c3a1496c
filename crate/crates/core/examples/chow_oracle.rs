//! Chow's rule computed directly and rebuilt from one-vs-rest
//! cost-sensitive verdicts, on a handful of posteriors.
//!
//! ```text
//! cargo run --example chow_oracle
//! ```

use cs_reject::theory::{chow_rule, ensemble_chow, optimal_scores};
use cs_reject::{decide, PosteriorSimplex, RejectionCost, Result};

fn main() -> Result<()> {
    let cost = RejectionCost::new(0.2)?;
    let posteriors = [
        vec![0.90, 0.05, 0.05],
        vec![0.81, 0.10, 0.09],
        vec![0.80, 0.15, 0.05],
        vec![0.40, 0.35, 0.25],
        vec![0.34, 0.33, 0.33],
    ];

    println!("c = {}: reject when max posterior <= {}", cost.value(), 1.0 - cost.value());
    println!("{:<22} {:<18} {:<18} {:<18} scores", "posterior", "chow", "ensemble", "sign rule");
    for p in posteriors {
        let eta = PosteriorSimplex::new(p)?;
        let scores = optimal_scores(&eta, cost);
        println!(
            "{:<22} {:<18} {:<18} {:<18} {:?}",
            format!("{:?}", eta.probs()),
            format!("{:?}", chow_rule(&eta, cost)),
            format!("{:?}", ensemble_chow(&eta, cost)),
            format!("{:?}", decide(&scores)),
            scores,
        );
    }
    Ok(())
}
