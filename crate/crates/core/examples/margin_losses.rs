//! The margin-loss table: values, flags, and the pointwise minimiser of the
//! cost-sensitive conditional risk, whose sign recovers the Bayes verdict
//! `eta > 1 - c` for every loss.
//!
//! ```text
//! cargo run --example margin_losses
//! ```

use cs_reject::theory::{conditional_risk_minimizer, psi, psi_inverse};
use cs_reject::{MarginLoss, PosteriorSimplex, RejectionCost, Result};

fn main() -> Result<()> {
    println!("{:<14} {:>7} {:>7} {:>9} {:>9} {:>9}", "loss", "convex", "symm", "phi(-1)", "phi(0)", "phi(1)");
    for l in MarginLoss::ALL {
        println!(
            "{:<14} {:>7} {:>7} {:>9.4} {:>9.4} {:>9.4}",
            l.name(),
            l.is_convex(),
            l.is_symmetric(),
            l.eval(-1.0),
            l.eval(0.0),
            l.eval(1.0)
        );
    }

    let cost = RejectionCost::new(0.3)?;
    let eta = PosteriorSimplex::new(vec![0.75, 0.2, 0.05])?;
    println!("\nconditional minimisers at eta = {:?}, c = {} (threshold 0.7)", eta.probs(), cost.value());
    for l in MarginLoss::ALL {
        let g = conditional_risk_minimizer(l, &eta, cost);
        let g: Vec<String> = g.iter().map(|v| format!("{v:+.4}")).collect();
        println!("  {:<14} {}", l.name(), g.join("  "));
    }

    println!("\nregret transform for the squared loss at c = {}", cost.value());
    for theta in [0.01, 0.05, 0.1, 0.2] {
        let eps = psi(MarginLoss::Squared, cost, theta)?;
        println!(
            "  theta {theta:<5} psi {eps:.6}  inverse {:.6}",
            psi_inverse(MarginLoss::Squared, cost, eps)?
        );
    }
    Ok(())
}
