//! Finite-difference check of every analytic gradient: margin losses, the
//! training objectives on raw scores, and the same objectives backpropagated
//! through the linear and MLP models.
//!
//! ```text
//! cargo run --example gradient_check
//! ```

use cs_reject::gradcheck::{run_suite, TOLERANCE};

fn main() {
    let checks = run_suite(1);
    for c in &checks {
        println!(
            "{:<32} checked {:>4} skipped {:>2} max rel err {:.2e}",
            c.name, c.checked, c.skipped, c.max_rel_err
        );
    }
    let worst = checks.iter().map(|c| c.max_rel_err).fold(0.0, f64::max);
    println!("worst {worst:.2e} (tolerance {TOLERANCE:.0e})");
}
