//! Randomised checks of the theory: oracle equivalence, calibration of the
//! surrogate for several losses, and the excess-risk chain.
//!
//! ```text
//! cargo run --release --example theory_audit
//! ```

use cs_reject::audit::{run_all, AuditSizes};

fn main() {
    let sizes = AuditSizes {
        oracle: 20_000,
        calibration: 100,
        excess: 2_000,
    };
    let lines = run_all(sizes, 5);
    for line in &lines {
        println!("{:<22} {}  {}", line.name, if line.passed { "ok  " } else { "FAIL" }, line.detail);
    }
    if lines.iter().any(|l| !l.passed) {
        std::process::exit(1);
    }
}
