//! Runs the three baselines (softmax confidence, learning to defer, and the
//! angle-based method) next to the cost-sensitive ensemble on one trial,
//! showing the temperature or threshold each baseline selected on
//! validation data.
//!
//! ```text
//! cargo run --release --example baselines
//! ```

use cs_reject::harness::{prepare_trial, train_method, DatasetSpec, GridSpec, MethodId};
use cs_reject::{compute_metrics, MarginLoss, RejectionCost, Result};

fn main() -> Result<()> {
    let grid = GridSpec {
        epochs: 50,
        ..GridSpec::default()
    };
    let data = prepare_trial(&grid, &DatasetSpec::twonorm(), 0)?;
    let methods = [
        MethodId::Cs(MarginLoss::Sigmoid),
        MethodId::Sce,
        MethodId::Defer,
        MethodId::Angle,
        MethodId::AlwaysReject,
    ];
    for c in [0.1, 0.3] {
        let cost = RejectionCost::new(c)?;
        println!("c = {c}");
        for method in methods {
            let trained = train_method(&grid, &data, method, cost, 99)?;
            let decisions: Vec<_> = data.test.iter().map(|s| trained.decide(&s.features)).collect();
            let m = compute_metrics(&decisions, &data.test.labels(), cost)?;
            let tuned = trained.tuned.map(|t| format!("tuned {t:.4}")).unwrap_or_default();
            println!(
                "  {:<14} risk {:.4}  rejected {:.3}  {tuned}",
                method.to_string(),
                m.risk01c,
                m.rejection_ratio
            );
        }
    }
    Ok(())
}
