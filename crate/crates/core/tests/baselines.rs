use cs_reject::baselines::{
    angle_decide, candidate_grid, defer_loss_grad, delta_candidates, sce_decide, tune, tune_delta, tune_temperature,
    validation_risk, AngleConfig, BendSlope, DeferSign,
};
use cs_reject::models::LinearModel;
use cs_reject::{Dataset, Label, LabeledSample, RejectionCost};

fn cost(c: f64) -> RejectionCost {
    RejectionCost::new(c).unwrap()
}

/// One feature, passed straight through as the score of class 1 (and its
/// negation as the score of class 2).
fn passthrough() -> LinearModel {
    LinearModel::from_parts(vec![vec![1.0], vec![-1.0]], vec![0.0, 0.0])
}

fn points(values: &[(f64, usize)]) -> Dataset {
    let samples = values
        .iter()
        .map(|&(x, l)| LabeledSample {
            features: vec![x],
            label: Label::from_index(l),
        })
        .collect();
    Dataset::new(samples, 2).unwrap()
}

#[test]
fn confident_correct_model_keeps_smallest_temperature() {
    let val = points(&[(10.0, 0), (-10.0, 1), (12.0, 0)]);
    let t = tune_temperature(&passthrough(), &val, cost(0.2), None).unwrap();
    assert_eq!(t.risk, 0.0);
    assert_eq!(t.value, candidate_grid()[0]);
}

#[test]
fn tuning_an_overconfident_model_lowers_validation_risk() {
    // Large margins everywhere, but a quarter of the labels disagree: at T = 1
    // every point is accepted, raising the temperature rejects the uncertain
    // region.
    let mut v = Vec::new();
    for i in 0..40 {
        let x = 1.0 + 0.05 * i as f64;
        v.push((x, if i % 4 == 0 { 1 } else { 0 }));
        v.push((-x, if i % 4 == 0 { 0 } else { 1 }));
    }
    for i in 0..20 {
        v.push((5.0 + i as f64, 0));
    }
    let val = points(&v);
    let c = cost(0.2);
    let model = passthrough();
    let scores = cs_reject::baselines::model_scores(&model, &val).unwrap();
    let default = validation_risk(&scores, &val.labels(), c, |g| sce_decide(g, 1.0, c)).unwrap();
    let tuned = tune_temperature(&model, &val, c, None).unwrap();
    assert!(tuned.risk < default, "tuned {} vs default {default}", tuned.risk);
    assert!(tuned.value > 1.0);
}

#[test]
fn huge_threshold_rejects_everything() {
    let val = points(&[(1.0, 0), (-2.0, 1), (0.5, 1)]);
    let c = cost(0.3);
    let cfg = AngleConfig::new(2, c, BendSlope::A1).unwrap();
    let model = LinearModel::from_parts(vec![vec![1.0]], vec![0.0]);
    let scores = cs_reject::baselines::model_scores(&model, &val).unwrap();
    let r = validation_risk(&scores, &val.labels(), c, |g| angle_decide(g, &cfg.clone().with_delta(1e9))).unwrap();
    assert!((r - 0.3).abs() < 1e-15);
}

#[test]
fn intermediate_threshold_can_win() {
    // Points near the boundary are coin flips; far points are clean.
    let mut v = Vec::new();
    for i in 0..10 {
        let x = 0.05 + 0.01 * i as f64;
        v.push((x, i % 2));
        v.push((-x, (i + 1) % 2));
        v.push((3.0 + i as f64, 0));
        v.push((-3.0 - i as f64, 1));
    }
    let val = points(&v);
    let c = cost(0.2);
    let cfg = AngleConfig::new(2, c, BendSlope::A1).unwrap();
    let model = LinearModel::from_parts(vec![vec![1.0]], vec![0.0]);
    let t = tune_delta(&model, &val, c, &cfg, None).unwrap();
    assert!(t.value > 0.0 && t.value < 10.0, "selected {}", t.value);
    let scores = cs_reject::baselines::model_scores(&model, &val).unwrap();
    let at_zero = validation_risk(&scores, &val.labels(), c, |g| angle_decide(g, &cfg)).unwrap();
    assert!(t.risk < at_zero);
    assert_eq!(delta_candidates().len(), 30);
}

#[test]
fn printed_defer_sign_rewards_wrong_labels() {
    // Minimising the un-negated objective pushes the true-class score down.
    let c = cost(0.25);
    let g = [0.0, 0.0, 0.0];
    let (_, grad) = defer_loss_grad(&g, Label::POSITIVE, c, DeferSign::Printed);
    assert!(grad[0] > 0.0);
    let (_, grad) = defer_loss_grad(&g, Label::POSITIVE, c, DeferSign::Negated);
    assert!(grad[0] < 0.0);
}

#[test]
fn tune_breaks_ties_by_value() {
    let scores = vec![vec![0.0, 0.0]];
    let labels = vec![Label::POSITIVE];
    let t = tune(&scores, &labels, cost(0.1), &[9.0, 3.0, 4.0], |_, g| sce_decide(g, 1.0, cost(0.1))).unwrap();
    assert_eq!(t.value, 3.0);
}
