use cs_reject::data::{gen_twonorm, GaussianMixture};
use cs_reject::Label;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bayes_predict(mix: &GaussianMixture, x: &[f64]) -> Label {
    mix.posterior(x).max().0
}

#[test]
fn twonorm_bayes_error() {
    let (data, mix) = gen_twonorm(100_000, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
    let errors = data.iter().filter(|s| bayes_predict(&mix, &s.features) != s.label).count();
    let rate = errors as f64 / data.len() as f64;
    assert!((rate - 0.023).abs() < 0.003, "Bayes error {rate}");
}

#[test]
fn bayes_rule_beats_other_classifiers() {
    let r3 = 3f64.sqrt();
    let mix = GaussianMixture::spherical(vec![vec![2.0, 0.0], vec![-1.0, r3], vec![-1.0, -r3]], 1.0, vec![0.5, 0.3, 0.2])
        .unwrap();
    let data = mix.sample(20_000, &mut ChaCha8Rng::seed_from_u64(12)).unwrap();
    let n = data.len() as f64;
    let err = |f: &dyn Fn(&[f64]) -> Label| data.iter().filter(|s| f(&s.features) != s.label).count() as f64 / n;
    let bayes = err(&|x| bayes_predict(&mix, x));
    let nearest_mean = err(&|x| {
        let d = |m: &[f64]| (x[0] - m[0]).powi(2) + (x[1] - m[1]).powi(2);
        let means = mix.means();
        let best = (0..3).min_by(|&a, &b| d(&means[a]).total_cmp(&d(&means[b]))).unwrap();
        Label::from_index(best)
    });
    let constant = err(&|_| Label::from_index(0));
    for other in [nearest_mean, constant] {
        let se = (other * (1.0 - other) / n).sqrt();
        assert!(bayes <= other + 3.0 * se, "bayes {bayes} vs {other}");
    }
}

proptest! {
    #[test]
    fn posteriors_are_normalised(x in prop::collection::vec(-6.0f64..6.0, 2)) {
        let mix = GaussianMixture::spherical(
            vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![-3.0, 0.5]],
            0.7,
            vec![0.2, 0.5, 0.3],
        )
        .unwrap();
        let p = mix.posterior(&x);
        prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.probs().iter().all(|&v| v >= 0.0));
    }
}
