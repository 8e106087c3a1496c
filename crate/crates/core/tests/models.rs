use cs_reject::data::GaussianMixture;
use cs_reject::gradcheck::{central_difference, relative_error};
use cs_reject::losses::MarginLoss;
use cs_reject::models::{train, AdamState, LinearModel, MlpModel, Model, ModelKind, ScoreModel, TrainConfig};
use cs_reject::surrogate::{decide, CsSurrogate};
use cs_reject::{Dataset, Decision, RejectionCost};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn zero_mlp_outputs_its_bias() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut m = MlpModel::init(3, 8, 2, &mut rng);
    let n = m.params().len();
    m.params_mut().iter_mut().for_each(|p| *p = 0.0);
    m.params_mut()[n - 2] = 0.25;
    m.params_mut()[n - 1] = -1.5;
    assert_eq!(m.forward(&[1.0, -2.0, 3.0]).unwrap(), vec![0.25, -1.5]);
}

#[test]
fn backward_matches_forward_jacobian() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for kind in [ModelKind::Linear, ModelKind::Mlp] {
        let model = Model::init(kind, 5, 3, &mut rng);
        let x = [0.3, -1.2, 0.8, 2.0, -0.4];
        for k in 0..3 {
            let mut up = vec![0.0; 3];
            up[k] = 1.0;
            let analytic = model.backward(&x, &up).unwrap();
            let numeric = central_difference(
                |p| {
                    let mut m = model.clone();
                    m.params_mut().copy_from_slice(p);
                    m.forward_unchecked(&x)[k]
                },
                model.params(),
                1e-6,
            );
            for (a, n) in analytic.iter().zip(&numeric) {
                assert!(relative_error(*a, *n) < 1e-4, "{kind:?} output {k}: {a} vs {n}");
            }
        }
    }
}

#[test]
fn adam_ignores_zero_gradients() {
    let mut a = AdamState::new(4);
    let mut p = vec![1.0, -2.0, 0.5, 3.0];
    let before = p.clone();
    for _ in 0..100 {
        a.step(&mut p, &[0.0; 4], 0.1);
    }
    assert_eq!(p, before);
    assert_eq!(a.steps(), 100);
}

fn blobs(n: usize, spread: f64, seed: u64) -> Dataset {
    let mix = GaussianMixture::spherical(vec![vec![1.0, 0.5, -0.5], vec![-1.0, -0.5, 0.5]], spread, vec![0.5, 0.5]).unwrap();
    mix.sample(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// Regularised mean logistic surrogate of a linear model and its gradient,
/// written out independently of the library's objective code.
fn oracle_objective(params: &[f64], data: &Dataset, c: f64, wd: f64) -> (f64, Vec<f64>) {
    let d = data.dim();
    let n = data.len() as f64;
    let log1pexp = |z: f64| if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
    let sig = |z: f64| 1.0 / (1.0 + (-z).exp());
    let mut value = 0.0;
    let mut grad = vec![0.0; params.len()];
    for s in data.iter() {
        for k in 0..2 {
            let w = &params[k * d..(k + 1) * d];
            let g: f64 = w.iter().zip(&s.features).map(|(a, b)| a * b).sum::<f64>() + params[2 * d + k];
            // phi(z) = ln(1 + e^{-z})
            let (weight, sign) = if k == s.label.index() { (c, 1.0) } else { (1.0 - c, -1.0) };
            value += weight * log1pexp(-sign * g) / n;
            let dg = -weight * sign * sig(-sign * g) / n;
            for j in 0..d {
                grad[k * d + j] += dg * s.features[j];
            }
            grad[2 * d + k] += dg;
        }
    }
    for (g, p) in grad.iter_mut().zip(params) {
        value += 0.5 * wd * p * p;
        *g += wd * p;
    }
    (value, grad)
}

#[test]
fn adam_training_reaches_the_convex_minimum() {
    let data = blobs(300, 1.0, 2);
    let c = 0.3;
    let wd = 1e-2;
    let mut oracle = vec![0.0; 8];
    for _ in 0..20_000 {
        let (_, g) = oracle_objective(&oracle, &data, c, wd);
        for (p, gi) in oracle.iter_mut().zip(&g) {
            *p -= 0.5 * gi;
        }
    }
    let (best, grad) = oracle_objective(&oracle, &data, c, wd);
    assert!(grad.iter().map(|g| g.abs()).fold(0.0, f64::max) < 1e-9);

    let mut model = LinearModel::zeros(3, 2);
    let cfg = TrainConfig {
        learning_rate: 0.01,
        batch_size: 300,
        epochs: 3000,
        seed: 5,
        weight_decay: wd,
    };
    let obj = CsSurrogate::new(MarginLoss::Logistic, RejectionCost::new(c).unwrap());
    let rep = train(&mut model, &data, &obj, &cfg).unwrap();
    let (reached, _) = oracle_objective(model.params(), &data, c, wd);
    assert!(reached - best < 1e-3, "reached {reached}, optimum {best}");
    assert!(rep.final_risk() <= rep.initial_risk);
}

#[test]
fn separable_hinge_training_makes_no_accepted_errors() {
    let data = blobs(400, 0.02, 3);
    let mut model = LinearModel::zeros(3, 2);
    let cfg = TrainConfig {
        learning_rate: 0.01,
        epochs: 200,
        batch_size: 32,
        seed: 1,
        weight_decay: 0.0,
    };
    let obj = CsSurrogate::new(MarginLoss::Hinge, RejectionCost::new(0.2).unwrap());
    train(&mut model, &data, &obj, &cfg).unwrap();
    let wrong = data
        .iter()
        .filter(|s| matches!(decide(&model.forward(&s.features).unwrap()), Decision::Predict(l) if l != s.label))
        .count();
    assert_eq!(wrong, 0);
}

#[test]
fn final_risk_does_not_exceed_initial_risk() {
    let data = blobs(500, 1.0, 4);
    for loss in MarginLoss::ALL {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut model = Model::init(ModelKind::Mlp, 3, 2, &mut rng);
        let cfg = TrainConfig {
            epochs: 20,
            ..TrainConfig::default()
        };
        let obj = CsSurrogate::new(loss, RejectionCost::new(0.25).unwrap());
        let rep = train(&mut model, &data, &obj, &cfg).unwrap();
        assert!(!rep.diverged);
        assert!(rep.final_risk() <= rep.initial_risk, "{loss}: {} > {}", rep.final_risk(), rep.initial_risk);
    }
}

#[test]
fn training_is_identical_across_thread_pools() {
    let data = blobs(300, 1.0, 6);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let mut m = Model::init(ModelKind::Mlp, 3, 2, &mut rng);
            let cfg = TrainConfig { epochs: 5, ..TrainConfig::default() };
            train(&mut m, &data, &CsSurrogate::new(MarginLoss::Sigmoid, RejectionCost::new(0.1).unwrap()), &cfg).unwrap();
            m
        })
    };
    assert_eq!(run(1), run(4));
}
