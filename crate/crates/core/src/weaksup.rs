//! Weak supervision: uniform label noise and learning from positive and
//! unlabeled (PU) data with the unbiased and non-negative risk estimators.
//!
//! In the PU protocol class 1 is the positive class and class 2 the negative
//! class. With prior `pi`, positives `P` and unlabeled data `U`:
//!
//! ```text
//! unbiased:     pi/|P| sum_P L(g,+1) - pi/|P| sum_P L(g,-1) + 1/|U| sum_U L(g,-1)
//! non-negative: pi/|P| sum_P L(g,+1) + max(0, 1/|U| sum_U L(g,-1) - pi/|P| sum_P L(g,-1))
//! ```

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Dataset, Label};
use crate::error::{Error, Result};
use crate::models::{AdamState, ScoreModel, TrainConfig};
use crate::objective::Objective;

/// Replaces exactly `floor(rate * n)` labels, chosen without replacement, by a
/// uniform draw over the other classes.
pub fn inject_uniform_noise<R: Rng + ?Sized>(data: &Dataset, rate: f64, rng: &mut R) -> Result<Dataset> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::InvalidArgument(format!("noise rate must lie in [0, 1), got {rate}")));
    }
    let k = data.classes();
    if k < 2 {
        return Err(Error::TooFewClasses(2));
    }
    let n = data.len();
    let flips = (rate * n as f64).floor() as usize;
    let mut labels = data.labels();
    for i in index::sample(rng, n, flips) {
        let old = labels[i].index();
        let draw = rng.random_range(0..k - 1);
        labels[i] = Label::from_index(if draw >= old { draw + 1 } else { draw });
    }
    data.with_labels(&labels)
}

/// Sizes and prior of a PU sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PUConfig {
    pub prior: f64,
    pub n_unlabeled: usize,
    pub n_positive: usize,
}

impl PUConfig {
    /// `n_positive = n_unlabeled / 5`.
    pub fn new(prior: f64, n_unlabeled: usize) -> Self {
        PUConfig {
            prior,
            n_unlabeled,
            n_positive: n_unlabeled / 5,
        }
    }

    /// The largest configuration with `n_unlabeled` a multiple of 200 and
    /// `n_positive = n_unlabeled / 5` that `data` can supply without reusing
    /// a sample.
    pub fn largest_for(data: &Dataset, prior: f64) -> Result<Self> {
        let n_pos = data.iter().filter(|s| s.label == Label::POSITIVE).count();
        let n_neg = data.len() - n_pos;
        let mut n_u = (data.len() / 200) * 200;
        while n_u > 0 {
            let cfg = PUConfig::new(prior, n_u);
            if cfg.required_positives() <= n_pos && cfg.required_negatives() <= n_neg {
                return Ok(cfg);
            }
            n_u -= 200;
        }
        Err(Error::InsufficientData("no PU configuration fits the source data".into()))
    }

    fn unlabeled_positives(&self) -> usize {
        (self.prior * self.n_unlabeled as f64).floor() as usize
    }

    pub fn required_positives(&self) -> usize {
        self.n_positive + self.unlabeled_positives()
    }

    pub fn required_negatives(&self) -> usize {
        self.n_unlabeled - self.unlabeled_positives()
    }
}

/// Positive and unlabeled feature sets.
#[derive(Debug, Clone, PartialEq)]
pub struct PuData {
    pub positives: Vec<Vec<f64>>,
    pub unlabeled: Vec<Vec<f64>>,
    /// True labels of `unlabeled`, kept for diagnostics only.
    pub unlabeled_truth: Vec<Label>,
}

/// Builds a PU sample from a binary dataset; every source sample is used at
/// most once.
pub fn make_pu_dataset<R: Rng + ?Sized>(data: &Dataset, config: &PUConfig, rng: &mut R) -> Result<PuData> {
    if data.classes() != 2 {
        return Err(Error::InvalidArgument("PU data needs a binary dataset".into()));
    }
    if !(0.0..=1.0).contains(&config.prior) {
        return Err(Error::InvalidArgument(format!("prior must lie in [0, 1], got {}", config.prior)));
    }
    let mut pos: Vec<usize> = Vec::new();
    let mut neg: Vec<usize> = Vec::new();
    for (i, s) in data.iter().enumerate() {
        if s.label == Label::POSITIVE {
            pos.push(i);
        } else {
            neg.push(i);
        }
    }
    if config.required_positives() > pos.len() || config.required_negatives() > neg.len() {
        return Err(Error::InsufficientData(format!(
            "need {} positives and {} negatives, have {} and {}",
            config.required_positives(),
            config.required_negatives(),
            pos.len(),
            neg.len()
        )));
    }
    pos.shuffle(rng);
    neg.shuffle(rng);
    let samples = data.samples();
    let positives = pos[..config.n_positive]
        .iter()
        .map(|&i| samples[i].features.clone())
        .collect();
    let mut u_idx: Vec<usize> = pos[config.n_positive..config.required_positives()].to_vec();
    u_idx.extend_from_slice(&neg[..config.required_negatives()]);
    u_idx.shuffle(rng);
    Ok(PuData {
        positives,
        unlabeled: u_idx.iter().map(|&i| samples[i].features.clone()).collect(),
        unlabeled_truth: u_idx.iter().map(|&i| samples[i].label).collect(),
    })
}

/// The three empirical means that make up both PU estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuTerms {
    /// `pi * mean_P L(g, +1)`
    pub positive: f64,
    /// `pi * mean_P L(g, -1)`
    pub positive_as_negative: f64,
    /// `mean_U L(g, -1)`
    pub unlabeled_as_negative: f64,
}

impl PuTerms {
    pub fn compute<L, S>(loss_term: L, prior: f64, positives: &[Vec<f64>], unlabeled: &[Vec<f64>], score_fn: S) -> Result<Self>
    where
        L: Fn(&[f64], Label) -> f64,
        S: Fn(&[f64]) -> Vec<f64>,
    {
        if positives.is_empty() {
            return Err(Error::Empty("positive set"));
        }
        if unlabeled.is_empty() {
            return Err(Error::Empty("unlabeled set"));
        }
        let (mut pp, mut pn) = (0.0, 0.0);
        for x in positives {
            let g = score_fn(x);
            pp += loss_term(&g, Label::POSITIVE);
            pn += loss_term(&g, Label::NEGATIVE);
        }
        let un: f64 = unlabeled.iter().map(|x| loss_term(&score_fn(x), Label::NEGATIVE)).sum();
        let np = positives.len() as f64;
        Ok(PuTerms {
            positive: prior * pp / np,
            positive_as_negative: prior * pn / np,
            unlabeled_as_negative: un / unlabeled.len() as f64,
        })
    }

    /// The implied negative-class risk, `(1 - pi) R_n`.
    pub fn bracket(&self) -> f64 {
        self.unlabeled_as_negative - self.positive_as_negative
    }

    pub fn unbiased(&self) -> f64 {
        self.positive + self.bracket()
    }

    pub fn non_negative(&self) -> f64 {
        self.positive + self.bracket().max(0.0)
    }
}

pub fn pu_risk_unbiased<L, S>(loss_term: L, prior: f64, positives: &[Vec<f64>], unlabeled: &[Vec<f64>], score_fn: S) -> Result<f64>
where
    L: Fn(&[f64], Label) -> f64,
    S: Fn(&[f64]) -> Vec<f64>,
{
    Ok(PuTerms::compute(loss_term, prior, positives, unlabeled, score_fn)?.unbiased())
}

pub fn pu_risk_nn<L, S>(loss_term: L, prior: f64, positives: &[Vec<f64>], unlabeled: &[Vec<f64>], score_fn: S) -> Result<f64>
where
    L: Fn(&[f64], Label) -> f64,
    S: Fn(&[f64]) -> Vec<f64>,
{
    Ok(PuTerms::compute(loss_term, prior, positives, unlabeled, score_fn)?.non_negative())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PuTrainReport {
    /// Full-data non-negative risk after each epoch.
    pub epoch_risks: Vec<f64>,
    /// Mini-batches whose bracket was negative, so only the positive term was
    /// followed.
    pub clamp_activations: usize,
    pub batches: usize,
    pub diverged: bool,
}

/// Minimises the non-negative PU risk with Adam.
///
/// Each mini-batch takes `ceil(batch * n_p / (n_p + n_u))` positives and fills
/// the rest with unlabeled points. An epoch is one pass over the unlabeled
/// set; positives are drawn from a cursor over a reshuffled list. When a
/// batch's bracket is negative its gradient is dropped for that step.
pub fn train_pu<M: ScoreModel + ?Sized>(
    model: &mut M,
    objective: &dyn Objective,
    data: &PuData,
    prior: f64,
    config: &TrainConfig,
) -> Result<PuTrainReport> {
    config.validate()?;
    if objective.output_dim(2) != model.output_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.output_dim(),
            got: objective.output_dim(2),
        });
    }
    let (n_p, n_u) = (data.positives.len(), data.unlabeled.len());
    if n_p == 0 || n_u == 0 {
        return Err(Error::Empty("PU sets"));
    }
    if config.batch_size < 2 {
        return Err(Error::InvalidArgument("PU batches need room for both sets".into()));
    }
    let b_p = (config.batch_size * n_p).div_ceil(n_p + n_u).clamp(1, config.batch_size - 1);
    let b_u = config.batch_size - b_p;

    let n_params = model.params().len();
    let k = model.output_dim();
    let mut adam = AdamState::new(n_params);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut u_order: Vec<usize> = (0..n_u).collect();
    let mut p_order: Vec<usize> = (0..n_p).collect();
    p_order.shuffle(&mut rng);
    let mut p_cursor = 0;

    let mut g_pp = vec![0.0; n_params];
    let mut g_pn = vec![0.0; n_params];
    let mut g_un = vec![0.0; n_params];
    let mut grad = vec![0.0; n_params];
    let mut sg = vec![0.0; k];
    let mut report = PuTrainReport {
        epoch_risks: Vec::with_capacity(config.epochs),
        clamp_activations: 0,
        batches: 0,
        diverged: false,
    };

    for _ in 0..config.epochs {
        u_order.shuffle(&mut rng);
        for u_batch in u_order.chunks(b_u) {
            let mut p_batch = Vec::with_capacity(b_p);
            while p_batch.len() < b_p {
                if p_cursor == n_p {
                    p_order.shuffle(&mut rng);
                    p_cursor = 0;
                }
                p_batch.push(p_order[p_cursor]);
                p_cursor += 1;
            }
            for buf in [&mut g_pp, &mut g_pn, &mut g_un] {
                buf.iter_mut().for_each(|v| *v = 0.0);
            }
            let (mut r_pn, mut r_un) = (0.0, 0.0);
            for &i in &p_batch {
                let x = &data.positives[i];
                let g = model.forward_unchecked(x);
                objective.loss_grad(&g, Label::POSITIVE, &mut sg);
                model.accumulate_backward(x, &sg, &mut g_pp);
                r_pn += objective.loss_grad(&g, Label::NEGATIVE, &mut sg);
                model.accumulate_backward(x, &sg, &mut g_pn);
            }
            for &i in u_batch {
                let x = &data.unlabeled[i];
                let g = model.forward_unchecked(x);
                r_un += objective.loss_grad(&g, Label::NEGATIVE, &mut sg);
                model.accumulate_backward(x, &sg, &mut g_un);
            }
            let wp = prior / p_batch.len() as f64;
            let wu = 1.0 / u_batch.len() as f64;
            let bracket = wu * r_un - wp * r_pn;
            let keep_bracket = bracket >= 0.0;
            if !keep_bracket {
                report.clamp_activations += 1;
            }
            for i in 0..n_params {
                let mut v = wp * g_pp[i];
                if keep_bracket {
                    v += wu * g_un[i] - wp * g_pn[i];
                }
                grad[i] = v + config.weight_decay * model.params()[i];
            }
            adam.step(model.params_mut(), &grad, config.learning_rate);
            report.batches += 1;
        }
        if model.params().iter().any(|p| !p.is_finite()) {
            report.diverged = true;
            return Ok(report);
        }
        let risk = pu_risk_nn(
            |g, y| objective.loss(g, y),
            prior,
            &data.positives,
            &data.unlabeled,
            |x| model.forward_unchecked(x),
        )?;
        report.epoch_risks.push(risk);
    }
    Ok(report)
}
