//! Experiment grid: datasets x methods x costs x trials, one trained model per
//! cell, evaluated on held-out data under the zero-one-c loss.
//!
//! Every cell derives its seeds from the master seed and the cell's own
//! identifiers, so a cell's result does not depend on which other cells run or
//! in what order.

mod format;
mod io;
mod summary;

pub use format::fmt_g;
pub use io::{read_rows, read_rows_csv, write_rows, write_rows_csv, RESULT_HEADER};
pub use summary::{aggregate, write_summary, write_summary_csv, MetricSummary, Summary};

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{
    candidate_grid, delta_candidates, model_scores, tune_by, validation_risk, Angle, AngleConfig, BendSlope, Defer,
    Sce,
};
use crate::baselines::{angle_decide, defer_decide, sce_decide};
use crate::data::{gen_twonorm, load_csv, split, LabelColumn, Standardizer};
use crate::domain::{compute_metrics, zero_one_c_loss, Dataset, Decision, Label, RejectReason, RejectionCost};
use crate::error::{Error, Result};
use crate::losses::MarginLoss;
use crate::models::{train, Model, ModelKind, ScoreModel, TrainConfig};
use crate::objective::Objective;
use crate::surrogate::{decide, CsSurrogate};
use crate::weaksup::{inject_uniform_noise, make_pu_dataset, train_pu, PUConfig, PuData};

/// Size of a generated twonorm dataset.
pub const TWONORM_SIZE: usize = 7400;
/// Train/validation/test fractions for fully labelled settings.
pub const SPLIT_LABELED: [f64; 3] = [0.5, 0.1, 0.4];
/// Train/validation/test fractions for the PU setting.
pub const SPLIT_PU: [f64; 3] = [0.5, 0.2, 0.3];
/// Mini-batch size used for PU training.
pub const PU_BATCH_SIZE: usize = 64;

/// A trainable method or the always-reject reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodId {
    Cs(MarginLoss),
    Sce,
    Defer,
    Angle,
    AlwaysReject,
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodId::Cs(l) => write!(f, "cs-{}", l.name()),
            MethodId::Sce => f.write_str("sce"),
            MethodId::Defer => f.write_str("defer"),
            MethodId::Angle => f.write_str("angle"),
            MethodId::AlwaysReject => f.write_str("always-reject"),
        }
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sce" => Ok(MethodId::Sce),
            "defer" => Ok(MethodId::Defer),
            "angle" => Ok(MethodId::Angle),
            "always-reject" => Ok(MethodId::AlwaysReject),
            _ => match s.strip_prefix("cs-") {
                Some(loss) => Ok(MethodId::Cs(loss.parse()?)),
                None => Err(Error::UnknownId(s.to_string())),
            },
        }
    }
}

/// How the training labels are corrupted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    Clean,
    Noisy,
    Pu,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::Clean => "clean",
            Setting::Noisy => "noisy",
            Setting::Pu => "pu",
        })
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clean" => Ok(Setting::Clean),
            "noisy" => Ok(Setting::Noisy),
            "pu" => Ok(Setting::Pu),
            _ => Err(Error::UnknownId(s.to_string())),
        }
    }
}

/// Where a dataset comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Twonorm { n: usize },
    Csv {
        path: PathBuf,
        label: LabelColumn,
        has_header: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub id: String,
    pub source: DatasetSource,
}

impl DatasetSpec {
    pub fn twonorm() -> Self {
        DatasetSpec {
            id: "twonorm".into(),
            source: DatasetSource::Twonorm { n: TWONORM_SIZE },
        }
    }

    /// A CSV file whose label sits in the last column; the id is the file stem.
    pub fn csv(path: impl Into<PathBuf>, has_header: bool) -> Self {
        let path = path.into();
        let id = path
            .file_stem()
            .map_or_else(|| "csv".to_string(), |s| s.to_string_lossy().into_owned());
        DatasetSpec {
            id,
            source: DatasetSource::Csv {
                path,
                label: LabelColumn::Last,
                has_header,
            },
        }
    }

    fn materialize(&self, seed: u64) -> Result<Dataset> {
        match &self.source {
            DatasetSource::Twonorm { n } => Ok(gen_twonorm(*n, &mut ChaCha8Rng::seed_from_u64(seed))?.0),
            DatasetSource::Csv {
                path,
                label,
                has_header,
            } => load_csv(path, label, *has_header),
        }
    }
}

/// Architecture choice for trained methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelChoice {
    /// Linear for two classes, MLP otherwise.
    #[default]
    Auto,
    Linear,
    Mlp,
}

impl ModelChoice {
    pub fn resolve(self, classes: usize) -> ModelKind {
        match self {
            ModelChoice::Auto if classes == 2 => ModelKind::Linear,
            ModelChoice::Auto | ModelChoice::Mlp => ModelKind::Mlp,
            ModelChoice::Linear => ModelKind::Linear,
        }
    }
}

impl FromStr for ModelChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(ModelChoice::Auto),
            "linear" => Ok(ModelChoice::Linear),
            "mlp" => Ok(ModelChoice::Mlp),
            _ => Err(Error::UnknownId(s.to_string())),
        }
    }
}

/// Full description of an experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub datasets: Vec<DatasetSpec>,
    pub methods: Vec<MethodId>,
    pub costs: Vec<f64>,
    pub trials: usize,
    pub setting: Setting,
    pub master_seed: u64,
    pub noise_rate: f64,
    pub prior: f64,
    pub model: ModelChoice,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub pu_batch_size: usize,
    pub epochs: usize,
    pub angle_slope: BendSlope,
    /// Record wall-clock training time; otherwise `train_seconds` is 0 and the
    /// output is a pure function of the spec.
    pub timing: bool,
}

/// `0.1, 0.15, ..., 0.4`.
pub fn default_costs() -> Vec<f64> {
    (0..7).map(|i| (10.0 + 5.0 * i as f64) / 100.0).collect()
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            datasets: vec![DatasetSpec::twonorm()],
            methods: vec![
                MethodId::Cs(MarginLoss::Sigmoid),
                MethodId::Cs(MarginLoss::Hinge),
                MethodId::Sce,
                MethodId::Defer,
                MethodId::Angle,
            ],
            costs: default_costs(),
            trials: 10,
            setting: Setting::Clean,
            master_seed: 42,
            noise_rate: 0.25,
            prior: 0.7,
            model: ModelChoice::Auto,
            learning_rate: 1e-3,
            batch_size: 256,
            pu_batch_size: PU_BATCH_SIZE,
            epochs: 100,
            angle_slope: BendSlope::A1,
            timing: false,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.datasets.is_empty() || self.methods.is_empty() || self.costs.is_empty() {
            return Err(Error::Empty("grid axis"));
        }
        for &c in &self.costs {
            RejectionCost::new(c)?;
        }
        Ok(())
    }

    /// All cells in canonical order: dataset, method, cost, trial.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for d in 0..self.datasets.len() {
            for &method in &self.methods {
                for &cost in &self.costs {
                    for trial in 0..self.trials {
                        out.push(Cell {
                            dataset: d,
                            method,
                            cost,
                            trial,
                        });
                    }
                }
            }
        }
        out
    }
}

/// One grid coordinate. `dataset` indexes [`GridSpec::datasets`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub dataset: usize,
    pub method: MethodId,
    pub cost: f64,
    pub trial: usize,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub dataset: String,
    pub method: String,
    pub setting: String,
    pub cost: f64,
    pub trial: usize,
    pub risk01c: f64,
    pub rejection_ratio: f64,
    pub accepted_error: f64,
    pub n_reject_distance: usize,
    pub n_reject_ambiguity: usize,
    pub train_seconds: f64,
    /// Why the row is untrustworthy, if it is. Not written to CSV.
    pub flag: Option<String>,
}

impl ResultRow {
    fn key(&self) -> (String, String, String, String, usize) {
        (
            self.dataset.clone(),
            self.method.clone(),
            self.setting.clone(),
            fmt_g(self.cost),
            self.trial,
        )
    }
}

/// SplitMix64 finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a over the given parts, separated by a zero byte.
pub fn fnv1a(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for &b in part.iter().chain(std::iter::once(&0u8)) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
    }
    h
}

fn mix(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b))
}

/// Seed for data generation, splitting and corruption. Shared by every method
/// and cost of one trial, so methods are compared on identical data.
pub fn data_seed(master: u64, dataset: &str, setting: Setting, trial: usize) -> u64 {
    let setting = setting.to_string();
    let trial = trial.to_le_bytes();
    mix(master, fnv1a(&[dataset.as_bytes(), setting.as_bytes(), &trial]))
}

/// Seed for model initialisation and mini-batch order.
pub fn train_seed(data_seed: u64, method: MethodId, cost: f64) -> u64 {
    let method = method.to_string();
    mix(data_seed, fnv1a(&[method.as_bytes(), &cost.to_bits().to_le_bytes()]))
}

/// Train, validation and test sets of one trial after standardisation and
/// label corruption.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
    /// Present in the PU setting: PU views of the train and validation splits.
    pub pu_train: Option<PuData>,
    pub pu_val: Option<PuData>,
}

/// Builds the data of one trial. Deterministic in its arguments.
pub fn prepare_trial(grid: &GridSpec, dataset: &DatasetSpec, trial: usize) -> Result<TrialData> {
    let seed = data_seed(grid.master_seed, &dataset.id, grid.setting, trial);
    let full = dataset.materialize(seed)?;
    let fractions = if grid.setting == Setting::Pu { SPLIT_PU } else { SPLIT_LABELED };
    let mut parts = split(&full, &fractions, splitmix64(seed ^ 1))?.into_iter();
    let (train_raw, val_raw, test_raw) = (
        parts.next().expect("three parts"),
        parts.next().expect("three parts"),
        parts.next().expect("three parts"),
    );
    let t = Standardizer::fit(&train_raw);
    let (mut train, mut val, test) = (t.apply(&train_raw)?, t.apply(&val_raw)?, t.apply(&test_raw)?);
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 2));
    let (mut pu_train, mut pu_val) = (None, None);
    match grid.setting {
        Setting::Clean => {}
        Setting::Noisy => {
            train = inject_uniform_noise(&train, grid.noise_rate, &mut rng)?;
            val = inject_uniform_noise(&val, grid.noise_rate, &mut rng)?;
        }
        Setting::Pu => {
            let cfg = PUConfig::largest_for(&train, grid.prior)?;
            pu_train = Some(make_pu_dataset(&train, &cfg, &mut rng)?);
            let vcfg = PUConfig::largest_for(&val, grid.prior)?;
            pu_val = Some(make_pu_dataset(&val, &vcfg, &mut rng)?);
        }
    }
    Ok(TrialData {
        train,
        val,
        test,
        pu_train,
        pu_val,
    })
}

/// A trained method ready to make decisions.
pub struct Trained {
    pub model: Option<Model>,
    rule: Box<dyn Fn(&[f64]) -> Decision + Send + Sync>,
    pub diverged: bool,
    /// Selected temperature or threshold, for the tuned baselines.
    pub tuned: Option<f64>,
}

impl Trained {
    pub fn decide(&self, x: &[f64]) -> Decision {
        match &self.model {
            Some(m) => (self.rule)(&m.forward_unchecked(x)),
            None => (self.rule)(&[]),
        }
    }
}

fn objective_for(method: MethodId, cost: RejectionCost, classes: usize, slope: BendSlope) -> Result<Box<dyn Objective>> {
    Ok(match method {
        MethodId::Cs(loss) => Box::new(CsSurrogate::new(loss, cost)),
        MethodId::Sce => Box::new(Sce),
        MethodId::Defer => Box::new(Defer::new(cost)),
        MethodId::Angle => Box::new(Angle {
            config: AngleConfig::new(classes, cost, slope)?,
        }),
        MethodId::AlwaysReject => unreachable!("always-reject has no objective"),
    })
}

/// Zero-one-c risk estimated from PU data without labels, using the same
/// unbiased combination of positive and unlabeled means as the training risk.
fn pu_validation_risk(pu: &PuData, prior: f64, cost: RejectionCost, rule: impl Fn(&[f64]) -> Decision) -> Result<f64> {
    if pu.positives.is_empty() || pu.unlabeled.is_empty() {
        return Err(Error::Empty("PU validation sets"));
    }
    let loss = |x: &[f64], y: Label| zero_one_c_loss(rule(x), y, cost);
    let mean = |xs: &[Vec<f64>], y: Label| xs.iter().map(|x| loss(x, y)).sum::<f64>() / xs.len() as f64;
    Ok(prior * mean(&pu.positives, Label::POSITIVE) - prior * mean(&pu.positives, Label::NEGATIVE)
        + mean(&pu.unlabeled, Label::NEGATIVE))
}

/// Trains `method` on one trial's data.
pub fn train_method(grid: &GridSpec, data: &TrialData, method: MethodId, cost: RejectionCost, seed: u64) -> Result<Trained> {
    if method == MethodId::AlwaysReject {
        return Ok(Trained {
            model: None,
            rule: Box::new(|_| Decision::Reject(RejectReason::Distance)),
            diverged: false,
            tuned: None,
        });
    }
    let classes = data.train.classes();
    let objective = objective_for(method, cost, classes, grid.angle_slope)?;
    let kind = grid.model.resolve(classes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = Model::init(kind, data.train.dim(), objective.output_dim(classes), &mut rng);
    let diverged = match &data.pu_train {
        Some(pu) => {
            let cfg = TrainConfig {
                learning_rate: grid.learning_rate,
                batch_size: grid.pu_batch_size,
                epochs: grid.epochs,
                seed: splitmix64(seed),
                weight_decay: 0.0,
            };
            train_pu(&mut model, objective.as_ref(), pu, grid.prior, &cfg)?.diverged
        }
        None => {
            let cfg = TrainConfig {
                learning_rate: grid.learning_rate,
                batch_size: grid.batch_size,
                epochs: grid.epochs,
                seed: splitmix64(seed),
                weight_decay: 0.0,
            };
            train(&mut model, &data.train, objective.as_ref(), &cfg)?.diverged
        }
    };

    // Validation risk of a parametrised rule, from PU data when that is all
    // the setting provides.
    let val_risk = |rule: &dyn Fn(&[f64]) -> Decision| -> Result<f64> {
        match &data.pu_val {
            Some(pu) => pu_validation_risk(pu, grid.prior, cost, |x| rule(&model.forward_unchecked(x))),
            None => {
                let scores = model_scores(&model, &data.val)?;
                validation_risk(&scores, &data.val.labels(), cost, rule)
            }
        }
    };

    let (rule, tuned): (Box<dyn Fn(&[f64]) -> Decision + Send + Sync>, _) = match method {
        MethodId::Cs(_) => (Box::new(decide), None),
        MethodId::Defer => (Box::new(defer_decide), None),
        MethodId::Sce => {
            let t = if diverged {
                1.0
            } else {
                tune_by(&candidate_grid(), |t| val_risk(&|g| sce_decide(g, t, cost)))?.value
            };
            (Box::new(move |g: &[f64]| sce_decide(g, t, cost)), Some(t))
        }
        MethodId::Angle => {
            let base = AngleConfig::new(classes, cost, grid.angle_slope)?;
            let d = if diverged {
                0.0
            } else {
                tune_by(&delta_candidates(), |d| {
                    let cfg = base.clone().with_delta(d);
                    val_risk(&|g| angle_decide(g, &cfg))
                })?
                .value
            };
            let cfg = base.with_delta(d);
            (Box::new(move |g: &[f64]| angle_decide(g, &cfg)), Some(d))
        }
        MethodId::AlwaysReject => unreachable!(),
    };
    Ok(Trained {
        model: Some(model),
        rule,
        diverged,
        tuned,
    })
}

/// Runs one grid cell end to end.
pub fn run_cell(grid: &GridSpec, cell: &Cell) -> Result<ResultRow> {
    let dataset = &grid.datasets[cell.dataset];
    let data = prepare_trial(grid, dataset, cell.trial)?;
    run_cell_on(grid, &data, cell)
}

/// Runs one grid cell on already prepared trial data.
pub fn run_cell_on(grid: &GridSpec, data: &TrialData, cell: &Cell) -> Result<ResultRow> {
    let dataset = &grid.datasets[cell.dataset];
    let cost = RejectionCost::new(cell.cost)?;
    let seed = train_seed(
        data_seed(grid.master_seed, &dataset.id, grid.setting, cell.trial),
        cell.method,
        cell.cost,
    );
    let start = Instant::now();
    let trained = train_method(grid, data, cell.method, cost, seed)?;
    let train_seconds = if grid.timing { start.elapsed().as_secs_f64() } else { 0.0 };
    let decisions: Vec<Decision> = data.test.iter().map(|s| trained.decide(&s.features)).collect();
    let m = compute_metrics(&decisions, &data.test.labels(), cost)?;
    let flag = if trained.diverged {
        Some("training diverged".to_string())
    } else if !m.risk01c.is_finite() {
        Some("non-finite risk".to_string())
    } else {
        None
    };
    Ok(ResultRow {
        dataset: dataset.id.clone(),
        method: cell.method.to_string(),
        setting: grid.setting.to_string(),
        cost: cell.cost,
        trial: cell.trial,
        risk01c: m.risk01c,
        rejection_ratio: m.rejection_ratio,
        accepted_error: m.accepted_error,
        n_reject_distance: m.n_reject_distance + m.n_reject_oracle,
        n_reject_ambiguity: m.n_reject_ambiguity,
        train_seconds,
        flag,
    })
}

/// Runs every cell of the grid in parallel and returns rows in canonical order.
pub fn run_grid(grid: &GridSpec) -> Result<Vec<ResultRow>> {
    run_grid_resume(grid, &[])
}

/// Like [`run_grid`] but reuses rows already in `existing`, matched on
/// dataset, method, setting, printed cost and trial.
pub fn run_grid_resume(grid: &GridSpec, existing: &[ResultRow]) -> Result<Vec<ResultRow>> {
    grid.validate()?;
    let cells = grid.cells();
    let done: HashSet<_> = existing.iter().map(ResultRow::key).collect();
    let setting = grid.setting.to_string();
    let outcomes: Vec<Result<ResultRow>> = cells
        .par_iter()
        .map(|cell| {
            let key = (
                grid.datasets[cell.dataset].id.clone(),
                cell.method.to_string(),
                setting.clone(),
                fmt_g(cell.cost),
                cell.trial,
            );
            if done.contains(&key) {
                let row = existing.iter().find(|r| r.key() == key).expect("key is present");
                return Ok(row.clone());
            }
            run_cell(grid, cell)
        })
        .collect();
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (cell, outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok(r) => rows.push(r),
            Err(e) => failures.push(format!(
                "{} {} c={} trial {}: {e}",
                grid.datasets[cell.dataset].id,
                cell.method,
                fmt_g(cell.cost),
                cell.trial
            )),
        }
    }
    if failures.is_empty() {
        Ok(rows)
    } else {
        Err(Error::InvalidArgument(format!(
            "{} cell(s) failed:\n{}",
            failures.len(),
            failures.join("\n")
        )))
    }
}
