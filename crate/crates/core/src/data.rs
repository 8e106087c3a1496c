//! Synthetic generators with exact posteriors, CSV ingestion, splitting and
//! standardisation.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::domain::{Dataset, Label, LabeledSample};
use crate::error::{Error, Result};
use crate::theory::PosteriorSimplex;

/// Feature dimension of the twonorm problem.
pub const TWONORM_DIM: usize = 20;

/// A mixture of multivariate Gaussians, one component per class.
///
/// Serves both as a sampler and as the exact posterior oracle `eta(x)`.
#[derive(Debug, Clone)]
pub struct GaussianMixture {
    means: Vec<Vec<f64>>,
    /// Lower Cholesky factors of the covariances.
    chol: Vec<DMatrix<f64>>,
    log_dets: Vec<f64>,
    log_priors: Vec<f64>,
    priors: Vec<f64>,
}

impl GaussianMixture {
    pub fn new(means: Vec<Vec<f64>>, covariances: Vec<DMatrix<f64>>, priors: Vec<f64>) -> Result<Self> {
        let k = means.len();
        if k == 0 {
            return Err(Error::Empty("mixture components"));
        }
        if covariances.len() != k || priors.len() != k {
            return Err(Error::LengthMismatch {
                left: k,
                right: covariances.len().min(priors.len()),
            });
        }
        let d = means[0].len();
        PosteriorSimplex::new(priors.clone())?;
        let mut chol = Vec::with_capacity(k);
        let mut log_dets = Vec::with_capacity(k);
        for (m, cov) in means.iter().zip(covariances) {
            if m.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: m.len() });
            }
            if cov.nrows() != d || cov.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: cov.nrows() });
            }
            let l = cov
                .cholesky()
                .ok_or_else(|| Error::InvalidArgument("covariance is not positive definite".into()))?
                .l();
            log_dets.push(2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>());
            chol.push(l);
        }
        Ok(GaussianMixture {
            means,
            chol,
            log_dets,
            log_priors: priors.iter().map(|p| p.ln()).collect(),
            priors,
        })
    }

    /// Components sharing the covariance `variance * I`.
    pub fn spherical(means: Vec<Vec<f64>>, variance: f64, priors: Vec<f64>) -> Result<Self> {
        let d = means.first().map_or(0, Vec::len);
        let cov = DMatrix::<f64>::identity(d, d) * variance;
        let covs = vec![cov; means.len()];
        Self::new(means, covs, priors)
    }

    /// Two classes with equal priors, means `+-(2/sqrt(20)) * 1` in `R^20` and
    /// identity covariance.
    pub fn twonorm() -> Self {
        let a = 2.0 / (TWONORM_DIM as f64).sqrt();
        Self::spherical(
            vec![vec![a; TWONORM_DIM], vec![-a; TWONORM_DIM]],
            1.0,
            vec![0.5, 0.5],
        )
        .expect("twonorm parameters are valid")
    }

    pub fn classes(&self) -> usize {
        self.means.len()
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    /// Exact class posterior by Bayes' rule, evaluated in log space.
    pub fn posterior(&self, x: &[f64]) -> PosteriorSimplex {
        let logs: Vec<f64> = (0..self.classes()).map(|k| self.log_joint(k, x)).collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        PosteriorSimplex::new(exps.into_iter().map(|e| e / total).collect())
            .expect("normalised exponentials form a simplex")
    }

    fn log_joint(&self, k: usize, x: &[f64]) -> f64 {
        let l = &self.chol[k];
        let d = self.dim();
        // Forward substitution for L z = x - mu.
        let mut z = vec![0.0; d];
        for i in 0..d {
            let mut s = x[i] - self.means[k][i];
            for j in 0..i {
                s -= l[(i, j)] * z[j];
            }
            z[i] = s / l[(i, i)];
        }
        let quad: f64 = z.iter().map(|v| v * v).sum();
        self.log_priors[k] - 0.5 * (quad + self.log_dets[k])
    }

    /// Draws one feature vector from the component of class `class`.
    pub fn sample_class<R: Rng + ?Sized>(&self, class: Label, rng: &mut R) -> Vec<f64> {
        let k = class.index();
        let d = self.dim();
        let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let l = &self.chol[k];
        (0..d)
            .map(|i| self.means[k][i] + (0..=i).map(|j| l[(i, j)] * z[j]).sum::<f64>())
            .collect()
    }

    /// Draws `n` labelled samples: a class from the priors, then a point from
    /// that class.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Dataset> {
        let samples = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut k = self.classes() - 1;
                for (i, p) in self.priors.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        k = i;
                        break;
                    }
                }
                let label = Label::from_index(k);
                LabeledSample {
                    features: self.sample_class(label, rng),
                    label,
                }
            })
            .collect();
        Dataset::new(samples, self.classes())
    }
}

/// `n` twonorm samples and the exact posterior oracle.
pub fn gen_twonorm<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<(Dataset, GaussianMixture)> {
    if n < 2 {
        return Err(Error::InsufficientData(format!("twonorm needs n >= 2, got {n}")));
    }
    let mix = GaussianMixture::twonorm();
    Ok((mix.sample(n, rng)?, mix))
}

pub fn gen_gauss_mixture<R: Rng + ?Sized>(spec: &GaussianMixture, n: usize, rng: &mut R) -> Result<Dataset> {
    spec.sample(n, rng)
}

/// Where the label lives in a CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    /// Requires a header row.
    Name(String),
    /// The last column.
    Last,
}

/// Reads a numeric CSV file. Distinct raw labels are sorted and mapped onto
/// `1..=K`. Rows are reported 1-based, counting the header if present.
pub fn load_csv(path: impl AsRef<Path>, label_column: &LabelColumn, has_header: bool) -> Result<Dataset> {
    let reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_path(path)?;
    read_csv(reader, label_column, has_header)
}

/// [`load_csv`] over any reader.
pub fn load_csv_from_reader<R: std::io::Read>(input: R, label_column: &LabelColumn, has_header: bool) -> Result<Dataset> {
    let reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_reader(input);
    read_csv(reader, label_column, has_header)
}

fn read_csv<R: std::io::Read>(mut reader: csv::Reader<R>, label_column: &LabelColumn, has_header: bool) -> Result<Dataset> {
    let label_idx = match label_column {
        LabelColumn::Index(i) => Some(*i),
        LabelColumn::Last => None,
        LabelColumn::Name(name) => {
            if !has_header {
                return Err(Error::InvalidArgument("a named label column needs a header".into()));
            }
            let headers = reader.headers()?;
            Some(
                headers
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::UnknownId(name.clone()))?,
            )
        }
    };
    let offset = usize::from(has_header) + 1;
    let mut rows: Vec<(Vec<f64>, i64)> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let row = r + offset;
        let record = record.map_err(|e| Error::Parse {
            row,
            column: 0,
            message: e.to_string(),
        })?;
        let width = record.len();
        let li = label_idx.unwrap_or(width.saturating_sub(1));
        if li >= width {
            return Err(Error::Parse {
                row,
                column: li + 1,
                message: format!("row has only {width} columns"),
            });
        }
        let mut features = Vec::with_capacity(width - 1);
        let mut label = 0;
        for (c, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                column: c + 1,
                message: format!("not a number: `{field}`"),
            })?;
            if c == li {
                if value.fract() != 0.0 || !value.is_finite() {
                    return Err(Error::Parse {
                        row,
                        column: c + 1,
                        message: format!("label is not an integer: `{field}`"),
                    });
                }
                label = value as i64;
            } else {
                features.push(value);
            }
        }
        rows.push((features, label));
    }
    let mut remap = BTreeMap::new();
    for (_, l) in &rows {
        remap.insert(*l, 0usize);
    }
    for (i, v) in remap.values_mut().enumerate() {
        *v = i;
    }
    let classes = remap.len();
    let samples = rows
        .into_iter()
        .map(|(features, l)| LabeledSample {
            features,
            label: Label::from_index(remap[&l]),
        })
        .collect();
    Dataset::new(samples, classes)
}

/// Seeded shuffle followed by contiguous cuts at the rounded cumulative
/// fractions.
pub fn split(data: &Dataset, fractions: &[f64], seed: u64) -> Result<Vec<Dataset>> {
    let total: f64 = fractions.iter().sum();
    if fractions.is_empty() || (total - 1.0).abs() > 1e-9 || fractions.iter().any(|f| *f < 0.0) {
        return Err(Error::InvalidArgument(format!("split fractions must sum to 1, got {total}")));
    }
    let n = data.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut parts = Vec::with_capacity(fractions.len());
    let mut cum = 0.0;
    let mut start = 0;
    for (i, f) in fractions.iter().enumerate() {
        cum += f;
        let end = if i + 1 == fractions.len() {
            n
        } else {
            ((cum * n as f64).round() as usize).min(n)
        };
        if end <= start {
            return Err(Error::InsufficientData(format!("split part {i} would be empty")));
        }
        parts.push(data.subset(&order[start..end])?);
        start = end;
    }
    Ok(parts)
}

/// Per-feature affine map fitted on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

/// Smallest variance used when scaling, so constant features map to 0.
pub const VARIANCE_FLOOR: f64 = 1e-12;

impl Standardizer {
    pub fn fit(train: &Dataset) -> Self {
        let n = train.len() as f64;
        let d = train.dim();
        let mut mean = vec![0.0; d];
        for s in train.iter() {
            for (m, x) in mean.iter_mut().zip(&s.features) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for s in train.iter() {
            for ((v, x), m) in var.iter_mut().zip(&s.features).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let scale = var.into_iter().map(|v| (v / n).max(VARIANCE_FLOOR).sqrt()).collect();
        Standardizer { mean, scale }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if data.dim() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: data.dim(),
            });
        }
        let samples = data
            .iter()
            .map(|s| LabeledSample {
                features: self.transform(&s.features),
                label: s.label,
            })
            .collect();
        Dataset::new(samples, data.classes())
    }
}

/// Fits a [`Standardizer`] on `train` and returns it with the transformed data.
pub fn standardize(train: &Dataset) -> Result<(Standardizer, Dataset)> {
    let t = Standardizer::fit(train);
    let out = t.apply(train)?;
    Ok((t, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twonorm_posterior_values() {
        let m = GaussianMixture::twonorm();
        let p = m.posterior(&[0.0; TWONORM_DIM]);
        assert!((p.probs()[0] - 0.5).abs() < 1e-15);
        let a = 2.0 / (TWONORM_DIM as f64).sqrt();
        // Closed form: eta_1 = sigmoid(2 mu . x) with mu . mu = 4 at x = mu.
        let p = m.posterior(&[a; TWONORM_DIM]);
        let expected = 1.0 / (1.0 + (-8.0f64).exp());
        assert!((p.probs()[0] - expected).abs() < 1e-12);
        assert!(p.probs()[0] > 0.97);
    }

    #[test]
    fn single_component_posterior_is_one() {
        let m = GaussianMixture::spherical(vec![vec![1.0, 2.0]], 1.0, vec![1.0]).unwrap();
        assert_eq!(m.posterior(&[5.0, -3.0]).probs(), &[1.0]);
    }

    #[test]
    fn equidistant_point_is_uniform() {
        let means = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let m = GaussianMixture::spherical(means, 0.5, vec![0.25; 4]).unwrap();
        for p in m.posterior(&[0.0, 0.0]).probs() {
            assert!((p - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn full_covariance_matches_closed_form() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let m = GaussianMixture::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]], vec![cov.clone(), cov.clone()], vec![0.3, 0.7]).unwrap();
        let x = [0.4, -0.2];
        let inv = cov.try_inverse().unwrap();
        let q = |mu: [f64; 2]| {
            let v = nalgebra::Vector2::new(x[0] - mu[0], x[1] - mu[1]);
            let dv = nalgebra::DVector::from_column_slice(v.as_slice());
            (dv.transpose() * &inv * &dv)[(0, 0)]
        };
        let w0 = 0.3 * (-0.5 * q([0.0, 0.0])).exp();
        let w1 = 0.7 * (-0.5 * q([1.0, 1.0])).exp();
        let p = m.posterior(&x);
        assert!((p.probs()[0] - w0 / (w0 + w1)).abs() < 1e-12);
    }

    #[test]
    fn non_pd_covariance_is_rejected() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(GaussianMixture::new(vec![vec![0.0, 0.0]], vec![cov], vec![1.0]).is_err());
    }

    #[test]
    fn generation_is_seeded() {
        let a = gen_twonorm(50, &mut ChaCha8Rng::seed_from_u64(1)).unwrap().0;
        let b = gen_twonorm(50, &mut ChaCha8Rng::seed_from_u64(1)).unwrap().0;
        let c = gen_twonorm(50, &mut ChaCha8Rng::seed_from_u64(2)).unwrap().0;
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let (d, _) = gen_twonorm(100, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let parts = split(&d, &[0.5, 0.1, 0.4], 7).unwrap();
        assert_eq!(parts.iter().map(Dataset::len).collect::<Vec<_>>(), vec![50, 10, 40]);
        assert_eq!(parts, split(&d, &[0.5, 0.1, 0.4], 7).unwrap());
        let mut all: Vec<Vec<u64>> = parts
            .iter()
            .flat_map(|p| p.iter().map(|s| s.features.iter().map(|v| v.to_bits()).collect()))
            .collect();
        let mut orig: Vec<Vec<u64>> = d.iter().map(|s| s.features.iter().map(|v| v.to_bits()).collect()).collect();
        all.sort();
        orig.sort();
        assert_eq!(all, orig);
        assert!(split(&d, &[0.5, 0.4], 7).is_err());
    }

    #[test]
    fn standardize_contract() {
        let samples = (0..10)
            .map(|i| LabeledSample {
                features: vec![i as f64, 3.0],
                label: Label::from_index(i % 2),
            })
            .collect();
        let d = Dataset::new(samples, 2).unwrap();
        let (t, out) = standardize(&d).unwrap();
        let mean0: f64 = out.iter().map(|s| s.features[0]).sum::<f64>() / 10.0;
        assert!(mean0.abs() < 1e-10);
        assert!(out.iter().all(|s| s.features[1] == 0.0));
        let test = Dataset::new(
            vec![LabeledSample {
                features: vec![4.5, 3.0],
                label: Label::POSITIVE,
            }],
            2,
        )
        .unwrap();
        assert_eq!(t.apply(&test).unwrap().samples()[0].features[0], 0.0);
    }

    #[test]
    fn csv_label_remap_and_errors() {
        let text = "x1,x2,y\n0.5,1.0,1\n0.1,0.2,-1\n3.0,4.0,1\n";
        let d = load_csv_from_reader(text.as_bytes(), &LabelColumn::Name("y".into()), true).unwrap();
        assert_eq!(d.classes(), 2);
        assert_eq!(d.labels(), vec![Label::from_index(1), Label::from_index(0), Label::from_index(1)]);
        let d = load_csv_from_reader("0.5,1.0,1\n0.1,0.2,-1\n".as_bytes(), &LabelColumn::Last, false).unwrap();
        assert_eq!(d.len(), 2);
        let bad = "x1,y\n0.5,1\nabc,2\n";
        match load_csv_from_reader(bad.as_bytes(), &LabelColumn::Index(1), true) {
            Err(Error::Parse { row, column, .. }) => assert_eq!((row, column), (3, 1)),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }
}
