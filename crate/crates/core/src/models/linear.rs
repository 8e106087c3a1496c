use rand::Rng;

use super::ScoreModel;

/// `g(x) = W x + b` with `W` stored row-major (`K x d`) followed by `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    input_dim: usize,
    output_dim: usize,
    params: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(input_dim: usize, output_dim: usize) -> Self {
        LinearModel {
            input_dim,
            output_dim,
            params: vec![0.0; output_dim * (input_dim + 1)],
        }
    }

    /// Uniform initialisation in `+-1/sqrt(d)`.
    pub fn init<R: Rng + ?Sized>(input_dim: usize, output_dim: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (input_dim.max(1) as f64).sqrt();
        let mut m = Self::zeros(input_dim, output_dim);
        for p in &mut m.params {
            *p = rng.random_range(-bound..bound);
        }
        m
    }

    pub fn from_parts(weights: Vec<Vec<f64>>, bias: Vec<f64>) -> Self {
        let output_dim = bias.len();
        assert_eq!(weights.len(), output_dim, "one weight row per output");
        let input_dim = weights.first().map_or(0, Vec::len);
        let mut params: Vec<f64> = weights.into_iter().flatten().collect();
        assert_eq!(params.len(), output_dim * input_dim, "ragged weight rows");
        params.extend(bias);
        LinearModel {
            input_dim,
            output_dim,
            params,
        }
    }

    pub(crate) fn from_flat(input_dim: usize, output_dim: usize, params: Vec<f64>) -> Self {
        debug_assert_eq!(params.len(), output_dim * (input_dim + 1));
        LinearModel {
            input_dim,
            output_dim,
            params,
        }
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.params[row * self.input_dim + col]
    }

    pub fn bias(&self) -> &[f64] {
        &self.params[self.output_dim * self.input_dim..]
    }
}

impl ScoreModel for LinearModel {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn output_dim(&self) -> usize {
        self.output_dim
    }

    fn params(&self) -> &[f64] {
        &self.params
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn forward_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let d = self.input_dim;
        let (w, b) = self.params.split_at(self.output_dim * d);
        w.chunks_exact(d.max(1))
            .zip(b)
            .map(|(row, bi)| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + bi)
            .collect()
    }

    fn accumulate_backward(&self, x: &[f64], upstream: &[f64], grad: &mut [f64]) {
        let d = self.input_dim;
        let (gw, gb) = grad.split_at_mut(self.output_dim * d);
        for (i, &u) in upstream.iter().enumerate() {
            if u == 0.0 {
                continue;
            }
            for (g, &xj) in gw[i * d..(i + 1) * d].iter_mut().zip(x) {
                *g += u * xj;
            }
            gb[i] += u;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_forward() {
        let m = LinearModel::from_parts(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]);
        assert_eq!(m.forward(&[3.0, -1.0]).unwrap(), vec![3.0, -1.0]);
        assert!(m.forward(&[1.0]).is_err());
    }

    #[test]
    fn weight_gradient_is_outer_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = LinearModel::init(3, 2, &mut rng);
        let x = [0.5, -2.0, 1.5];
        let up = [0.3, -0.7];
        let g = m.backward(&x, &up).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(g[i * 3 + j], up[i] * x[j]);
            }
        }
        assert_eq!(&g[6..], &up);
        let zero = m.backward(&x, &[0.0, 0.0]).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
    }
}
