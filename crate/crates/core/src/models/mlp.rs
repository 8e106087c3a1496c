use rand::Rng;

use super::ScoreModel;

/// Hidden width used by the experiment harness.
pub const HIDDEN_WIDTH: usize = 64;

/// One hidden ReLU layer: `g(x) = W2 relu(W1 x + b1) + b2`.
///
/// Parameter layout: `W1 (h x d)`, `b1 (h)`, `W2 (K x h)`, `b2 (K)`, all
/// row-major. The ReLU subgradient at 0 is taken as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    input_dim: usize,
    hidden: usize,
    output_dim: usize,
    params: Vec<f64>,
}

impl MlpModel {
    pub fn param_count(input_dim: usize, hidden: usize, output_dim: usize) -> usize {
        hidden * input_dim + hidden + output_dim * hidden + output_dim
    }

    /// Each layer is uniform in `+-1/sqrt(fan_in)`.
    pub fn init<R: Rng + ?Sized>(input_dim: usize, hidden: usize, output_dim: usize, rng: &mut R) -> Self {
        let mut params = Vec::with_capacity(Self::param_count(input_dim, hidden, output_dim));
        let b1 = 1.0 / (input_dim.max(1) as f64).sqrt();
        for _ in 0..hidden * (input_dim + 1) {
            params.push(rng.random_range(-b1..b1));
        }
        let b2 = 1.0 / (hidden.max(1) as f64).sqrt();
        for _ in 0..output_dim * (hidden + 1) {
            params.push(rng.random_range(-b2..b2));
        }
        MlpModel {
            input_dim,
            hidden,
            output_dim,
            params,
        }
    }

    pub(crate) fn from_flat(input_dim: usize, hidden: usize, output_dim: usize, params: Vec<f64>) -> Self {
        debug_assert_eq!(params.len(), Self::param_count(input_dim, hidden, output_dim));
        MlpModel {
            input_dim,
            hidden,
            output_dim,
            params,
        }
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    fn offsets(&self) -> (usize, usize, usize) {
        let w1_end = self.hidden * self.input_dim;
        let b1_end = w1_end + self.hidden;
        let w2_end = b1_end + self.output_dim * self.hidden;
        (w1_end, b1_end, w2_end)
    }

    fn hidden_activations(&self, x: &[f64]) -> Vec<f64> {
        let d = self.input_dim;
        let (w1_end, b1_end, _) = self.offsets();
        let w1 = &self.params[..w1_end];
        let b1 = &self.params[w1_end..b1_end];
        (0..self.hidden)
            .map(|j| {
                let pre: f64 = w1[j * d..(j + 1) * d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + b1[j];
                pre.max(0.0)
            })
            .collect()
    }
}

impl ScoreModel for MlpModel {
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
        let h = self.hidden_activations(x);
        let (_, b1_end, w2_end) = self.offsets();
        let w2 = &self.params[b1_end..w2_end];
        let b2 = &self.params[w2_end..];
        (0..self.output_dim)
            .map(|k| {
                w2[k * self.hidden..(k + 1) * self.hidden]
                    .iter()
                    .zip(&h)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    + b2[k]
            })
            .collect()
    }

    fn accumulate_backward(&self, x: &[f64], upstream: &[f64], grad: &mut [f64]) {
        let d = self.input_dim;
        let hw = self.hidden;
        let h = self.hidden_activations(x);
        let (w1_end, b1_end, w2_end) = self.offsets();
        let w2 = &self.params[b1_end..w2_end];

        let mut dh = vec![0.0; hw];
        {
            let (gw2, gb2) = grad[b1_end..].split_at_mut(self.output_dim * hw);
            for (k, &u) in upstream.iter().enumerate() {
                if u == 0.0 {
                    continue;
                }
                let row = &w2[k * hw..(k + 1) * hw];
                for j in 0..hw {
                    gw2[k * hw + j] += u * h[j];
                    dh[j] += u * row[j];
                }
                gb2[k] += u;
            }
        }
        let (gw1, rest) = grad.split_at_mut(w1_end);
        let gb1 = &mut rest[..b1_end - w1_end];
        for j in 0..hw {
            if h[j] <= 0.0 || dh[j] == 0.0 {
                continue;
            }
            let dj = dh[j];
            for (g, &xi) in gw1[j * d..(j + 1) * d].iter_mut().zip(x) {
                *g += dj * xi;
            }
            gb1[j] += dj;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parameter_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = MlpModel::init(20, 64, 2, &mut rng);
        assert_eq!(m.params().len(), 64 * 20 + 64 + 2 * 64 + 2);
    }

    #[test]
    fn init_respects_fan_in_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = MlpModel::init(16, 8, 3, &mut rng);
        let (_, b1_end, _) = m.offsets();
        assert!(m.params()[..b1_end].iter().all(|v| v.abs() <= 0.25));
        assert!(m.params()[b1_end..].iter().all(|v| v.abs() <= 1.0 / 8f64.sqrt()));
    }

    #[test]
    fn dead_units_do_not_receive_gradient() {
        // W1 = 0, b1 = -1 keeps every hidden unit off.
        let mut params = vec![0.0; MlpModel::param_count(2, 3, 2)];
        for b in &mut params[6..9] {
            *b = -1.0;
        }
        let m = MlpModel::from_flat(2, 3, 2, params);
        let g = m.backward(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!(g[..9].iter().all(|&v| v == 0.0));
        assert_eq!(&g[g.len() - 2..], &[1.0, 1.0]);
    }
}
