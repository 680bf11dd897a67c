//! Fully connected network with a single logistic output unit.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{sigmoid, FocalLossParams, Loss, ModelError, Result, TrainingData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Relu => v.max(0.0),
            Activation::Tanh => v.tanh(),
        }
    }

    /// Derivative given the pre-activation and the activation output.
    fn derivative(self, pre: f64, out: f64) -> f64 {
        match self {
            Activation::Relu => {
                if pre > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - out * out,
        }
    }
}

/// Layer sizes run from the input width to the single output unit. All
/// weights and biases live in one flat vector, layer by layer: the
/// `out × in` weight matrix row-major, then the `out` biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub sizes: Vec<usize>,
    pub activation: Activation,
    pub params: Vec<f64>,
}

impl MlpModel {
    /// Symmetric uniform initialization scaled by `1/sqrt(fan_in)`; biases 0.
    pub fn init(n_inputs: usize, hidden: &[usize], activation: Activation, seed: u64) -> Self {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(n_inputs);
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Vec::new();
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                params.push(rng.gen_range(-bound..bound));
            }
            params.extend(std::iter::repeat_n(0.0, fan_out));
        }
        MlpModel {
            sizes,
            activation,
            params,
        }
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    fn layer_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.sizes.len());
        let mut o = 0;
        offsets.push(0);
        for w in self.sizes.windows(2) {
            o += w[0] * w[1] + w[1];
            offsets.push(o);
        }
        offsets
    }

    /// Pre-activations and activations of every layer; the last layer holds
    /// the output logit (no activation).
    fn forward(&self, row: &[f64], offsets: &[usize]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let n_layers = self.sizes.len() - 1;
        let mut pres = Vec::with_capacity(n_layers);
        let mut outs: Vec<Vec<f64>> = Vec::with_capacity(n_layers + 1);
        outs.push(row.to_vec());
        for l in 0..n_layers {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let w = &self.params[offsets[l]..offsets[l] + n_in * n_out];
            let b = &self.params[offsets[l] + n_in * n_out..offsets[l + 1]];
            let input = &outs[l];
            let pre: Vec<f64> = (0..n_out)
                .map(|o| {
                    b[o] + w[o * n_in..(o + 1) * n_in]
                        .iter()
                        .zip(input)
                        .map(|(a, x)| a * x)
                        .sum::<f64>()
                })
                .collect();
            let out = if l + 1 == n_layers {
                pre.clone()
            } else {
                pre.iter().map(|&v| self.activation.apply(v)).collect()
            };
            pres.push(pre);
            outs.push(out);
        }
        (pres, outs)
    }

    pub fn logit(&self, row: &[f64]) -> f64 {
        let offsets = self.layer_offsets();
        let (_, outs) = self.forward(row, &offsets);
        outs[outs.len() - 1][0]
    }

    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        sigmoid(self.logit(row))
    }
}

/// Mean loss over `rows` and its gradient with respect to
/// [`MlpModel::params`], by backpropagation.
pub fn mlp_loss_and_grad(model: &MlpModel, data: &TrainingData, rows: &[usize], loss: &Loss) -> (f64, Vec<f64>) {
    let offsets = model.layer_offsets();
    let n_layers = model.sizes.len() - 1;
    let mut grad = vec![0.0; model.params.len()];
    let mut total = 0.0;
    for &i in rows {
        let (pres, outs) = model.forward(data.x.row(i), &offsets);
        let (l, dz) = loss.value_and_grad(outs[n_layers][0], data.y[i]);
        total += l;
        let mut delta = vec![dz];
        for layer in (0..n_layers).rev() {
            let (n_in, n_out) = (model.sizes[layer], model.sizes[layer + 1]);
            let w_off = offsets[layer];
            let b_off = w_off + n_in * n_out;
            let input = &outs[layer];
            for o in 0..n_out {
                let d = delta[o];
                grad[b_off + o] += d;
                let g = &mut grad[w_off + o * n_in..w_off + (o + 1) * n_in];
                for (gk, x) in g.iter_mut().zip(input) {
                    *gk += d * x;
                }
            }
            if layer > 0 {
                let w = &model.params[w_off..b_off];
                let prev_pre = &pres[layer - 1];
                let prev_out = &outs[layer];
                delta = (0..n_in)
                    .map(|k| {
                        let back: f64 = (0..n_out).map(|o| w[o * n_in + k] * delta[o]).sum();
                        back * model.activation.derivative(prev_pre[k], prev_out[k])
                    })
                    .collect();
            }
        }
    }
    let n = rows.len() as f64;
    for g in grad.iter_mut() {
        *g /= n;
    }
    (total / n, grad)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden_sizes: Vec<usize>,
    pub activation: Activation,
    pub lr: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub loss: Loss,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden_sizes: vec![16],
            activation: Activation::Relu,
            lr: 0.01,
            momentum: 0.9,
            epochs: 60,
            batch_size: 32,
            loss: Loss::Focal(FocalLossParams {
                alpha_t: 1.0,
                gamma: 1.0,
            }),
        }
    }
}

impl MlpParams {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_sizes.is_empty() || self.hidden_sizes.contains(&0) {
            return Err(ModelError::InvalidParams(
                "hidden_sizes must be non-empty and positive".into(),
            ));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(ModelError::InvalidParams("epochs and batch_size must be >= 1".into()));
        }
        if !(self.lr > 0.0) || !(0.0..1.0).contains(&self.momentum) {
            return Err(ModelError::InvalidParams(format!(
                "lr {} must be > 0 and momentum {} in [0, 1)",
                self.lr, self.momentum
            )));
        }
        if let Loss::Focal(f) = &self.loss {
            f.validate()?;
        }
        Ok(())
    }
}

/// Mini-batch SGD with momentum on the mean loss. Row order is reshuffled
/// every epoch from the seeded stream.
pub fn train_mlp(data: &TrainingData, params: &MlpParams, seed: u64) -> Result<MlpModel> {
    params.validate()?;
    let mut model = MlpModel::init(data.x.n_cols, &params.hidden_sizes, params.activation, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x5eed));
    let mut velocity = vec![0.0; model.n_params()];
    let mut order: Vec<usize> = (0..data.x.n_rows).collect();
    for epoch in 1..=params.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(params.batch_size) {
            let (loss, grad) = mlp_loss_and_grad(&model, data, batch, &params.loss);
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(ModelError::Diverged { epoch, loss });
            }
            epoch_loss += loss * batch.len() as f64;
            for ((p, v), g) in model.params.iter_mut().zip(velocity.iter_mut()).zip(&grad) {
                *v = params.momentum * *v - params.lr * g;
                *p += *v;
            }
        }
        if model.params.iter().any(|p| !p.is_finite()) {
            return Err(ModelError::Diverged {
                epoch,
                loss: epoch_loss / data.x.n_rows as f64,
            });
        }
    }
    Ok(model)
}
