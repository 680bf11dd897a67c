use serde::{Deserialize, Serialize};

use super::{sigmoid, Loss, ModelError, Result, TrainingData};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub alpha0: f64,
    pub alpha: Vec<f64>,
}

impl LogisticModel {
    pub fn zeros(n_features: usize) -> Self {
        LogisticModel {
            alpha0: 0.0,
            alpha: vec![0.0; n_features],
        }
    }

    pub fn logit(&self, row: &[f64]) -> f64 {
        self.alpha0 + self.alpha.iter().zip(row).map(|(a, x)| a * x).sum::<f64>()
    }

    /// `P(y = +1 | x) = 1 / (1 + exp(-(α0 + αᵀx)))`.
    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        sigmoid(self.logit(row))
    }

    fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.alpha.len() + 1);
        p.push(self.alpha0);
        p.extend_from_slice(&self.alpha);
        p
    }

    fn from_params(p: &[f64]) -> Self {
        LogisticModel {
            alpha0: p[0],
            alpha: p[1..].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticParams {
    pub lr: f64,
    pub l2: f64,
    pub epochs: usize,
    pub loss: Loss,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            lr: 0.5,
            l2: 1e-2,
            epochs: 300,
            loss: Loss::CrossEntropy,
        }
    }
}

/// Mean loss plus `l2/2 ‖α‖²` (intercept unpenalized), and its gradient
/// laid out as `[∂α0, ∂α1, …]`.
pub fn logistic_loss_and_grad(model: &LogisticModel, data: &TrainingData, loss: &Loss, l2: f64) -> (f64, Vec<f64>) {
    let n = data.x.n_rows as f64;
    let mut grad = vec![0.0; model.alpha.len() + 1];
    let mut total = 0.0;
    for i in 0..data.x.n_rows {
        let row = data.x.row(i);
        let (l, dz) = loss.value_and_grad(model.logit(row), data.y[i]);
        total += l;
        grad[0] += dz;
        for (g, x) in grad[1..].iter_mut().zip(row) {
            *g += dz * x;
        }
    }
    for g in grad.iter_mut() {
        *g /= n;
    }
    let mut penalty = 0.0;
    for (g, a) in grad[1..].iter_mut().zip(&model.alpha) {
        *g += l2 * a;
        penalty += a * a;
    }
    (total / n + 0.5 * l2 * penalty, grad)
}

/// Full-batch gradient descent from zero with a backtracking step: a step
/// that would raise the objective is halved until it does not, so the
/// returned loss history is non-increasing. The seed is unused (training
/// is deterministic from the zero start) but kept for a uniform trainer
/// signature.
pub fn train_logistic(data: &TrainingData, params: &LogisticParams, _seed: u64) -> Result<(LogisticModel, Vec<f64>)> {
    if params.epochs == 0 {
        return Err(ModelError::InvalidParams("epochs must be >= 1".into()));
    }
    if !(params.lr > 0.0) || !(params.l2 >= 0.0) {
        return Err(ModelError::InvalidParams(format!(
            "lr {} must be > 0 and l2 {} >= 0",
            params.lr, params.l2
        )));
    }
    if let Loss::Focal(f) = &params.loss {
        f.validate()?;
    }
    let mut model = LogisticModel::zeros(data.x.n_cols);
    let (mut loss, mut grad) = logistic_loss_and_grad(&model, data, &params.loss, params.l2);
    let mut history = vec![loss];
    for epoch in 1..=params.epochs {
        let current = model.params();
        let mut step = params.lr;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = current.iter().zip(&grad).map(|(p, g)| p - step * g).collect();
            let candidate = LogisticModel::from_params(&trial);
            let (l, g) = logistic_loss_and_grad(&candidate, data, &params.loss, params.l2);
            if !l.is_finite() {
                return Err(ModelError::Diverged { epoch, loss: l });
            }
            if l <= loss {
                accepted = Some((candidate, l, g));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((m, l, g)) => {
                model = m;
                loss = l;
                grad = g;
                history.push(loss);
            }
            // no descent step left: converged
            None => break,
        }
    }
    Ok((model, history))
}
