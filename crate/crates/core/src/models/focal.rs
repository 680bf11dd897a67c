use serde::{Deserialize, Serialize};

use super::{sigmoid, ModelError, Result};

/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` before logs.
pub const PROB_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocalLossParams {
    pub alpha_t: f64,
    pub gamma: f64,
}

impl Default for FocalLossParams {
    fn default() -> Self {
        FocalLossParams {
            alpha_t: 1.0,
            gamma: 0.0,
        }
    }
}

impl FocalLossParams {
    pub fn new(alpha_t: f64, gamma: f64) -> Result<Self> {
        let p = FocalLossParams { alpha_t, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha_t) {
            return Err(ModelError::InvalidParams(format!(
                "alpha_t {} not in [0, 1]",
                self.alpha_t
            )));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(ModelError::InvalidParams(format!("gamma {} < 0", self.gamma)));
        }
        Ok(())
    }
}

/// `-α_t (1 - p_t)^γ ln(p_t)` where `p_t` is the predicted probability of
/// the true class.
pub fn focal_loss(p_t: f64, params: &FocalLossParams) -> f64 {
    let p_t = p_t.clamp(PROB_EPS, 1.0 - PROB_EPS);
    let q = 1.0 - p_t;
    -params.alpha_t * q.powf(params.gamma) * p_t.ln()
}

/// Training objective applied to the output logit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[derive(Default)]
pub enum Loss {
    #[default]
    CrossEntropy,
    Focal(FocalLossParams),
}

impl Loss {
    /// Loss and its derivative with respect to the logit `z`, for a 0/1
    /// outcome `y`.
    pub fn value_and_grad(&self, z: f64, y: f64) -> (f64, f64) {
        match self {
            Loss::CrossEntropy => {
                let p = sigmoid(z);
                let p_t = if y > 0.5 { p } else { 1.0 - p };
                (-p_t.clamp(PROB_EPS, 1.0 - PROB_EPS).ln(), p - y)
            }
            Loss::Focal(params) => focal_loss_grad_logit(z, y, params),
        }
    }
}

/// Focal loss at logit `z` and its derivative with respect to `z`:
///
/// `d/dz = s · α_t (1 - p_t)^γ (γ p_t ln p_t - (1 - p_t))`
///
/// with `s = +1` for a default and `-1` otherwise.
pub fn focal_loss_grad_logit(z: f64, y: f64, params: &FocalLossParams) -> (f64, f64) {
    let p = sigmoid(z);
    let positive = y > 0.5;
    // q = 1 - p_t, taken from whichever side is exact
    let (p_t, q) = if positive { (p, 1.0 - p) } else { (1.0 - p, p) };
    let p_t = p_t.clamp(PROB_EPS, 1.0 - PROB_EPS);
    let weight = params.alpha_t * q.powf(params.gamma);
    let ln_pt = p_t.ln();
    let loss = -weight * ln_pt;
    let dz = weight * (params.gamma * p_t * ln_pt - q);
    (loss, if positive { dz } else { -dz })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_entropy_reduction() {
        let ce = FocalLossParams::new(1.0, 0.0).unwrap();
        assert!((focal_loss(0.5, &ce) - 2f64.ln()).abs() < 1e-15);
        assert!(focal_loss(1.0, &ce) < 1e-11);
    }

    #[test]
    fn arithmetic_example() {
        let p = FocalLossParams::new(0.25, 2.0).unwrap();
        let expected = 0.25 * 0.01 * (-(0.9f64).ln());
        assert!((focal_loss(0.9, &p) - expected).abs() < 1e-15);
        assert!((focal_loss(0.9, &p) - 2.634e-4).abs() < 1e-7);
    }

    #[test]
    fn params_validated() {
        assert!(FocalLossParams::new(1.5, 0.0).is_err());
        assert!(FocalLossParams::new(0.5, -1.0).is_err());
    }

    #[test]
    fn gamma_zero_gradient_matches_cross_entropy_bits() {
        let focal = Loss::Focal(FocalLossParams::new(1.0, 0.0).unwrap());
        for &z in &[-3.0, -0.2, 0.0, 0.7, 5.0] {
            for &y in &[0.0, 1.0] {
                let (_, a) = focal.value_and_grad(z, y);
                let (_, b) = Loss::CrossEntropy.value_and_grad(z, y);
                assert_eq!(a.to_bits(), b.to_bits(), "z={z} y={y}");
            }
        }
    }

    #[test]
    fn logit_gradient_matches_finite_difference() {
        let p = FocalLossParams::new(0.25, 2.0).unwrap();
        // p_t = 0.7 for a positive sample
        let z = (0.7f64 / 0.3).ln();
        for y in [1.0, 0.0] {
            let (_, g) = focal_loss_grad_logit(z, y, &p);
            let h = 1e-6;
            let fd = (focal_loss_grad_logit(z + h, y, &p).0 - focal_loss_grad_logit(z - h, y, &p).0) / (2.0 * h);
            assert!(((g - fd) / fd).abs() < 1e-6, "y={y}: {g} vs {fd}");
        }
    }
}
