use serde::{Deserialize, Serialize};

use crate::error::{Result, TiltError};

/// Exponential-tilt parameters `(alpha0, alpha1, beta0, beta1)`; the log
/// density ratio for outcome `y` is `alpha_y + beta_y . t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltParams {
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta0: Vec<f64>,
    pub beta1: Vec<f64>,
}

impl TiltParams {
    pub fn zeros(p: usize) -> Self {
        TiltParams {
            alpha0: 0.0,
            alpha1: 0.0,
            beta0: vec![0.0; p],
            beta1: vec![0.0; p],
        }
    }

    pub fn new(alpha0: f64, alpha1: f64, beta0: Vec<f64>, beta1: Vec<f64>) -> Result<Self> {
        let theta = TiltParams {
            alpha0,
            alpha1,
            beta0,
            beta1,
        };
        theta.validate()?;
        Ok(theta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta0.len() != self.beta1.len() {
            return Err(TiltError::DimensionMismatch {
                expected: self.beta0.len(),
                got: self.beta1.len(),
            });
        }
        if !self.to_vec().iter().all(|v| v.is_finite()) {
            return Err(TiltError::InvalidArgument("tilt parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.beta0.len()
    }

    pub fn alpha(&self, y: bool) -> f64 {
        if y {
            self.alpha1
        } else {
            self.alpha0
        }
    }

    pub fn beta(&self, y: bool) -> &[f64] {
        if y {
            &self.beta1
        } else {
            &self.beta0
        }
    }

    /// `alpha_y + beta_y . t`
    pub fn log_weight(&self, t: &[f64], y: bool) -> f64 {
        self.alpha(y) + dot(self.beta(y), t)
    }

    /// Flattened as `[alpha0, alpha1, beta0..., beta1...]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 + 2 * self.dim());
        v.push(self.alpha0);
        v.push(self.alpha1);
        v.extend_from_slice(&self.beta0);
        v.extend_from_slice(&self.beta1);
        v
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() < 2 || (v.len() - 2) % 2 != 0 {
            return Err(TiltError::InvalidArgument(format!(
                "flattened tilt vector must have even length >= 2, got {}",
                v.len()
            )));
        }
        let p = (v.len() - 2) / 2;
        Ok(TiltParams {
            alpha0: v[0],
            alpha1: v[1],
            beta0: v[2..2 + p].to_vec(),
            beta1: v[2 + p..].to_vec(),
        })
    }

    pub fn max_abs_diff(&self, other: &TiltParams) -> f64 {
        self.to_vec()
            .iter()
            .zip(other.to_vec())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
