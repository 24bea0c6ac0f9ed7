//! Ridge-penalized logistic regression over a feature map.
//!
//! The fitted model plays two roles: the observed-arm posterior
//! `eta1(x) = P(Y=1 | X=x, R=1)` needed by the tilt objective and the outcome
//! regression, and the downstream weighted / soft-label trainers of the
//! transfer benchmark.
//!
//! Every trainer minimizes an objective of the form
//!
//! ```text
//! L(b0, b) = sum_i [ c_i * softplus(z_i) - d_i * z_i ] + lambda * |b|^2,
//! z_i = b0 + b . T(x_i)
//! ```
//!
//! A weighted soft-label fit uses `c_i = w_i / W` and `d_i = w_i p_i / W`
//! (`W = sum w_i`), which is the per-sample loss
//! `p * l(x, 1) + (1 - p) * l(x, 0)` averaged with weights. Other trainers
//! (the doubly robust one) supply `(c, d)` directly through [`LossTerms`].
//!
//! Optimization is full-batch gradient descent with Armijo backtracking,
//! run in standardized feature coordinates (each column centered and scaled
//! by its standard deviation). The reparametrization is linear, so the
//! minimizer in the original coordinates is unchanged; the intercept stays
//! unpenalized.

use serde::{Deserialize, Serialize};

use crate::dataset::MnarDataset;
use crate::error::{Result, TiltError};
use crate::features::FeatureMap;
use crate::params::dot;

pub const PROBA_CLAMP: f64 = 1e-12;

const ARMIJO_C: f64 = 1e-4;
const BACKTRACK_SHRINK: f64 = 0.5;
const MIN_STEP: f64 = 1e-20;

/// Anything that yields `P(Y = 1 | X = x)` estimates in `(0, 1)`.
///
/// Plain closures are accepted; their outputs are clamped like
/// [`LogisticModel`] predictions.
pub trait ProbClassifier: Sync {
    fn predict_proba(&self, x: &[f64]) -> Result<f64>;

    fn predict_rows(&self, rows: &[f64], dim: usize) -> Result<Vec<f64>> {
        rows.chunks_exact(dim).map(|x| self.predict_proba(x)).collect()
    }

    fn predict_dataset(&self, ds: &MnarDataset) -> Result<Vec<f64>> {
        self.predict_rows(ds.covariates(), ds.dim())
    }
}

impl<F> ProbClassifier for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        Ok(clamp_proba(self(x)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub feature_map: FeatureMap,
    pub intercept: f64,
    pub weights: Vec<f64>,
    pub ridge_lambda: f64,
}

impl LogisticModel {
    pub fn new(feature_map: FeatureMap, intercept: f64, weights: Vec<f64>, ridge_lambda: f64) -> Result<Self> {
        if weights.len() != feature_map.output_dim() {
            return Err(TiltError::DimensionMismatch {
                expected: feature_map.output_dim(),
                got: weights.len(),
            });
        }
        if !intercept.is_finite() || !weights.iter().all(|w| w.is_finite()) {
            return Err(TiltError::InvalidArgument("logistic parameters must be finite".into()));
        }
        Ok(LogisticModel {
            feature_map,
            intercept,
            weights,
            ridge_lambda,
        })
    }

    pub fn logit(&self, x: &[f64]) -> Result<f64> {
        let t = self.feature_map.apply(x)?;
        Ok(self.intercept + dot(&self.weights, &t))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: LogisticModel = serde_json::from_str(s)?;
        LogisticModel::new(m.feature_map, m.intercept, m.weights, m.ridge_lambda)
    }
}

impl ProbClassifier for LogisticModel {
    fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        Ok(clamp_proba(sigmoid(self.logit(x)?)))
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
pub fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub fn clamp_proba(p: f64) -> f64 {
    p.clamp(PROBA_CLAMP, 1.0 - PROBA_CLAMP)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSpec {
    /// Per-sample weights; `None` means all ones.
    pub weights: Option<Vec<f64>>,
    /// Soft labels in `[0, 1]` replacing the hard labels.
    pub soft_labels: Option<Vec<f64>>,
    pub ridge_lambda: f64,
    pub max_iter: usize,
    pub tolerance: f64,
}

impl Default for TrainingSpec {
    fn default() -> Self {
        TrainingSpec {
            weights: None,
            soft_labels: None,
            ridge_lambda: 1e-3,
            max_iter: 10_000,
            tolerance: 1e-8,
        }
    }
}

impl TrainingSpec {
    pub fn with_lambda(ridge_lambda: f64) -> Self {
        TrainingSpec {
            ridge_lambda,
            ..Default::default()
        }
    }
}

/// Per-row coefficients `(c_i, d_i)` of `c_i softplus(z_i) - d_i z_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossTerms {
    pub softplus: Vec<f64>,
    pub linear: Vec<f64>,
}

impl LossTerms {
    /// Normalized weighted soft-label loss.
    pub fn weighted(labels: &[f64], weights: Option<&[f64]>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(TiltError::InvalidArgument("empty training data".into()));
        }
        if let Some(p) = labels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(TiltError::InvalidArgument(format!("label {p} outside [0,1]")));
        }
        let w: Vec<f64> = match weights {
            Some(w) => {
                if w.len() != n {
                    return Err(TiltError::DimensionMismatch { expected: n, got: w.len() });
                }
                if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(TiltError::InvalidArgument("sample weights must be finite and nonnegative".into()));
                }
                w.to_vec()
            }
            None => vec![1.0; n],
        };
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return Err(TiltError::InvalidArgument("sample weights are all zero".into()));
        }
        Ok(LossTerms {
            softplus: w.iter().map(|wi| wi / total).collect(),
            linear: w.iter().zip(labels).map(|(wi, p)| wi * p / total).collect(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct LogisticFit {
    pub model: LogisticModel,
    pub converged: bool,
    pub iterations: usize,
    pub final_loss: f64,
    pub grad_inf_norm: f64,
    /// Objective value after every accepted step, starting at the initial point.
    pub loss_trace: Vec<f64>,
}

/// Objective value and gradient `(d/d intercept, d/d weights...)` in the
/// original feature coordinates.
pub fn loss_and_gradient(
    intercept: f64,
    weights: &[f64],
    features: &[f64],
    terms: &LossTerms,
    ridge_lambda: f64,
) -> Result<(f64, Vec<f64>)> {
    let p = weights.len();
    check_shapes(features, p, terms)?;
    let scale = vec![1.0; p];
    let mut params = Vec::with_capacity(p + 1);
    params.push(intercept);
    params.extend_from_slice(weights);
    let mut grad = vec![0.0; p + 1];
    let loss = objective(&params, features, terms, ridge_lambda, &scale, Some(&mut grad));
    Ok((loss, grad))
}

fn check_shapes(features: &[f64], p: usize, terms: &LossTerms) -> Result<()> {
    let n = terms.softplus.len();
    if terms.linear.len() != n {
        return Err(TiltError::DimensionMismatch { expected: n, got: terms.linear.len() });
    }
    if features.len() != n * p {
        return Err(TiltError::DimensionMismatch {
            expected: n * p,
            got: features.len(),
        });
    }
    Ok(())
}

// Penalty is lambda * sum_j (params[j+1] * scale[j])^2.
fn objective(
    params: &[f64],
    features: &[f64],
    terms: &LossTerms,
    lambda: f64,
    scale: &[f64],
    mut grad: Option<&mut [f64]>,
) -> f64 {
    let p = params.len() - 1;
    if let Some(g) = grad.as_deref_mut() {
        g.iter_mut().for_each(|v| *v = 0.0);
    }
    let mut loss = 0.0;
    for (i, t) in features.chunks_exact(p.max(1)).take(terms.softplus.len()).enumerate() {
        let t = &t[..p];
        let z = params[0] + dot(&params[1..], t);
        let c = terms.softplus[i];
        let d = terms.linear[i];
        loss += c * softplus(z) - d * z;
        if let Some(g) = grad.as_deref_mut() {
            let r = c * sigmoid(z) - d;
            g[0] += r;
            for (gj, tj) in g[1..].iter_mut().zip(t) {
                *gj += r * tj;
            }
        }
    }
    for j in 0..p {
        let b = params[j + 1] * scale[j];
        loss += lambda * b * b;
        if let Some(g) = grad.as_deref_mut() {
            g[j + 1] += 2.0 * lambda * b * scale[j];
        }
    }
    loss
}

/// Fits `loss terms` over already-mapped features (row-major `n x p`).
pub fn fit_terms(
    feature_map: FeatureMap,
    features: &[f64],
    terms: &LossTerms,
    ridge_lambda: f64,
    max_iter: usize,
    tolerance: f64,
) -> Result<LogisticFit> {
    let p = feature_map.output_dim();
    check_shapes(features, p, terms)?;
    let n = terms.softplus.len();
    if n == 0 {
        return Err(TiltError::InvalidArgument("empty training data".into()));
    }
    if ridge_lambda < 0.0 || !ridge_lambda.is_finite() {
        return Err(TiltError::InvalidArgument("ridge lambda must be >= 0".into()));
    }

    // Standardize columns: u = (t - m) / s.
    let mut mean = vec![0.0; p];
    for t in features.chunks_exact(p) {
        for (m, v) in mean.iter_mut().zip(t) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut sd = vec![0.0; p];
    for t in features.chunks_exact(p) {
        for j in 0..p {
            sd[j] += (t[j] - mean[j]).powi(2);
        }
    }
    for s in sd.iter_mut() {
        *s = (*s / n as f64).sqrt();
        if !(*s > 1e-12) {
            *s = 1.0;
        }
    }
    let std_features: Vec<f64> = features
        .chunks_exact(p)
        .flat_map(|t| (0..p).map(|j| (t[j] - mean[j]) / sd[j]).collect::<Vec<_>>())
        .collect();
    let inv_sd: Vec<f64> = sd.iter().map(|s| 1.0 / s).collect();

    let mut params = vec![0.0; p + 1];
    let mut grad = vec![0.0; p + 1];
    let mut loss = objective(&params, &std_features, terms, ridge_lambda, &inv_sd, Some(&mut grad));
    if !loss.is_finite() {
        return Err(TiltError::NonFinite { iteration: 0 });
    }
    let mut trace = vec![loss];
    let mut step: f64 = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    let mut trial = vec![0.0; p + 1];
    let mut trial_grad = vec![0.0; p + 1];

    while iterations < max_iter {
        let gnorm = inf_norm(&grad);
        if gnorm <= tolerance {
            converged = true;
            break;
        }
        let gsq: f64 = grad.iter().map(|g| g * g).sum();
        step = (step * 2.0).min(1e6);
        let accepted = loop {
            for k in 0..=p {
                trial[k] = params[k] - step * grad[k];
            }
            let l = objective(&trial, &std_features, terms, ridge_lambda, &inv_sd, Some(&mut trial_grad));
            if l.is_finite() && l <= loss - ARMIJO_C * step * gsq {
                break Some(l);
            }
            step *= BACKTRACK_SHRINK;
            if step < MIN_STEP {
                break None;
            }
        };
        iterations += 1;
        match accepted {
            Some(l) => {
                std::mem::swap(&mut params, &mut trial);
                std::mem::swap(&mut grad, &mut trial_grad);
                loss = l;
                trace.push(l);
            }
            None => break,
        }
    }
    if !converged && inf_norm(&grad) <= tolerance {
        converged = true;
    }

    // Map back: beta_j = b_j / s_j, beta0 = b0 - sum_j b_j m_j / s_j.
    let weights: Vec<f64> = (0..p).map(|j| params[j + 1] / sd[j]).collect();
    let intercept = params[0] - (0..p).map(|j| weights[j] * mean[j]).sum::<f64>();
    let model = LogisticModel::new(feature_map, intercept, weights, ridge_lambda)
        .map_err(|_| TiltError::NonFinite { iteration: iterations })?;
    Ok(LogisticFit {
        model,
        converged,
        iterations,
        final_loss: loss,
        grad_inf_norm: inf_norm(&grad),
        loss_trace: trace,
    })
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Fits a weighted (optionally soft-label) ridge logistic regression on
/// row-major covariates `x` (`n x d`).
pub fn fit_logistic(x: &[f64], labels: &[bool], feature_map: FeatureMap, spec: &TrainingSpec) -> Result<LogisticFit> {
    let n = labels.len();
    if n == 0 {
        return Err(TiltError::InvalidArgument("empty training data".into()));
    }
    let d = feature_map.input_dim();
    if x.len() != n * d {
        return Err(TiltError::DimensionMismatch { expected: n * d, got: x.len() });
    }
    let targets: Vec<f64> = match &spec.soft_labels {
        Some(p) => {
            if p.len() != n {
                return Err(TiltError::DimensionMismatch { expected: n, got: p.len() });
            }
            p.clone()
        }
        None => labels.iter().map(|&y| if y { 1.0 } else { 0.0 }).collect(),
    };
    let terms = LossTerms::weighted(&targets, spec.weights.as_deref())?;
    let features = feature_map.apply_rows(x)?;
    fit_terms(feature_map, &features, &terms, spec.ridge_lambda, spec.max_iter, spec.tolerance)
}

/// Settings for the `eta1` classifier: polynomial degree and ridge strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub degree: usize,
    pub ridge_lambda: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            degree: 2,
            ridge_lambda: 1e-3,
        }
    }
}

impl ClassifierConfig {
    pub fn feature_map(&self, input_dim: usize) -> Result<FeatureMap> {
        FeatureMap::polynomial(input_dim, self.degree)
    }
}

/// Fits `eta1(x) = P(Y=1 | X=x, R=1)` on the observed rows with hard labels
/// and uniform weights.
pub fn fit_eta1(ds: &MnarDataset, feature_map: FeatureMap, ridge_lambda: f64) -> Result<LogisticModel> {
    if feature_map.input_dim() != ds.dim() {
        return Err(TiltError::DimensionMismatch {
            expected: ds.dim(),
            got: feature_map.input_dim(),
        });
    }
    let (x, y) = ds.observed_part();
    if y.len() < 2 {
        return Err(TiltError::DegenerateClassifier(format!("need at least 2 observed rows, got {}", y.len())));
    }
    let ones = y.iter().filter(|&&v| v).count();
    if ones == 0 || ones == y.len() {
        return Err(TiltError::DegenerateClassifier("only one class among observed rows".into()));
    }
    let fit = fit_logistic(&x, &y, feature_map, &TrainingSpec::with_lambda(ridge_lambda))?;
    Ok(fit.model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id1() -> FeatureMap {
        FeatureMap::identity(1).unwrap()
    }

    #[test]
    fn sigmoid_values() {
        let m = LogisticModel::new(id1(), 0.0, vec![0.0], 0.0).unwrap();
        assert_eq!(m.predict_proba(&[5.0]).unwrap(), 0.5);
        let m = LogisticModel::new(id1(), 3f64.ln(), vec![0.0], 0.0).unwrap();
        assert!((m.predict_proba(&[-2.0]).unwrap() - 0.75).abs() < 1e-15);
        let m = LogisticModel::new(id1(), 1e6, vec![0.0], 0.0).unwrap();
        assert_eq!(m.predict_proba(&[0.0]).unwrap(), 1.0 - 1e-12);
        let m = LogisticModel::new(id1(), -1e6, vec![0.0], 0.0).unwrap();
        assert_eq!(m.predict_proba(&[0.0]).unwrap(), 1e-12);
    }

    #[test]
    fn predict_dimension_mismatch() {
        let m = LogisticModel::new(id1(), 0.0, vec![0.0], 0.0).unwrap();
        assert!(m.predict_proba(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn softplus_is_stable() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert!(softplus(-1000.0) >= 0.0 && softplus(-1000.0) < 1e-300);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn zero_params_balanced_loss_is_log2() {
        let feats = vec![1.0, -1.0, 2.0, 0.5];
        let terms = LossTerms::weighted(&[1.0, 0.0, 1.0, 0.0], None).unwrap();
        let (loss, _) = loss_and_gradient(0.0, &[0.0], &feats, &terms, 0.3).unwrap();
        assert!((loss - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn soft_half_label_is_average_of_hard_losses() {
        let feats = vec![0.7];
        let (b0, b) = (0.2, [-1.3]);
        let half = LossTerms::weighted(&[0.5], None).unwrap();
        let one = LossTerms::weighted(&[1.0], None).unwrap();
        let zero = LossTerms::weighted(&[0.0], None).unwrap();
        let l = |t: &LossTerms| loss_and_gradient(b0, &b, &feats, t, 0.0).unwrap().0;
        assert!((l(&half) - 0.5 * (l(&one) + l(&zero))).abs() < 1e-15);
    }

    #[test]
    fn constant_labels_give_positive_intercept() {
        let x: Vec<f64> = (0..40).map(|i| i as f64 / 10.0 - 2.0).collect();
        let y = vec![true; 40];
        let fit = fit_logistic(&x, &y, id1(), &TrainingSpec::with_lambda(0.1)).unwrap();
        assert!(fit.model.intercept > 0.0);
        assert!(fit.model.weights[0].abs() < 0.5);
        for xi in &x {
            assert!(fit.model.predict_proba(&[*xi]).unwrap() > 0.5);
        }
    }

    #[test]
    fn mirrored_data_has_zero_intercept() {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 1..=20 {
            let v = i as f64 / 7.0;
            x.push(v);
            y.push(i % 3 != 0);
            x.push(-v);
            y.push(i % 3 == 0);
        }
        let fit = fit_logistic(&x, &y, id1(), &TrainingSpec::with_lambda(1e-3)).unwrap();
        assert!(fit.converged);
        assert!(fit.model.intercept.abs() < 1e-6, "{}", fit.model.intercept);
    }

    #[test]
    fn loss_trace_is_non_increasing() {
        let x: Vec<f64> = (0..50).map(|i| ((i * 37) % 50) as f64 / 10.0 - 2.5).collect();
        let y: Vec<bool> = x.iter().enumerate().map(|(i, v)| *v + ((i * 13) % 7) as f64 / 3.0 > 0.5).collect();
        let fm = FeatureMap::polynomial(1, 3).unwrap();
        let fit = fit_logistic(&x, &y, fm, &TrainingSpec::with_lambda(1e-3)).unwrap();
        assert!(fit.loss_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn eta1_rejects_single_class() {
        let ds = MnarDataset::new(vec![0.0, 1.0, 2.0], 1, vec![true, true, false], vec![true, true, false]).unwrap();
        let err = fit_eta1(&ds, id1(), 1e-3).unwrap_err();
        assert!(matches!(err, TiltError::DegenerateClassifier(_)));
    }

    #[test]
    fn bad_training_specs() {
        let x = [0.0, 1.0];
        let y = [true, false];
        let mut spec = TrainingSpec::with_lambda(0.1);
        spec.weights = Some(vec![0.0, 0.0]);
        assert!(fit_logistic(&x, &y, id1(), &spec).is_err());
        spec.weights = Some(vec![-1.0, 2.0]);
        assert!(fit_logistic(&x, &y, id1(), &spec).is_err());
        spec.weights = None;
        spec.soft_labels = Some(vec![1.5, 0.0]);
        assert!(fit_logistic(&x, &y, id1(), &spec).is_err());
        assert!(fit_logistic(&[], &[], id1(), &TrainingSpec::default()).is_err());
    }

    #[test]
    fn model_json_roundtrip() {
        let m = LogisticModel::new(FeatureMap::polynomial(2, 2).unwrap(), 0.1, vec![1.0, -2.0, 0.3, 1e-17, 5.5], 1e-3).unwrap();
        let s = m.to_json().unwrap();
        assert!(s.contains("\"feature_map\"") && s.contains("\"ridge_lambda\""));
        assert_eq!(LogisticModel::from_json(&s).unwrap(), m);
    }
}
