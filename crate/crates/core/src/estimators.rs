//! Importance weights, propensities, outcome regression and the IW / IPW /
//! DR / OR estimators of `mu0 = E[tau(X,Y) | R=0]` and `mu = E[tau(X,Y)]`.
//!
//! All estimators are written both as direct formulas and as averages of
//! per-row scores (used for sample-split standard errors). `pi_r = n1 / n`
//! is always taken from the dataset being evaluated.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classifier::{fit_eta1, sigmoid, ClassifierConfig, ProbClassifier};
use crate::dataset::{split_dataset, MnarDataset, PiR};
use crate::error::{Result, TiltError};
use crate::features::FeatureMap;
use crate::params::{dot, TiltParams};
use crate::tilt::{exponentiated_gradient, TiltFitConfig, TiltFitResult};

const LOG_WEIGHT_CAP: f64 = 700.0;
pub const Z_95: f64 = 1.96;

type Branch = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// `tau(x, y)` given as its two branches `x -> tau(x, 0)` and `x -> tau(x, 1)`.
#[derive(Clone)]
pub struct MeanFunctional {
    pub name: String,
    tau0: Branch,
    tau1: Branch,
}

impl fmt::Debug for MeanFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeanFunctional").field("name", &self.name).finish()
    }
}

impl MeanFunctional {
    pub fn new(
        name: impl Into<String>,
        tau0: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        tau1: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MeanFunctional {
            name: name.into(),
            tau0: Arc::new(tau0),
            tau1: Arc::new(tau1),
        }
    }

    /// `tau(x, y) = y`.
    pub fn outcome() -> Self {
        Self::new("y", |_| 0.0, |_| 1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const({c})"), move |_| c, move |_| c)
    }

    pub fn eval(&self, x: &[f64], y: bool) -> f64 {
        if y {
            (self.tau1)(x)
        } else {
            (self.tau0)(x)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimand {
    Mu,
    Mu0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Iw,
    Ipw,
    Dr,
    Or,
}

impl fmt::Display for Estimand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimand::Mu => "mu",
            Estimand::Mu0 => "mu0",
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Iw => "iw",
            Method::Ipw => "ipw",
            Method::Dr => "dr",
            Method::Or => "or",
        })
    }
}

impl FromStr for Estimand {
    type Err = TiltError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mu" => Ok(Estimand::Mu),
            "mu0" => Ok(Estimand::Mu0),
            _ => Err(TiltError::InvalidArgument(format!("unknown estimand {s:?}"))),
        }
    }
}

impl FromStr for Method {
    type Err = TiltError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iw" => Ok(Method::Iw),
            "ipw" => Ok(Method::Ipw),
            "dr" => Ok(Method::Dr),
            "or" => Ok(Method::Or),
            _ => Err(TiltError::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimand: Estimand,
    pub method: Method,
    pub point: f64,
    pub std_error: Option<f64>,
    pub ci95: Option<(f64, f64)>,
    pub n_used: usize,
}

impl EstimateReport {
    fn point(estimand: Estimand, method: Method, point: f64, n_used: usize) -> Self {
        EstimateReport {
            estimand,
            method,
            point,
            std_error: None,
            ci95: None,
            n_used,
        }
    }
}

/// `omega(x, y) = exp(alpha_y + beta_y . T(x))`, exponent clamped to `[-700, 700]`.
pub fn importance_weight(theta: &TiltParams, fm: &FeatureMap, x: &[f64], y: bool) -> Result<f64> {
    let t = fm.apply(x)?;
    check_dims(theta, fm)?;
    Ok(weight_from_t(theta, &t, y))
}

fn weight_from_t(theta: &TiltParams, t: &[f64], y: bool) -> f64 {
    theta.log_weight(t, y).clamp(-LOG_WEIGHT_CAP, LOG_WEIGHT_CAP).exp()
}

fn check_dims(theta: &TiltParams, fm: &FeatureMap) -> Result<()> {
    if theta.dim() != fm.output_dim() {
        return Err(TiltError::DimensionMismatch {
            expected: fm.output_dim(),
            got: theta.dim(),
        });
    }
    Ok(())
}

/// `P(R=1 | x, y) = pi / (pi + omega(x, y) (1 - pi))`.
pub fn propensity_r(theta: &TiltParams, fm: &FeatureMap, pi_r: PiR, x: &[f64], y: bool) -> Result<f64> {
    let t = fm.apply(x)?;
    check_dims(theta, fm)?;
    Ok(propensity_from_t(theta, &t, pi_r.value(), y))
}

fn propensity_from_t(theta: &TiltParams, t: &[f64], pi: f64, y: bool) -> f64 {
    let log_odds_missing = theta.log_weight(t, y) + ((1.0 - pi) / pi).ln();
    sigmoid(-log_odds_missing)
}

/// `gamma(1 | x) = (alpha1 - alpha0) + (beta1 - beta0) . T(x)`.
pub fn gamma_log_odds(theta: &TiltParams, fm: &FeatureMap, x: &[f64]) -> Result<f64> {
    let t = fm.apply(x)?;
    check_dims(theta, fm)?;
    Ok(gamma_from_t(theta, &t))
}

fn gamma_from_t(theta: &TiltParams, t: &[f64]) -> f64 {
    (theta.alpha1 - theta.alpha0) + dot(&theta.beta1, t) - dot(&theta.beta0, t)
}

/// `m0(x) = e^gamma eta1 / (e^gamma eta1 + 1 - eta1)`, the regression of the
/// missing outcome on `x`.
pub fn outcome_regression_m0(theta: &TiltParams, eta1: &dyn ProbClassifier, fm: &FeatureMap, x: &[f64]) -> Result<f64> {
    let gamma = gamma_log_odds(theta, fm, x)?;
    Ok(m0_from_parts(gamma, eta1.predict_proba(x)?))
}

pub fn m0_from_parts(gamma: f64, eta1: f64) -> f64 {
    sigmoid(gamma + eta1.ln() - (-eta1).ln_1p())
}

/// Per-row nuisance values shared by every estimator.
struct RowNuisance {
    /// `omega(X_i, Y_i)` (only meaningful for observed rows).
    omega: Vec<f64>,
    /// `1 / P(R=1 | X_i, Y_i)` via the propensity formula.
    inv_prop: Vec<f64>,
    /// `m_{0,tau}(X_i)`; empty when no outcome regression was requested.
    m0_tau: Vec<f64>,
    tau: Vec<f64>,
}

fn nuisance(
    ds: &MnarDataset,
    theta: &TiltParams,
    fm: &FeatureMap,
    eta1: Option<&dyn ProbClassifier>,
    tau: &MeanFunctional,
) -> Result<RowNuisance> {
    check_dims(theta, fm)?;
    if fm.input_dim() != ds.dim() {
        return Err(TiltError::DimensionMismatch {
            expected: ds.dim(),
            got: fm.input_dim(),
        });
    }
    let n = ds.len();
    let pi = ds.n1() as f64 / n as f64;
    let mut out = RowNuisance {
        omega: Vec::with_capacity(n),
        inv_prop: Vec::with_capacity(n),
        m0_tau: Vec::new(),
        tau: Vec::with_capacity(n),
    };
    let mut t = vec![0.0; fm.output_dim()];
    for i in 0..n {
        let x = ds.x(i);
        fm.apply_into(x, &mut t)?;
        let y = ds.y(i);
        out.omega.push(weight_from_t(theta, &t, y));
        out.inv_prop.push(if pi > 0.0 && pi < 1.0 {
            1.0 / propensity_from_t(theta, &t, pi, y)
        } else {
            1.0 / pi
        });
        out.tau.push(tau.eval(x, y));
        if let Some(c) = eta1 {
            let m0 = m0_from_parts(gamma_from_t(theta, &t), c.predict_proba(x)?);
            let (t0, t1) = (tau.eval(x, false), tau.eval(x, true));
            out.m0_tau.push(t0 + m0 * (t1 - t0));
        }
    }
    Ok(out)
}

fn need_observed(ds: &MnarDataset) -> Result<()> {
    if ds.n1() == 0 {
        Err(TiltError::NoObservedRows)
    } else {
        Ok(())
    }
}

fn need_missing(ds: &MnarDataset) -> Result<()> {
    if ds.n0() == 0 {
        Err(TiltError::NoMissingRows)
    } else {
        Ok(())
    }
}

/// `(1/n1) sum R omega tau`.
pub fn estimate_mu0_iw(ds: &MnarDataset, theta: &TiltParams, fm: &FeatureMap, tau: &MeanFunctional) -> Result<EstimateReport> {
    need_observed(ds)?;
    let nu = nuisance(ds, theta, fm, None, tau)?;
    let s: f64 = (0..ds.len()).filter(|&i| ds.r(i)).map(|i| nu.omega[i] * nu.tau[i]).sum();
    Ok(EstimateReport::point(Estimand::Mu0, Method::Iw, s / ds.n1() as f64, ds.len()))
}

/// `(1/n) sum R {1 + (1 - pi)/pi omega} tau`.
pub fn estimate_mu_iw(ds: &MnarDataset, theta: &TiltParams, fm: &FeatureMap, tau: &MeanFunctional) -> Result<EstimateReport> {
    need_observed(ds)?;
    let nu = nuisance(ds, theta, fm, None, tau)?;
    let pi = ds.n1() as f64 / ds.len() as f64;
    let odds = (1.0 - pi) / pi;
    let s: f64 = (0..ds.len())
        .filter(|&i| ds.r(i))
        .map(|i| (1.0 + odds * nu.omega[i]) * nu.tau[i])
        .sum();
    Ok(EstimateReport::point(Estimand::Mu, Method::Iw, s / ds.len() as f64, ds.len()))
}

/// `(1/n) sum R tau / P(R=1 | X, Y)`.
pub fn estimate_mu_ipw(ds: &MnarDataset, theta: &TiltParams, fm: &FeatureMap, tau: &MeanFunctional) -> Result<EstimateReport> {
    need_observed(ds)?;
    let nu = nuisance(ds, theta, fm, None, tau)?;
    let s: f64 = (0..ds.len()).filter(|&i| ds.r(i)).map(|i| nu.tau[i] * nu.inv_prop[i]).sum();
    Ok(EstimateReport::point(Estimand::Mu, Method::Ipw, s / ds.len() as f64, ds.len()))
}

/// Propensity form of the `mu0` weighting estimator:
/// `(1/n0) sum R tau (1/P(R=1|X,Y) - 1)`, algebraically equal to the IW one.
pub fn estimate_mu0_ipw(ds: &MnarDataset, theta: &TiltParams, fm: &FeatureMap, tau: &MeanFunctional) -> Result<EstimateReport> {
    need_observed(ds)?;
    need_missing(ds)?;
    let nu = nuisance(ds, theta, fm, None, tau)?;
    let s: f64 = (0..ds.len())
        .filter(|&i| ds.r(i))
        .map(|i| nu.tau[i] * (nu.inv_prop[i] - 1.0))
        .sum();
    Ok(EstimateReport::point(Estimand::Mu0, Method::Ipw, s / ds.n0() as f64, ds.len()))
}

/// `(1/n1) sum R omega (tau - m0tau) + (1/n0) sum (1 - R) m0tau`.
pub fn estimate_mu0_dr(
    ds: &MnarDataset,
    theta: &TiltParams,
    eta1: &dyn ProbClassifier,
    fm: &FeatureMap,
    tau: &MeanFunctional,
) -> Result<EstimateReport> {
    need_observed(ds)?;
    need_missing(ds)?;
    let nu = nuisance(ds, theta, fm, Some(eta1), tau)?;
    let (mut aug, mut reg) = (0.0, 0.0);
    for i in 0..ds.len() {
        if ds.r(i) {
            aug += nu.omega[i] * (nu.tau[i] - nu.m0_tau[i]);
        } else {
            reg += nu.m0_tau[i];
        }
    }
    let point = aug / ds.n1() as f64 + reg / ds.n0() as f64;
    Ok(EstimateReport::point(Estimand::Mu0, Method::Dr, point, ds.len()))
}

/// `(1/n) sum R {1 + (1 - pi)/pi omega} (tau - m0tau) + (1/n) sum m0tau`.
///
/// The residual weight is the inverse propensity `R / P(R=1|X,Y)`, the same
/// weight the IW estimator of `mu` uses.
pub fn estimate_mu_dr(
    ds: &MnarDataset,
    theta: &TiltParams,
    eta1: &dyn ProbClassifier,
    fm: &FeatureMap,
    tau: &MeanFunctional,
) -> Result<EstimateReport> {
    need_observed(ds)?;
    let nu = nuisance(ds, theta, fm, Some(eta1), tau)?;
    let pi = ds.n1() as f64 / ds.len() as f64;
    let odds = (1.0 - pi) / pi;
    let mut s = 0.0;
    for i in 0..ds.len() {
        if ds.r(i) {
            s += (1.0 + odds * nu.omega[i]) * (nu.tau[i] - nu.m0_tau[i]);
        }
        s += nu.m0_tau[i];
    }
    Ok(EstimateReport::point(Estimand::Mu, Method::Dr, s / ds.len() as f64, ds.len()))
}

/// Outcome-regression estimates: `mean_{r=0} m0tau` for `mu0` and
/// `(1/n) [sum_{r=1} tau + sum_{r=0} m0tau]` for `mu`.
pub fn estimate_or(
    ds: &MnarDataset,
    estimand: Estimand,
    theta: &TiltParams,
    eta1: &dyn ProbClassifier,
    fm: &FeatureMap,
    tau: &MeanFunctional,
) -> Result<EstimateReport> {
    need_missing(ds)?;
    let nu = nuisance(ds, theta, fm, Some(eta1), tau)?;
    let point = match estimand {
        Estimand::Mu0 => {
            (0..ds.len()).filter(|&i| !ds.r(i)).map(|i| nu.m0_tau[i]).sum::<f64>() / ds.n0() as f64
        }
        Estimand::Mu => {
            (0..ds.len())
                .map(|i| if ds.r(i) { nu.tau[i] } else { nu.m0_tau[i] })
                .sum::<f64>()
                / ds.len() as f64
        }
    };
    Ok(EstimateReport::point(estimand, Method::Or, point, ds.len()))
}

/// Dispatches to the estimator for `(estimand, method)`.
pub fn estimate(
    ds: &MnarDataset,
    estimand: Estimand,
    method: Method,
    theta: &TiltParams,
    eta1: Option<&dyn ProbClassifier>,
    fm: &FeatureMap,
    tau: &MeanFunctional,
) -> Result<EstimateReport> {
    let need_eta = || {
        eta1.ok_or_else(|| TiltError::InvalidArgument(format!("method {method} needs an outcome classifier")))
    };
    match (estimand, method) {
        (Estimand::Mu0, Method::Iw) => estimate_mu0_iw(ds, theta, fm, tau),
        (Estimand::Mu0, Method::Ipw) => estimate_mu0_ipw(ds, theta, fm, tau),
        (Estimand::Mu, Method::Iw) => estimate_mu_iw(ds, theta, fm, tau),
        (Estimand::Mu, Method::Ipw) => estimate_mu_ipw(ds, theta, fm, tau),
        (Estimand::Mu0, Method::Dr) => estimate_mu0_dr(ds, theta, need_eta()?, fm, tau),
        (Estimand::Mu, Method::Dr) => estimate_mu_dr(ds, theta, need_eta()?, fm, tau),
        (_, Method::Or) => estimate_or(ds, estimand, theta, need_eta()?, fm, tau),
    }
}

/// Per-row scores whose average is the estimator of `(estimand, method)`.
pub fn scores(
    ds: &MnarDataset,
    estimand: Estimand,
    method: Method,
    theta: &TiltParams,
    eta1: Option<&dyn ProbClassifier>,
    fm: &FeatureMap,
    tau: &MeanFunctional,
) -> Result<Vec<f64>> {
    ds.require_both_arms()?;
    if matches!(method, Method::Dr | Method::Or) && eta1.is_none() {
        return Err(TiltError::InvalidArgument(format!("method {method} needs an outcome classifier")));
    }
    let nu = nuisance(ds, theta, fm, eta1, tau)?;
    let pi = ds.n1() as f64 / ds.len() as f64;
    let odds = (1.0 - pi) / pi;
    let score = |i: usize| -> f64 {
        let r = ds.r(i);
        let rf = if r { 1.0 } else { 0.0 };
        match (estimand, method) {
            (Estimand::Mu0, Method::Iw) => rf / pi * nu.omega[i] * nu.tau[i],
            (Estimand::Mu0, Method::Ipw) => rf / (1.0 - pi) * nu.tau[i] * (nu.inv_prop[i] - 1.0),
            (Estimand::Mu, Method::Iw) => rf * (1.0 + odds * nu.omega[i]) * nu.tau[i],
            (Estimand::Mu, Method::Ipw) => rf * nu.tau[i] * nu.inv_prop[i],
            (Estimand::Mu0, Method::Dr) => {
                rf / pi * nu.omega[i] * (nu.tau[i] - nu.m0_tau[i]) + (1.0 - rf) / (1.0 - pi) * nu.m0_tau[i]
            }
            (Estimand::Mu, Method::Dr) => rf * (1.0 + odds * nu.omega[i]) * (nu.tau[i] - nu.m0_tau[i]) + nu.m0_tau[i],
            (Estimand::Mu0, Method::Or) => (1.0 - rf) / (1.0 - pi) * nu.m0_tau[i],
            (Estimand::Mu, Method::Or) => {
                if r {
                    nu.tau[i]
                } else {
                    nu.m0_tau[i]
                }
            }
        }
    };
    Ok((0..ds.len()).map(score).collect())
}

/// `Psi(x, y, r)` for binary `y`, `r`.
pub type GeneralFunctional = Arc<dyn Fn(&[f64], bool, bool) -> f64 + Send + Sync>;

/// `E[Psi] = E[Psi(X,Y,1)] + P(R=0) E[Psi(X,Y,0) - Psi(X,Y,1) | R=0]`, each
/// piece estimated with `method`.
pub fn estimate_general(
    ds: &MnarDataset,
    theta: &TiltParams,
    eta1: Option<&dyn ProbClassifier>,
    fm: &FeatureMap,
    psi: GeneralFunctional,
    method: Method,
) -> Result<EstimateReport> {
    let pi = ds.pi_r()?.value();
    let (p0, p1) = (psi.clone(), psi.clone());
    let first = MeanFunctional::new("psi(.,0,1)", move |x| p0(x, false, true), move |x| p1(x, true, true));
    let (p0, p1) = (psi.clone(), psi);
    let delta = MeanFunctional::new(
        "psi(.,.,0)-psi(.,.,1)",
        move |x| p0(x, false, false) - p0(x, false, true),
        move |x| p1(x, true, false) - p1(x, true, true),
    );
    let a = estimate(ds, Estimand::Mu, method, theta, eta1, fm, &first)?;
    let b = estimate(ds, Estimand::Mu0, method, theta, eta1, fm, &delta)?;
    Ok(EstimateReport::point(Estimand::Mu, method, a.point + (1.0 - pi) * b.point, ds.len()))
}

/// Mean, standard error `sd / sqrt(n)` and the normal 95% interval.
pub fn summarize_scores(estimand: Estimand, method: Method, scores: &[f64]) -> EstimateReport {
    let n = scores.len();
    let constant = scores.windows(2).all(|w| w[0] == w[1]);
    let mean = if constant && n > 0 { scores[0] } else { scores.iter().sum::<f64>() / n as f64 };
    let var = if n > 1 && !constant {
        scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let se = (var / n as f64).sqrt();
    EstimateReport {
        estimand,
        method,
        point: mean,
        std_error: Some(se),
        ci95: Some((mean - Z_95 * se, mean + Z_95 * se)),
        n_used: n,
    }
}

/// Nuisances fitted on one split and scored on the other.
#[derive(Debug, Clone)]
pub struct SplitEstimate {
    pub report: EstimateReport,
    pub tilt: TiltFitResult,
    pub n_fit: usize,
}

/// Fits `eta1` and theta on the first part of a random split and reports the
/// score average, standard error and 95% interval on the second part.
#[allow(clippy::too_many_arguments)]
pub fn estimate_with_ci(
    ds: &MnarDataset,
    fm: &FeatureMap,
    tau: &MeanFunctional,
    estimand: Estimand,
    method: Method,
    split_fraction: f64,
    seed: u64,
    classifier: &ClassifierConfig,
    tilt: &TiltFitConfig,
) -> Result<SplitEstimate> {
    ds.require_both_arms()?;
    let (fit_part, eval_part) = split_dataset(ds, split_fraction, seed)?;
    let degenerate = |which: &str, e: TiltError| TiltError::InvalidArgument(format!("degenerate split ({which}): {e}"));
    fit_part.require_both_arms().map_err(|e| degenerate("nuisance part", e))?;
    eval_part.require_both_arms().map_err(|e| degenerate("evaluation part", e))?;
    let eta1 = fit_eta1(&fit_part, classifier.feature_map(ds.dim())?, classifier.ridge_lambda)?;
    let fit = exponentiated_gradient(&fit_part, &eta1, fm, tilt)?;
    let s = scores(&eval_part, estimand, method, &fit.theta, Some(&eta1), fm, tau)?;
    Ok(SplitEstimate {
        report: summarize_scores(estimand, method, &s),
        tilt: fit,
        n_fit: fit_part.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightDiagnostics {
    pub max_weight: f64,
    /// `(sum w)^2 / sum w^2` over observed rows.
    pub effective_sample_size: f64,
    pub n1: usize,
}

pub fn weight_diagnostics(ds: &MnarDataset, theta: &TiltParams, fm: &FeatureMap) -> Result<WeightDiagnostics> {
    need_observed(ds)?;
    let nu = nuisance(ds, theta, fm, None, &MeanFunctional::constant(1.0))?;
    let w: Vec<f64> = (0..ds.len()).filter(|&i| ds.r(i)).map(|i| nu.omega[i]).collect();
    let s: f64 = w.iter().sum();
    let s2: f64 = w.iter().map(|v| v * v).sum();
    Ok(WeightDiagnostics {
        max_weight: w.iter().cloned().fold(f64::MIN, f64::max),
        effective_sample_size: s * s / s2,
        n1: w.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm2() -> FeatureMap {
        FeatureMap::identity(2).unwrap()
    }

    fn small() -> MnarDataset {
        MnarDataset::new(
            vec![0.1, 0.2, -1.0, 0.5, 0.7, -0.3, 1.1, 0.9, -0.4, -0.8, 0.0, 1.5],
            2,
            vec![true, false, true, false, false, false],
            vec![true, true, true, false, false, true],
        )
        .unwrap()
    }

    #[test]
    fn weight_values() {
        let fm = fm2();
        let zero = TiltParams::zeros(2);
        assert_eq!(importance_weight(&zero, &fm, &[3.0, -2.0], true).unwrap(), 1.0);
        let th = TiltParams::new(-(1.5f64).ln(), 1.5f64.ln(), vec![-2.0, 0.0], vec![2.0, 0.0]).unwrap();
        assert!((importance_weight(&th, &fm, &[0.0, 0.0], true).unwrap() - 1.5).abs() < 1e-15);
        let w = importance_weight(&th, &fm, &[1.0, 0.0], false).unwrap();
        assert!((w - (-(1.5f64).ln() - 2.0).exp()).abs() < 1e-15);
        assert!((w - 0.0902).abs() < 1e-4);
    }

    #[test]
    fn propensity_values() {
        let fm = fm2();
        let pi = PiR::new(0.5).unwrap();
        assert_eq!(propensity_r(&TiltParams::zeros(2), &fm, pi, &[1.0, 1.0], true).unwrap(), 0.5);
        let th = TiltParams::new(0.0, 3f64.ln(), vec![0.0; 2], vec![0.0; 2]).unwrap();
        assert!((propensity_r(&th, &fm, pi, &[1.0, 1.0], true).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn gamma_and_m0_values() {
        let fm = fm2();
        assert_eq!(gamma_log_odds(&TiltParams::zeros(2), &fm, &[1.0, 2.0]).unwrap(), 0.0);
        let th = TiltParams::new(0.3, 0.3 + 4f64.ln(), vec![1.0, -1.0], vec![1.0, -1.0]).unwrap();
        assert!((gamma_log_odds(&th, &fm, &[5.0, 2.0]).unwrap() - 4f64.ln()).abs() < 1e-14);
        let half = |_: &[f64]| 0.5;
        assert!((outcome_regression_m0(&th, &half, &fm, &[5.0, 2.0]).unwrap() - 0.8).abs() < 1e-14);
        let eta = |x: &[f64]| sigmoid(x[0] - x[1]);
        let x = [0.3, -0.9];
        let m = outcome_regression_m0(&TiltParams::zeros(2), &eta, &fm, &x).unwrap();
        assert!((m - eta(&x)).abs() < 1e-15);
    }

    #[test]
    fn iw_with_zero_theta_is_observed_frequency() {
        let ds = small();
        let y = MeanFunctional::outcome();
        let th = TiltParams::zeros(2);
        let r = estimate_mu0_iw(&ds, &th, &fm2(), &y).unwrap();
        assert!((r.point - 0.5).abs() < 1e-15);
        let r = estimate_mu_iw(&ds, &th, &fm2(), &y).unwrap();
        assert!((r.point - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ipw_constant_one() {
        let ds = small();
        let r = estimate_mu_ipw(&ds, &TiltParams::zeros(2), &fm2(), &MeanFunctional::constant(1.0)).unwrap();
        assert!((r.point - 1.0).abs() < 1e-15);
    }

    #[test]
    fn all_observed_mu_iw_is_sample_mean() {
        let ds = MnarDataset::new(vec![0.0, 1.0, 2.0, 3.0], 2, vec![true, false], vec![true, true]).unwrap();
        let th = TiltParams::new(1.0, -2.0, vec![0.5, 0.5], vec![-0.1, 0.3]).unwrap();
        let r = estimate_mu_iw(&ds, &th, &fm2(), &MeanFunctional::outcome()).unwrap();
        assert_eq!(r.point, 0.5);
    }

    #[test]
    fn empty_arms() {
        let ds = MnarDataset::new(vec![0.0, 1.0], 2, vec![false], vec![false]).unwrap();
        let y = MeanFunctional::outcome();
        assert!(matches!(
            estimate_mu0_iw(&ds, &TiltParams::zeros(2), &fm2(), &y),
            Err(TiltError::NoObservedRows)
        ));
        let ds = MnarDataset::new(vec![0.0, 1.0], 2, vec![false], vec![true]).unwrap();
        let half = |_: &[f64]| 0.5;
        assert!(matches!(
            estimate_mu0_dr(&ds, &TiltParams::zeros(2), &half, &fm2(), &y),
            Err(TiltError::NoMissingRows)
        ));
    }

    #[test]
    fn constant_scores_have_zero_se() {
        let r = summarize_scores(Estimand::Mu, Method::Iw, &[0.3; 10]);
        assert_eq!(r.std_error, Some(0.0));
        assert_eq!(r.ci95, Some((r.point, r.point)));
    }

    #[test]
    fn parse_tags() {
        assert_eq!("MU0".parse::<Estimand>().unwrap(), Estimand::Mu0);
        assert_eq!("dr".parse::<Method>().unwrap(), Method::Dr);
        assert!("x".parse::<Method>().is_err());
    }
}
