//! Empirical-likelihood estimate of the tilt parameters: maximize the
//! profile log-likelihood over theta after the point masses `p_i` and
//! `P(R=1)` have been profiled out.

use serde::{Deserialize, Serialize};

use crate::classifier::ProbClassifier;
use crate::dataset::MnarDataset;
use crate::error::{Result, TiltError};
use crate::features::FeatureMap;
use crate::params::TiltParams;
use crate::tilt::expgrad::TiltFitResult;
use crate::tilt::objective::TiltProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElConfig {
    /// Stop when the gradient of the per-row profile likelihood has
    /// infinity norm below this.
    pub tol: f64,
    pub max_iter: usize,
    pub theta_init: Option<TiltParams>,
}

impl Default for ElConfig {
    fn default() -> Self {
        ElConfig {
            tol: 1e-6,
            max_iter: 10_000,
            theta_init: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ElFit {
    /// `final_objective` holds the profile log-likelihood, `final_constraint`
    /// the value of `g_n` at the estimate.
    pub result: TiltFitResult,
    /// `p_i = 1 / (n1 + n0 kappa_i)`.
    pub point_masses: Vec<f64>,
}

pub fn fit_empirical_likelihood_problem(problem: &TiltProblem, cfg: &ElConfig) -> Result<ElFit> {
    if problem.n0() == 0 {
        return Err(TiltError::NoMissingRows);
    }
    if problem.n1() == 0 {
        return Err(TiltError::NoObservedRows);
    }
    let p = problem.feature_dim();
    let mut theta = cfg.theta_init.clone().unwrap_or_else(|| TiltParams::zeros(p)).to_vec();
    let scale = 1.0 / problem.len() as f64;
    let eval = |v: &[f64]| -> Result<(f64, Vec<f64>)> {
        let th = TiltParams::from_slice(v)?;
        let (l, mut g) = problem.profile_likelihood_grad(&th)?;
        g.iter_mut().for_each(|x| *x *= scale);
        Ok((l * scale, g))
    };
    let (mut value, mut grad) = eval(&theta)?;
    if !value.is_finite() {
        return Err(TiltError::NonFinite { iteration: 0 });
    }
    let mut step: f64 = 1.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax <= cfg.tol {
            converged = true;
            break;
        }
        let gsq: f64 = grad.iter().map(|g| g * g).sum();
        step = (step * 2.0).min(1e4);
        let mut accepted = None;
        while step > 1e-20 {
            let trial: Vec<f64> = theta.iter().zip(&grad).map(|(t, g)| t + step * g).collect();
            let (v, g) = eval(&trial)?;
            if v.is_finite() && v >= value + 1e-4 * step * gsq {
                accepted = Some((trial, v, g));
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((t, v, g)) => {
                theta = t;
                value = v;
                grad = g;
            }
            None => break,
        }
    }
    let theta = TiltParams::from_slice(&theta)?;
    let (g_n, capped) = problem.constraint(&theta)?;
    Ok(ElFit {
        point_masses: problem.el_weights(&theta)?,
        result: TiltFitResult {
            theta,
            converged,
            iterations,
            final_objective: value / scale,
            final_constraint: g_n,
            capped,
            trace: Vec::new(),
        },
    })
}

pub fn fit_empirical_likelihood(
    ds: &MnarDataset,
    eta1: &dyn ProbClassifier,
    fm: &FeatureMap,
    cfg: &ElConfig,
) -> Result<ElFit> {
    ds.require_both_arms()?;
    let problem = TiltProblem::from_classifier(ds, eta1, fm)?;
    fit_empirical_likelihood_problem(&problem, cfg)
}
