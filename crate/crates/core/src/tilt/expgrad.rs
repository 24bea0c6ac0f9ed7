//! Primal-dual exponentiated-gradient solver for
//! `min f_n(theta)  s.t.  |g_n(theta)| <= eps`.
//!
//! The two Lagrange multipliers are a scaled softmax of dual variables
//! `(u1, u2)`, so `lambda1 - lambda2` stays inside `[-B, B]`. Each iteration
//! takes one gradient step on `f_n + (lambda1 - lambda2) g_n` (with optional
//! ridge shrinkage `(1 - lr * reg)`), raises `u1` when `g_n > eps` and `u2`
//! when `g_n < -eps`.

use serde::{Deserialize, Serialize};

use crate::classifier::ProbClassifier;
use crate::dataset::MnarDataset;
use crate::error::{Result, TiltError};
use crate::features::FeatureMap;
use crate::params::{norm2, TiltParams};
use crate::tilt::objective::TiltProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltFitConfig {
    /// Constraint relaxation.
    pub eps: f64,
    /// Convergence threshold.
    pub tol: f64,
    /// Bound on `|lambda1 - lambda2|`.
    pub bound: f64,
    /// Primal step size.
    pub lr: f64,
    /// Dual step size; `None` uses `lr`.
    pub dual_lr: Option<f64>,
    pub max_iter: usize,
    /// Ridge strength on theta.
    pub reg: f64,
    /// Starting point; `None` is all zeros.
    pub theta_init: Option<TiltParams>,
    pub record_trace: bool,
}

impl Default for TiltFitConfig {
    fn default() -> Self {
        TiltFitConfig {
            eps: 1e-3,
            tol: 2e-3,
            bound: 5.0,
            lr: 4e-3,
            dual_lr: None,
            max_iter: 4000,
            reg: 1e-5,
            theta_init: None,
            record_trace: false,
        }
    }
}

impl TiltFitConfig {
    /// Larger step and a much tighter stopping threshold. The default
    /// threshold compares the step length with `|theta|` and tends to stop
    /// long before the multipliers have settled; this preset runs the same
    /// iteration to a stationary point.
    pub fn precise() -> Self {
        TiltFitConfig {
            lr: 0.02,
            tol: 1e-6,
            max_iter: 200_000,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(TiltError::InvalidArgument(format!("tilt config: {what}")));
        if !(self.eps >= 0.0) {
            return bad("eps must be >= 0");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be > 0");
        }
        if !(self.bound > 0.0) {
            return bad("B must be > 0");
        }
        if !(self.lr > 0.0) {
            return bad("lr must be > 0");
        }
        if let Some(d) = self.dual_lr {
            if !(d > 0.0) {
                return bad("dual_lr must be > 0");
            }
        }
        if !(self.reg >= 0.0) {
            return bad("reg must be >= 0");
        }
        Ok(())
    }

    pub fn dual_step(&self) -> f64 {
        self.dual_lr.unwrap_or(self.lr)
    }
}

/// Dual variables behind the multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DualState {
    pub u1: f64,
    pub u2: f64,
}

impl DualState {
    /// `(lambda1, lambda2)` with `lambda_j = B exp(u_j) / (exp(u1) + exp(u2))`.
    pub fn multipliers(&self, bound: f64) -> (f64, f64) {
        let m = self.u1.max(self.u2);
        let e1 = (self.u1 - m).exp();
        let e2 = (self.u2 - m).exp();
        let s = e1 + e2;
        (bound * e1 / s, bound * e2 / s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub f_n: f64,
    pub g_n: f64,
    pub lambda_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltFitResult {
    pub theta: TiltParams,
    pub converged: bool,
    pub iterations: usize,
    pub final_objective: f64,
    pub final_constraint: f64,
    /// Some exponent hit the overflow cap during the run.
    #[serde(default)]
    pub capped: bool,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

impl TiltFitResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Trace as CSV `iter,f_n,g_n,lambda_diff`.
    pub fn trace_csv(&self) -> String {
        use crate::fmt::g17;
        let mut out = String::from("iter,f_n,g_n,lambda_diff\n");
        for row in &self.trace {
            out.push_str(&format!("{},{},{},{}\n", row.iter, g17(row.f_n), g17(row.g_n), g17(row.lambda_diff)));
        }
        out
    }
}

/// Runs the solver on a prepared problem.
///
/// On convergence the returned `theta` is the iterate at which the stopping
/// rule was evaluated, so `final_constraint` satisfies
/// `|g_n| <= eps + tol`.
pub fn exponentiated_gradient_problem(problem: &TiltProblem, cfg: &TiltFitConfig) -> Result<TiltFitResult> {
    cfg.validate()?;
    if problem.n0() == 0 {
        return Err(TiltError::NoMissingRows);
    }
    if problem.n1() == 0 {
        return Err(TiltError::NoObservedRows);
    }
    let p = problem.feature_dim();
    let init = cfg.theta_init.clone().unwrap_or_else(|| TiltParams::zeros(p));
    if init.dim() != p {
        return Err(TiltError::DimensionMismatch { expected: p, got: init.dim() });
    }
    let mut theta = init.to_vec();
    let mut next = vec![0.0; theta.len()];
    let mut dual = DualState::default();
    let rho1 = cfg.lr;
    let rho2 = cfg.dual_step();
    let mut trace = Vec::new();
    let mut capped_any = false;

    let mut last = None;
    for iter in 0..cfg.max_iter {
        let current = TiltParams::from_slice(&theta)?;
        let ev = problem.evaluate(&current)?;
        capped_any |= ev.capped;
        let grads_finite = ev.grad_f.iter().chain(&ev.grad_g).all(|v| v.is_finite());
        if !(ev.f.is_finite() && ev.g.is_finite() && grads_finite) {
            return Err(TiltError::NonFinite { iteration: iter });
        }
        let (l1, l2) = dual.multipliers(cfg.bound);
        let ldiff = l1 - l2;
        if cfg.record_trace {
            trace.push(TraceRow {
                iter,
                f_n: ev.f,
                g_n: ev.g,
                lambda_diff: ldiff,
            });
        }

        let shrink = 1.0 - rho1 * cfg.reg;
        for k in 0..theta.len() {
            next[k] = shrink * theta[k] - rho1 * (ev.grad_f[k] + ldiff * ev.grad_g[k]);
        }

        // g_n > -1 always (strictly positive summands).
        assert!(ev.g > -1.0, "constraint value {} <= -1", ev.g);
        let log_g1 = ev.g.ln_1p();
        if ev.g > cfg.eps {
            dual.u1 += rho2 * log_g1;
        }
        if ev.g < -cfg.eps {
            dual.u2 -= rho2 * log_g1;
        }

        let step: Vec<f64> = next.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let theta_norm = norm2(&theta);
        let ratio = if theta_norm > 0.0 {
            norm2(&step) / theta_norm
        } else {
            norm2(&step)
        };
        let criterion = ratio + (ev.g.abs() - cfg.eps).max(0.0);
        if criterion <= cfg.tol {
            return Ok(TiltFitResult {
                theta: current,
                converged: true,
                iterations: iter + 1,
                final_objective: ev.f,
                final_constraint: ev.g,
                capped: capped_any,
                trace,
            });
        }
        std::mem::swap(&mut theta, &mut next);
        last = Some(iter + 1);
    }

    let theta = TiltParams::from_slice(&theta)?;
    let ev = problem.evaluate(&theta)?;
    if !(ev.f.is_finite() && ev.g.is_finite()) || !theta.to_vec().iter().all(|v| v.is_finite()) {
        return Err(TiltError::NonFinite {
            iteration: last.unwrap_or(0),
        });
    }
    Ok(TiltFitResult {
        theta,
        converged: false,
        iterations: last.unwrap_or(0),
        final_objective: ev.f,
        final_constraint: ev.g,
        capped: capped_any || ev.capped,
        trace,
    })
}

/// Fits tilt parameters with the exponentiated-gradient solver, evaluating
/// `eta1` once on every row.
pub fn exponentiated_gradient(
    ds: &MnarDataset,
    eta1: &dyn ProbClassifier,
    fm: &FeatureMap,
    cfg: &TiltFitConfig,
) -> Result<TiltFitResult> {
    ds.require_both_arms()?;
    let problem = TiltProblem::from_classifier(ds, eta1, fm)?;
    exponentiated_gradient_problem(&problem, cfg)
}
