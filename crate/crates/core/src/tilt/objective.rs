//! Empirical KL-matching objective `f_n`, its normalization constraint
//! `g_n`, and the profile empirical likelihood, with analytic gradients.
//!
//! For row `i` with features `t_i` and classifier output `eta_i`:
//!
//! ```text
//! kappa_i = exp(alpha1 + beta1.t_i) eta_i + exp(alpha0 + beta0.t_i) (1 - eta_i)
//! f_n = -(1/n0) sum_{r=0} log kappa_i
//! g_n =  (1/n1) sum_{r=1} kappa_i - 1
//! l_prof = sum_i [ -log(n1 + n0 kappa_i) + (1 - r_i) log kappa_i ]
//! ```
//!
//! `log kappa` is always evaluated as a log-sum-exp. The plain-scale sums
//! in `g_n` cap each exponent at [`EXP_CAP`] and report when that happened.

use crate::classifier::ProbClassifier;
use crate::dataset::MnarDataset;
use crate::error::{Result, TiltError};
use crate::features::FeatureMap;
use crate::params::{dot, TiltParams};

pub const EXP_CAP: f64 = 700.0;
const LINEAR_DOMAIN: f64 = 600.0;

/// Precomputed per-row quantities shared by all tilt objectives.
#[derive(Debug, Clone)]
pub struct TiltProblem {
    features: Vec<f64>,
    p: usize,
    log_eta: Vec<f64>,
    log_1m_eta: Vec<f64>,
    eta: Vec<f64>,
    observed: Vec<bool>,
    n0: usize,
    n1: usize,
}

/// Everything one iteration of the solver needs at a point.
#[derive(Debug, Clone)]
pub struct TiltEval {
    pub f: f64,
    pub g: f64,
    pub grad_f: Vec<f64>,
    pub grad_g: Vec<f64>,
    pub capped: bool,
}

impl TiltProblem {
    /// `eta1_probs[i]` must be the classifier output at row `i`, in `(0, 1)`.
    pub fn new(ds: &MnarDataset, eta1_probs: &[f64], fm: &FeatureMap) -> Result<Self> {
        if fm.input_dim() != ds.dim() {
            return Err(TiltError::DimensionMismatch {
                expected: ds.dim(),
                got: fm.input_dim(),
            });
        }
        if eta1_probs.len() != ds.len() {
            return Err(TiltError::DimensionMismatch {
                expected: ds.len(),
                got: eta1_probs.len(),
            });
        }
        if let Some(e) = eta1_probs.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(TiltError::InvalidArgument(format!("classifier probability {e} outside (0,1)")));
        }
        Ok(TiltProblem {
            features: fm.apply_rows(ds.covariates())?,
            p: fm.output_dim(),
            log_eta: eta1_probs.iter().map(|e| e.ln()).collect(),
            log_1m_eta: eta1_probs.iter().map(|e| (-e).ln_1p()).collect(),
            eta: eta1_probs.to_vec(),
            observed: ds.observed().to_vec(),
            n0: ds.n0(),
            n1: ds.n1(),
        })
    }

    pub fn from_classifier(ds: &MnarDataset, eta1: &dyn ProbClassifier, fm: &FeatureMap) -> Result<Self> {
        let probs = eta1.predict_dataset(ds)?;
        Self::new(ds, &probs, fm)
    }

    pub fn len(&self) -> usize {
        self.observed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observed.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.p
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn t(&self, i: usize) -> &[f64] {
        &self.features[i * self.p..(i + 1) * self.p]
    }

    fn check_theta(&self, theta: &TiltParams) -> Result<()> {
        if theta.dim() != self.p || theta.beta1.len() != self.p {
            return Err(TiltError::DimensionMismatch {
                expected: self.p,
                got: theta.dim(),
            });
        }
        Ok(())
    }

    fn require_n0(&self) -> Result<()> {
        if self.n0 == 0 {
            Err(TiltError::NoMissingRows)
        } else {
            Ok(())
        }
    }

    fn require_n1(&self) -> Result<()> {
        if self.n1 == 0 {
            Err(TiltError::NoObservedRows)
        } else {
            Ok(())
        }
    }

    // (a_i + log eta_i, b_i + log(1 - eta_i), log kappa_i)
    fn log_terms(&self, theta: &TiltParams, i: usize) -> (f64, f64, f64) {
        let t = self.t(i);
        let a = theta.alpha1 + dot(&theta.beta1, t);
        let b = theta.alpha0 + dot(&theta.beta0, t);
        let (la, lb) = (a + self.log_eta[i], b + self.log_1m_eta[i]);
        if a.abs().max(b.abs()) <= LINEAR_DOMAIN {
            // Direct sum keeps kappa = 1 exact at theta = 0.
            let kappa = a.exp() * self.eta[i] + b.exp() * (1.0 - self.eta[i]);
            (la, lb, kappa.ln())
        } else {
            (la, lb, log_add_exp(la, lb))
        }
    }

    /// `log kappa_i` for every row.
    pub fn log_kappa(&self, theta: &TiltParams) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        Ok((0..self.len()).map(|i| self.log_terms(theta, i).2).collect())
    }

    pub fn objective(&self, theta: &TiltParams) -> Result<f64> {
        self.check_theta(theta)?;
        self.require_n0()?;
        let s: f64 = (0..self.len())
            .filter(|&i| !self.observed[i])
            .map(|i| self.log_terms(theta, i).2)
            .sum();
        Ok(-s / self.n0 as f64)
    }

    /// Returns `(g_n, capped)`.
    pub fn constraint(&self, theta: &TiltParams) -> Result<(f64, bool)> {
        self.check_theta(theta)?;
        self.require_n1()?;
        let mut capped = false;
        let mut s = 0.0;
        for i in (0..self.len()).filter(|&i| self.observed[i]) {
            let t = self.t(i);
            let (ea, ca) = capped_exp(theta.alpha1 + dot(&theta.beta1, t));
            let (eb, cb) = capped_exp(theta.alpha0 + dot(&theta.beta0, t));
            capped |= ca | cb;
            s += ea * self.eta[i] + eb * (1.0 - self.eta[i]);
        }
        Ok((s / self.n1 as f64 - 1.0, capped))
    }

    /// `f_n`, `g_n` and both gradients in one pass. Gradients are laid out
    /// as [`TiltParams::to_vec`].
    pub fn evaluate(&self, theta: &TiltParams) -> Result<TiltEval> {
        self.check_theta(theta)?;
        self.require_n0()?;
        self.require_n1()?;
        let p = self.p;
        let mut grad_f = vec![0.0; 2 + 2 * p];
        let mut grad_g = vec![0.0; 2 + 2 * p];
        let mut f = 0.0;
        let mut g = 0.0;
        let mut capped = false;
        let inv_n0 = 1.0 / self.n0 as f64;
        let inv_n1 = 1.0 / self.n1 as f64;
        for i in 0..self.len() {
            let t = self.t(i);
            let (w1, w0) = if self.observed[i] {
                let (ea, ca) = capped_exp(theta.alpha1 + dot(&theta.beta1, t));
                let (eb, cb) = capped_exp(theta.alpha0 + dot(&theta.beta0, t));
                capped |= ca | cb;
                let w1 = ea * self.eta[i];
                let w0 = eb * (1.0 - self.eta[i]);
                g += w1 + w0;
                (w1 * inv_n1, w0 * inv_n1)
            } else {
                let (la, lb, lk) = self.log_terms(theta, i);
                f -= lk;
                (-(la - lk).exp() * inv_n0, -(lb - lk).exp() * inv_n0)
            };
            let grad = if self.observed[i] { &mut grad_g } else { &mut grad_f };
            accumulate(grad, p, w0, w1, t);
        }
        Ok(TiltEval {
            f: f * inv_n0,
            g: g * inv_n1 - 1.0,
            grad_f,
            grad_g,
            capped,
        })
    }

    /// Profile empirical log-likelihood.
    pub fn profile_likelihood(&self, theta: &TiltParams) -> Result<f64> {
        self.check_theta(theta)?;
        self.require_n0()?;
        self.require_n1()?;
        let (ln1, ln0) = ((self.n1 as f64).ln(), (self.n0 as f64).ln());
        let mut total = 0.0;
        for i in 0..self.len() {
            let lk = self.log_terms(theta, i).2;
            total -= log_add_exp(ln1, ln0 + lk);
            if !self.observed[i] {
                total += lk;
            }
        }
        Ok(total)
    }

    /// Profile likelihood and its gradient.
    pub fn profile_likelihood_grad(&self, theta: &TiltParams) -> Result<(f64, Vec<f64>)> {
        self.check_theta(theta)?;
        self.require_n0()?;
        self.require_n1()?;
        let p = self.p;
        let (ln1, ln0) = ((self.n1 as f64).ln(), (self.n0 as f64).ln());
        let mut grad = vec![0.0; 2 + 2 * p];
        let mut total = 0.0;
        for i in 0..self.len() {
            let (la, lb, lk) = self.log_terms(theta, i);
            let denom = log_add_exp(ln1, ln0 + lk);
            total -= denom;
            // d/dtheta log kappa is (q1 (1,t) on the y=1 block, q0 (1,t) on y=0).
            // Coefficient on d log kappa: (1 - r) - n0 kappa / (n1 + n0 kappa).
            let mut coef = -(ln0 + lk - denom).exp();
            if !self.observed[i] {
                total += lk;
                coef += 1.0;
            }
            let q1 = (la - lk).exp();
            let q0 = (lb - lk).exp();
            accumulate(&mut grad, p, coef * q0, coef * q1, self.t(i));
        }
        Ok((total, grad))
    }

    /// Implied point masses `p_i = 1 / (n1 + n0 kappa_i)`.
    pub fn el_weights(&self, theta: &TiltParams) -> Result<Vec<f64>> {
        let (ln1, ln0) = ((self.n1 as f64).ln(), (self.n0 as f64).ln());
        Ok(self
            .log_kappa(theta)?
            .into_iter()
            .map(|lk| (-log_add_exp(ln1, ln0 + lk)).exp())
            .collect())
    }
}

fn accumulate(grad: &mut [f64], p: usize, w0: f64, w1: f64, t: &[f64]) {
    grad[0] += w0;
    grad[1] += w1;
    for j in 0..p {
        grad[2 + j] += w0 * t[j];
        grad[2 + p + j] += w1 * t[j];
    }
}

pub(crate) fn capped_exp(z: f64) -> (f64, bool) {
    if z > EXP_CAP {
        (EXP_CAP.exp(), true)
    } else {
        (z.exp(), false)
    }
}

pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `f_n(theta)`.
pub fn objective_fn(theta: &TiltParams, ds: &MnarDataset, eta1_probs: &[f64], fm: &FeatureMap) -> Result<f64> {
    TiltProblem::new(ds, eta1_probs, fm)?.objective(theta)
}

/// `g_n(theta)`.
pub fn constraint_gn(theta: &TiltParams, ds: &MnarDataset, eta1_probs: &[f64], fm: &FeatureMap) -> Result<f64> {
    Ok(TiltProblem::new(ds, eta1_probs, fm)?.constraint(theta)?.0)
}

/// `(grad f_n, grad g_n)`.
pub fn gradients(
    theta: &TiltParams,
    ds: &MnarDataset,
    eta1_probs: &[f64],
    fm: &FeatureMap,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let e = TiltProblem::new(ds, eta1_probs, fm)?.evaluate(theta)?;
    Ok((e.grad_f, e.grad_g))
}

pub fn profile_likelihood(theta: &TiltParams, ds: &MnarDataset, eta1_probs: &[f64], fm: &FeatureMap) -> Result<f64> {
    TiltProblem::new(ds, eta1_probs, fm)?.profile_likelihood(theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (MnarDataset, Vec<f64>, FeatureMap) {
        let x = vec![0.3, -1.0, 1.2, 0.4, -0.7, 2.0, 0.1, -0.2, 1.5, -1.1];
        let y = vec![true, false, true, false, false, false, false, false, false, false];
        let r = vec![true, true, true, true, false, false, false, false, false, true];
        let ds = MnarDataset::new(x, 2, y[..5].to_vec(), r[..5].to_vec()).unwrap();
        let eta = vec![0.2, 0.7, 0.45, 0.9, 0.33];
        (ds, eta, FeatureMap::identity(2).unwrap())
    }

    #[test]
    fn zero_theta_is_feasible() {
        let (ds, eta, fm) = toy();
        let th = TiltParams::zeros(2);
        assert_eq!(objective_fn(&th, &ds, &eta, &fm).unwrap(), 0.0);
        assert_eq!(constraint_gn(&th, &ds, &eta, &fm).unwrap(), 0.0);
    }

    #[test]
    fn common_shift_in_alpha() {
        let (ds, eta, fm) = toy();
        let c = 0.8;
        let th = TiltParams::new(c, c, vec![0.0; 2], vec![0.0; 2]).unwrap();
        assert!((objective_fn(&th, &ds, &eta, &fm).unwrap() + c).abs() < 1e-15);
        let th = TiltParams::new(2f64.ln(), 2f64.ln(), vec![0.0; 2], vec![0.0; 2]).unwrap();
        assert!((constraint_gn(&th, &ds, &eta, &fm).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gradients_at_zero() {
        let (ds, eta, fm) = toy();
        let th = TiltParams::zeros(2);
        let (gf, gg) = gradients(&th, &ds, &eta, &fm).unwrap();
        let obs: Vec<usize> = (0..ds.len()).filter(|&i| ds.r(i)).collect();
        let mis: Vec<usize> = (0..ds.len()).filter(|&i| !ds.r(i)).collect();
        let mean = |idx: &[usize], f: &dyn Fn(usize) -> f64| idx.iter().map(|&i| f(i)).sum::<f64>() / idx.len() as f64;
        assert!((gg[1] - mean(&obs, &|i| eta[i])).abs() < 1e-15);
        assert!((gf[0] + mean(&mis, &|i| 1.0 - eta[i])).abs() < 1e-15);
    }

    #[test]
    fn profile_likelihood_closed_forms() {
        let (ds, eta, fm) = toy();
        let n = ds.len() as f64;
        let l = profile_likelihood(&TiltParams::zeros(2), &ds, &eta, &fm).unwrap();
        assert!((l + n * n.ln()).abs() < 1e-12);
        let th = TiltParams::new(2f64.ln(), 2f64.ln(), vec![0.0; 2], vec![0.0; 2]).unwrap();
        let (n1, n0) = (ds.n1() as f64, ds.n0() as f64);
        let expect = -n * (n1 + 2.0 * n0).ln() + n0 * 2f64.ln();
        assert!((profile_likelihood(&th, &ds, &eta, &fm).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn empty_arms_are_errors() {
        let ds = MnarDataset::new(vec![0.0, 1.0], 1, vec![true, false], vec![true, true]).unwrap();
        let fm = FeatureMap::identity(1).unwrap();
        let th = TiltParams::zeros(1);
        assert!(matches!(objective_fn(&th, &ds, &[0.5, 0.5], &fm), Err(TiltError::NoMissingRows)));
        let ds = MnarDataset::new(vec![0.0, 1.0], 1, vec![false, false], vec![false, false]).unwrap();
        assert!(matches!(constraint_gn(&th, &ds, &[0.5, 0.5], &fm), Err(TiltError::NoObservedRows)));
    }

    #[test]
    fn huge_exponent_is_capped() {
        let (ds, eta, fm) = toy();
        let th = TiltParams::new(800.0, 0.0, vec![0.0; 2], vec![0.0; 2]).unwrap();
        let prob = TiltProblem::new(&ds, &eta, &fm).unwrap();
        let (g, capped) = prob.constraint(&th).unwrap();
        assert!(capped && g.is_finite());
        assert!(prob.objective(&th).unwrap().is_finite());
    }

    #[test]
    fn rejects_probabilities_outside_unit_interval() {
        let (ds, _, fm) = toy();
        assert!(TiltProblem::new(&ds, &[0.5, 0.5, 1.0, 0.5, 0.5], &fm).is_err());
    }
}
