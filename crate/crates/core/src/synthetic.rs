//! Two-dimensional Gaussian-mixture designs with outcomes missing not at
//! random, their closed-form densities, and the Monte Carlo harness.
//!
//! `R ~ Bernoulli(1/2)`, `Y | R=r ~ Bernoulli(pi_{1|r})`,
//! `X | Y=y, R=r ~ N(mu_{r,y}, sigma_{r,y}^2 I)` with
//! `mu_{r,y} = ((2y-1)(1-2r), 2(2y-1))`.
//!
//! In the well-specified design `sigma_{r,y}` depends on `y` only
//! (`sigma_{.,0} = 1`, `sigma_{.,1} = sigma1`), so the log density ratio is
//! linear in `x`. The misspecified design sets `sigma_{1,1} = sigma1`,
//! `sigma_{1,0} = 1`, `sigma_{0,1} = 1`, `sigma_{0,0} = sigma1`.
//!
//! Sampling: each replication owns the ChaCha8 stream
//! `rep_stream(rep, 0)` (estimation sample) or `rep_stream(rep, 1)`
//! (classifier sample) under the master seed. Every row consumes, in order,
//! a uniform for `R`, a uniform for `Y` and two standard normals (ziggurat)
//! for `X = mu + sigma z`. With `sigma1 = 1` both designs therefore produce
//! bit-identical data.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{fit_logistic, sigmoid, ClassifierConfig, LogisticModel, TrainingSpec};
use crate::dataset::MnarDataset;
use crate::error::{Result, TiltError};
use crate::estimators::{estimate, Estimand, Method, MeanFunctional};
use crate::features::FeatureMap;
use crate::fmt::{g17, r4};
use crate::params::TiltParams;
use crate::rng::{rep_stream, stream_rng, SimRng};
use crate::stats;
use crate::tilt::{exponentiated_gradient, fit_empirical_likelihood, ElConfig, TiltFitConfig};

pub const DIM: usize = 2;
pub const TRUE_MU: f64 = 0.5;
pub const TRUE_MU0: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    WellSpecified,
    Misspecified,
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DesignKind::WellSpecified => "well",
            DesignKind::Misspecified => "miss",
        })
    }
}

impl FromStr for DesignKind {
    type Err = TiltError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "well" | "well_specified" | "well-specified" => Ok(DesignKind::WellSpecified),
            "miss" | "misspecified" => Ok(DesignKind::Misspecified),
            _ => Err(TiltError::InvalidArgument(format!("unknown design kind {s:?} (use well or miss)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimDesign {
    pub kind: DesignKind,
    pub sigma1: f64,
    pub n: usize,
    pub pi_1_given_1: f64,
    pub pi_1_given_0: f64,
    pub seed: u64,
}

impl SimDesign {
    pub fn new(kind: DesignKind, sigma1: f64, n: usize, seed: u64) -> Result<Self> {
        let d = SimDesign {
            kind,
            sigma1,
            n,
            pi_1_given_1: 0.4,
            pi_1_given_0: 0.6,
            seed,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn well_specified(sigma1: f64, n: usize, seed: u64) -> Result<Self> {
        Self::new(DesignKind::WellSpecified, sigma1, n, seed)
    }

    pub fn misspecified(sigma1: f64, n: usize, seed: u64) -> Result<Self> {
        Self::new(DesignKind::Misspecified, sigma1, n, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma1 > 0.0 && self.sigma1.is_finite()) {
            return Err(TiltError::InvalidArgument(format!("sigma1 must be positive, got {}", self.sigma1)));
        }
        for p in [self.pi_1_given_1, self.pi_1_given_0] {
            if !(p > 0.0 && p < 1.0) {
                return Err(TiltError::InvalidArgument(format!("class probability {p} outside (0,1)")));
            }
        }
        Ok(())
    }

    /// Standard deviation of `X | Y=y, R=r`.
    pub fn sigma(&self, r: u8, y: bool) -> f64 {
        match (self.kind, r, y) {
            (DesignKind::WellSpecified, _, true) => self.sigma1,
            (DesignKind::WellSpecified, _, false) => 1.0,
            (DesignKind::Misspecified, 1, true) | (DesignKind::Misspecified, 0, false) => self.sigma1,
            (DesignKind::Misspecified, _, _) => 1.0,
        }
    }

    /// `P(Y=1 | R=r)`.
    pub fn pi_1_given(&self, r: u8) -> f64 {
        if r == 1 {
            self.pi_1_given_1
        } else {
            self.pi_1_given_0
        }
    }

    /// `P(Y=y | R=r)`.
    pub fn class_prob(&self, r: u8, y: bool) -> f64 {
        let p = self.pi_1_given(r);
        if y {
            p
        } else {
            1.0 - p
        }
    }

    /// `p(x, y | R=r)`.
    pub fn joint_density(&self, x: &[f64], y: bool, r: u8) -> f64 {
        self.class_prob(r, y) * gaussian_pdf(x, &group_mean(r, y), self.sigma(r, y))
    }

    /// `log p(x, y | R=r)`.
    pub fn log_joint_density(&self, x: &[f64], y: bool, r: u8) -> f64 {
        self.class_prob(r, y).ln() + gaussian_log_pdf(x, &group_mean(r, y), self.sigma(r, y))
    }

    /// `p(x, y | R=0) / p(x, y | R=1)` from the closed-form densities.
    pub fn density_ratio(&self, x: &[f64], y: bool) -> f64 {
        (self.log_joint_density(x, y, 0) - self.log_joint_density(x, y, 1)).exp()
    }

    /// `logit P(Y=1 | X=x, R=r)` from the closed-form densities.
    pub fn posterior_logit(&self, x: &[f64], r: u8) -> f64 {
        self.log_joint_density(x, true, r) - self.log_joint_density(x, false, r)
    }
}

/// `mu_{r,y} = ((2y-1)(1-2r), 2(2y-1))`.
pub fn group_mean(r: u8, y: bool) -> Vec<f64> {
    let s = if y { 1.0 } else { -1.0 };
    let sr = 1.0 - 2.0 * f64::from(r);
    vec![s * sr, 2.0 * s]
}

/// Isotropic Gaussian density `N(mean, sigma^2 I)`.
pub fn gaussian_pdf(x: &[f64], mean: &[f64], sigma: f64) -> f64 {
    gaussian_log_pdf(x, mean, sigma).exp()
}

pub fn gaussian_log_pdf(x: &[f64], mean: &[f64], sigma: f64) -> f64 {
    let d = x.len() as f64;
    let sq: f64 = x.iter().zip(mean).map(|(a, b)| (a - b).powi(2)).sum();
    -0.5 * d * (2.0 * PI).ln() - d * sigma.ln() - sq / (2.0 * sigma * sigma)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum()
}

/// `P(Y=1 | X=x, R=1)` in closed form:
/// `logit = logit(pi_{1|1}) + 2 log(sigma_{1,0}/sigma_{1,1})
///          - |x - mu_{1,1}|^2 / (2 sigma_{1,1}^2) + |x - mu_{1,0}|^2 / (2 sigma_{1,0}^2)`.
pub fn oracle_eta1(design: &SimDesign, x: &[f64]) -> f64 {
    sigmoid(oracle_eta1_logit(design, x))
}

pub fn oracle_eta1_logit(design: &SimDesign, x: &[f64]) -> f64 {
    let (s1, s0) = (design.sigma(1, true), design.sigma(1, false));
    let p = design.pi_1_given_1;
    (p / (1.0 - p)).ln() + DIM as f64 * (s0 / s1).ln() - sq_dist(x, &group_mean(1, true)) / (2.0 * s1 * s1)
        + sq_dist(x, &group_mean(1, false)) / (2.0 * s0 * s0)
}

/// Exact tilt of the well-specified design together with its closed-form
/// densities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleTilt {
    pub design: SimDesign,
    pub theta_star: TiltParams,
}

impl OracleTilt {
    pub fn eta1(&self, x: &[f64]) -> f64 {
        oracle_eta1(&self.design, x)
    }

    /// `P(Y=1 | X=x, R=0)`.
    pub fn posterior_missing(&self, x: &[f64]) -> f64 {
        sigmoid(self.design.posterior_logit(x, 0))
    }

    /// `omega(x, y)` from the closed-form density ratio.
    pub fn omega(&self, x: &[f64], y: bool) -> f64 {
        self.design.density_ratio(x, y)
    }
}

/// `beta_y = (mu_{0,y} - mu_{1,y}) / sigma_y^2`,
/// `alpha_y = log(pi_{y|0}/pi_{y|1}) + (|mu_{1,y}|^2 - |mu_{0,y}|^2) / (2 sigma_y^2)`.
pub fn oracle_tilt(design: &SimDesign) -> Result<OracleTilt> {
    if design.kind != DesignKind::WellSpecified {
        return Err(TiltError::NoLinearOracle);
    }
    let part = |y: bool| {
        let (m0, m1) = (group_mean(0, y), group_mean(1, y));
        let s2 = design.sigma(0, y).powi(2);
        let beta: Vec<f64> = m0.iter().zip(&m1).map(|(a, b)| (a - b) / s2).collect();
        let n1: f64 = m1.iter().map(|v| v * v).sum();
        let n0: f64 = m0.iter().map(|v| v * v).sum();
        let alpha = (design.class_prob(0, y) / design.class_prob(1, y)).ln() + (n1 - n0) / (2.0 * s2);
        (alpha, beta)
    };
    let (alpha0, beta0) = part(false);
    let (alpha1, beta1) = part(true);
    Ok(OracleTilt {
        design: *design,
        theta_star: TiltParams::new(alpha0, alpha1, beta0, beta1)?,
    })
}

fn sample_row(design: &SimDesign, rng: &mut SimRng) -> ([f64; DIM], bool, bool) {
    let u_r: f64 = rng.random();
    let u_y: f64 = rng.random();
    let r = u_r < 0.5;
    let ri = u8::from(r);
    let y = u_y < design.pi_1_given(ri);
    let m = group_mean(ri, y);
    let s = design.sigma(ri, y);
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    ([m[0] + s * z1, m[1] + s * z2], y, r)
}

/// Sample with the outcomes of missing rows retained (for checking the
/// generator; estimation code only sees the masked dataset).
#[derive(Debug, Clone)]
pub struct CompleteSample {
    pub dataset: MnarDataset,
    pub true_outcomes: Vec<bool>,
}

/// Estimation sample of replication `rep`.
pub fn generate_complete(design: &SimDesign, rep: u64) -> Result<CompleteSample> {
    design.validate()?;
    if design.n == 0 {
        return Err(TiltError::InvalidArgument("n must be >= 1".into()));
    }
    let mut rng = stream_rng(design.seed, rep_stream(rep, 0));
    let mut cov = Vec::with_capacity(design.n * DIM);
    let mut ys = Vec::with_capacity(design.n);
    let mut rs = Vec::with_capacity(design.n);
    for _ in 0..design.n {
        let (x, y, r) = sample_row(design, &mut rng);
        cov.extend_from_slice(&x);
        ys.push(y);
        rs.push(r);
    }
    let masked: Vec<bool> = ys.iter().zip(&rs).map(|(&y, &r)| y && r).collect();
    Ok(CompleteSample {
        dataset: MnarDataset::new(cov, DIM, masked, rs)?,
        true_outcomes: ys,
    })
}

/// Draws `design.n` rows; outcomes of rows with `r = 0` are set to 0.
pub fn generate(design: &SimDesign) -> Result<MnarDataset> {
    generate_rep(design, 0)
}

pub fn generate_rep(design: &SimDesign, rep: u64) -> Result<MnarDataset> {
    Ok(generate_complete(design, rep)?.dataset)
}

/// `n` draws from `(X, Y) | R=1`, obtained by rejection from the full
/// design on a stream separate from the estimation sample.
pub fn generate_observed_arm(design: &SimDesign, n: usize, rep: u64) -> Result<(Vec<f64>, Vec<bool>)> {
    design.validate()?;
    let mut rng = stream_rng(design.seed, rep_stream(rep, 1));
    let mut cov = Vec::with_capacity(n * DIM);
    let mut ys = Vec::with_capacity(n);
    while ys.len() < n {
        let (x, y, r) = sample_row(design, &mut rng);
        if r {
            cov.extend_from_slice(&x);
            ys.push(y);
        }
    }
    Ok((cov, ys))
}

/// Label-shift variant of `design`: both arms draw `X | Y=y` from the
/// observed-arm law `N(mu_{1,y}, sigma_{1,y}^2 I)`, so only the class
/// priors differ and the density ratio is `P(Y=y|R=0) / P(Y=y|R=1)`.
/// Uses the stream `rep_stream(rep, 2)` and the same per-row draw order.
pub fn generate_label_shift(design: &SimDesign, rep: u64) -> Result<MnarDataset> {
    design.validate()?;
    let mut rng = stream_rng(design.seed, rep_stream(rep, 2));
    let mut cov = Vec::with_capacity(design.n * DIM);
    let mut ys = Vec::with_capacity(design.n);
    let mut rs = Vec::with_capacity(design.n);
    for _ in 0..design.n {
        let r = rng.random::<f64>() < 0.5;
        let y = rng.random::<f64>() < design.pi_1_given(r as u8);
        let m = group_mean(1, y);
        let s = design.sigma(1, y);
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        cov.extend_from_slice(&[m[0] + s * z1, m[1] + s * z2]);
        ys.push(y && r);
        rs.push(r);
    }
    MnarDataset::new(cov, DIM, ys, rs)
}

/// Class-prior ratios `[omega(., 0), omega(., 1)]` of the label-shift variant.
pub fn label_shift_weights(design: &SimDesign) -> [f64; 2] {
    [
        (1.0 - design.pi_1_given(0)) / (1.0 - design.pi_1_given(1)),
        design.pi_1_given(0) / design.pi_1_given(1),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TiltFitter {
    ExpGrad(TiltFitConfig),
    EmpiricalLikelihood(ElConfig),
}

impl TiltFitter {
    pub fn name(&self) -> &'static str {
        match self {
            TiltFitter::ExpGrad(_) => "expgrad",
            TiltFitter::EmpiricalLikelihood(_) => "el",
        }
    }

    pub fn fit(&self, ds: &MnarDataset, eta1: &LogisticModel, fm: &FeatureMap) -> Result<(TiltParams, bool)> {
        match self {
            TiltFitter::ExpGrad(cfg) => {
                let r = exponentiated_gradient(ds, eta1, fm, cfg)?;
                Ok((r.theta, r.converged))
            }
            TiltFitter::EmpiricalLikelihood(cfg) => {
                let r = fit_empirical_likelihood(ds, eta1, fm, cfg)?;
                Ok((r.result.theta, r.result.converged))
            }
        }
    }
}

impl Default for TiltFitter {
    fn default() -> Self {
        TiltFitter::ExpGrad(TiltFitConfig::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub kinds: Vec<DesignKind>,
    pub sigma1_grid: Vec<f64>,
    pub reps: usize,
    pub n: usize,
    pub classifier_n: usize,
    pub classifier: ClassifierConfig,
    pub fitter: TiltFitter,
    pub methods: Vec<Method>,
    pub estimands: Vec<Estimand>,
    pub seed: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            kinds: vec![DesignKind::WellSpecified],
            sigma1_grid: vec![0.75, 1.0, 1.25, 1.5],
            reps: 50,
            n: 400,
            classifier_n: 200,
            classifier: ClassifierConfig::default(),
            fitter: TiltFitter::default(),
            methods: vec![Method::Iw, Method::Dr],
            estimands: vec![Estimand::Mu, Estimand::Mu0],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub kind: DesignKind,
    pub sigma1: f64,
    pub rep: usize,
    pub estimand: Estimand,
    pub method: Method,
    pub point: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepOutcome {
    pub kind: DesignKind,
    pub sigma1: f64,
    pub rep: usize,
    /// `None` when the replication failed.
    pub converged: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub rows: Vec<McRow>,
    pub reps: Vec<RepOutcome>,
}

impl MonteCarloResult {
    pub fn failures(&self) -> impl Iterator<Item = &RepOutcome> {
        self.reps.iter().filter(|r| r.error.is_some())
    }

    /// Points of one cell in replication order.
    pub fn points(&self, kind: DesignKind, sigma1: f64, estimand: Estimand, method: Method) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.kind == kind && r.sigma1 == sigma1 && r.estimand == estimand && r.method == method)
            .map(|r| r.point)
            .collect()
    }
}

pub fn truth(estimand: Estimand) -> f64 {
    match estimand {
        Estimand::Mu => TRUE_MU,
        Estimand::Mu0 => TRUE_MU0,
    }
}

/// One replication: classifier sample, estimation sample, tilt fit, estimates.
pub fn run_rep(cfg: &MonteCarloConfig, kind: DesignKind, sigma1: f64, rep: usize) -> Result<(Vec<McRow>, bool)> {
    let design = SimDesign::new(kind, sigma1, cfg.n, cfg.seed)?;
    let (cx, cy) = generate_observed_arm(&design, cfg.classifier_n, rep as u64)?;
    let ones = cy.iter().filter(|&&v| v).count();
    if ones == 0 || ones == cy.len() {
        return Err(TiltError::DegenerateClassifier("only one class in the classifier sample".into()));
    }
    let eta_fm = cfg.classifier.feature_map(DIM)?;
    let eta1 = fit_logistic(&cx, &cy, eta_fm, &TrainingSpec::with_lambda(cfg.classifier.ridge_lambda))?.model;
    let ds = generate_rep(&design, rep as u64)?;
    let fm = FeatureMap::identity(DIM)?;
    let (theta, converged) = cfg.fitter.fit(&ds, &eta1, &fm)?;
    let tau = MeanFunctional::outcome();
    let mut rows = Vec::new();
    for &estimand in &cfg.estimands {
        for &method in &cfg.methods {
            let rep_est = estimate(&ds, estimand, method, &theta, Some(&eta1), &fm, &tau)?;
            rows.push(McRow {
                kind,
                sigma1,
                rep,
                estimand,
                method,
                point: rep_est.point,
            });
        }
    }
    Ok((rows, converged))
}

/// Runs every (kind, sigma1, rep) cell in parallel; failed replications are
/// recorded and skipped. Output order is the grid order regardless of
/// scheduling.
pub fn run_monte_carlo(cfg: &MonteCarloConfig) -> Result<MonteCarloResult> {
    if cfg.reps == 0 {
        return Err(TiltError::InvalidArgument("reps must be >= 1".into()));
    }
    if cfg.n == 0 || cfg.classifier_n < 2 {
        return Err(TiltError::InvalidArgument("n must be >= 1 and classifier_n >= 2".into()));
    }
    for &s in &cfg.sigma1_grid {
        SimDesign::well_specified(s, cfg.n, cfg.seed)?;
    }
    let jobs: Vec<(DesignKind, f64, usize)> = cfg
        .kinds
        .iter()
        .flat_map(|&k| cfg.sigma1_grid.iter().flat_map(move |&s| (0..cfg.reps).map(move |r| (k, s, r))))
        .collect();
    let outcomes: Vec<_> = jobs
        .par_iter()
        .map(|&(kind, sigma1, rep)| (kind, sigma1, rep, run_rep(cfg, kind, sigma1, rep)))
        .collect();
    let mut result = MonteCarloResult::default();
    for (kind, sigma1, rep, out) in outcomes {
        match out {
            Ok((rows, converged)) => {
                result.rows.extend(rows);
                result.reps.push(RepOutcome {
                    kind,
                    sigma1,
                    rep,
                    converged: Some(converged),
                    error: None,
                });
            }
            Err(e) => result.reps.push(RepOutcome {
                kind,
                sigma1,
                rep,
                converged: None,
                error: Some(e.to_string()),
            }),
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub kind: DesignKind,
    pub sigma1: f64,
    pub estimand: Estimand,
    pub method: Method,
    pub n_ok: usize,
    pub median: f64,
    pub iqr: f64,
    pub mean: f64,
    pub bias: f64,
    pub rmse: f64,
    /// Median of `|point - truth|`.
    pub median_abs_error: f64,
}

pub fn summarize(result: &MonteCarloResult) -> Vec<CellSummary> {
    let mut cells: Vec<(DesignKind, f64, Estimand, Method)> = Vec::new();
    for r in &result.rows {
        let key = (r.kind, r.sigma1, r.estimand, r.method);
        if !cells.contains(&key) {
            cells.push(key);
        }
    }
    cells
        .into_iter()
        .map(|(kind, sigma1, estimand, method)| {
            let pts = result.points(kind, sigma1, estimand, method);
            let t = truth(estimand);
            let errs: Vec<f64> = pts.iter().map(|p| p - t).collect();
            let abs: Vec<f64> = errs.iter().map(|e| e.abs()).collect();
            CellSummary {
                kind,
                sigma1,
                estimand,
                method,
                n_ok: pts.len(),
                median: stats::median(&pts),
                iqr: stats::iqr(&pts),
                mean: stats::mean(&pts),
                bias: stats::mean(&errs),
                rmse: stats::mean(&errs.iter().map(|e| e * e).collect::<Vec<_>>()).sqrt(),
                median_abs_error: stats::median(&abs),
            }
        })
        .collect()
}

/// Long-format CSV `kind,sigma1,rep,estimand,method,point`.
pub fn rows_csv(result: &MonteCarloResult) -> String {
    let mut out = String::from("kind,sigma1,rep,estimand,method,point\n");
    for r in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.kind,
            g17(r.sigma1),
            r.rep,
            r.estimand,
            r.method,
            g17(r.point)
        ));
    }
    out
}

pub fn summary_csv(cells: &[CellSummary]) -> String {
    let mut out = String::from("kind,sigma1,estimand,method,n_ok,median,iqr,mean,bias,rmse,median_abs_error\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            c.kind,
            g17(c.sigma1),
            c.estimand,
            c.method,
            c.n_ok,
            g17(c.median),
            g17(c.iqr),
            g17(c.mean),
            g17(c.bias),
            g17(c.rmse),
            g17(c.median_abs_error)
        ));
    }
    out
}

/// Fixed-width table for terminals.
pub fn summary_table(cells: &[CellSummary]) -> String {
    let mut out = format!(
        "{:<5} {:>7} {:<4} {:<3} {:>4} {:>8} {:>8} {:>8} {:>8}\n",
        "kind", "sigma1", "est", "mth", "n", "median", "iqr", "bias", "rmse"
    );
    for c in cells {
        out.push_str(&format!(
            "{:<5} {:>7} {:<4} {:<3} {:>4} {:>8} {:>8} {:>8} {:>8}\n",
            c.kind.to_string(),
            r4(c.sigma1),
            c.estimand.to_string(),
            c.method.to_string(),
            c.n_ok,
            r4(c.median),
            r4(c.iqr),
            r4(c.bias),
            r4(c.rmse)
        ));
    }
    out
}
