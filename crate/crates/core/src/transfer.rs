//! Synthetic subpopulation-shift benchmark.
//!
//! Each example has a label `Y` and a spurious attribute `A`; given the group
//! `(Y, A)` the covariates are `N(nu_{y,a}, I_d)` in both domains. Only the
//! group proportions differ: in the source domain `P(Y=1) = 0.5` and
//! `A = Y` with probability 0.95, in the target every group has mass 0.25.
//! The spurious axis separates the groups more strongly than the label axis,
//! so a classifier trained on the source leans on `A` and fails on the
//! target's misaligned groups.
//!
//! The source plays the observed arm (`R=1`) and the target the missing arm
//! (`R=0`). `A` is never passed to the tilt fit or to the non-oracle
//! trainers; only [`true_importance_weights`], the reweighting oracle and
//! [`evaluate_mcv_surrogate`] read it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{fit_eta1, fit_logistic, fit_terms, ClassifierConfig, LogisticModel, LossTerms, ProbClassifier, TrainingSpec};
use crate::dataset::MnarDataset;
use crate::error::{Result, TiltError};
use crate::estimators::{importance_weight, outcome_regression_m0};
use crate::features::FeatureMap;
use crate::fmt::g17;
use crate::params::{dot, TiltParams};
use crate::rng::{rep_stream, stream_rng, SimRng};
use crate::stats;
use crate::tilt::{exponentiated_gradient, TiltFitConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftDesign {
    pub d: usize,
    /// Half the gap between the label groups along axis 1.
    pub label_shift: f64,
    /// Half the gap between the attribute groups along axis 2.
    pub spurious_shift: f64,
    /// `P(Y=1 | R=1)`.
    pub source_p_y1: f64,
    /// `P(A=y | Y=y, R=1)`.
    pub source_p_aligned: f64,
    pub n_source: usize,
    pub n_target: usize,
    /// Fraction of the target used for training; the rest is the test set.
    pub target_train_fraction: f64,
    pub seed: u64,
}

impl Default for ShiftDesign {
    fn default() -> Self {
        ShiftDesign {
            d: 10,
            label_shift: 1.0,
            spurious_shift: 2.0,
            source_p_y1: 0.5,
            source_p_aligned: 0.95,
            n_source: 2000,
            n_target: 2000,
            target_train_fraction: 0.75,
            seed: 0,
        }
    }
}

impl ShiftDesign {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TiltError::InvalidArgument(m));
        if self.d < 2 {
            return bad(format!("shift design needs d >= 2, got {}", self.d));
        }
        if self.n_source == 0 || self.n_target < 2 {
            return bad("need n_source >= 1 and n_target >= 2".into());
        }
        for (name, p) in [
            ("source_p_y1", self.source_p_y1),
            ("source_p_aligned", self.source_p_aligned),
            ("target_train_fraction", self.target_train_fraction),
        ] {
            if !(p > 0.0 && p < 1.0) {
                return bad(format!("{name} must lie in (0,1), got {p}"));
            }
        }
        Ok(())
    }

    /// `nu_{y,a}`: `+-label_shift` on axis 1, `+-spurious_shift` on axis 2.
    pub fn group_mean(&self, y: bool, a: bool) -> Vec<f64> {
        let mut m = vec![0.0; self.d];
        m[0] = if y { self.label_shift } else { -self.label_shift };
        m[1] = if a { self.spurious_shift } else { -self.spurious_shift };
        m
    }

    /// `P(Y=y, A=a | R=1)`.
    pub fn source_prob(&self, y: bool, a: bool) -> f64 {
        let py = if y { self.source_p_y1 } else { 1.0 - self.source_p_y1 };
        let pa = if a == y { self.source_p_aligned } else { 1.0 - self.source_p_aligned };
        py * pa
    }

    /// `P(Y=y, A=a | R=0)`.
    pub fn target_prob(&self, _y: bool, _a: bool) -> f64 {
        0.25
    }
}

/// `omega*(a, y) = P(Y=y, A=a | R=0) / P(Y=y, A=a | R=1)`, indexed `[a][y]`.
pub fn true_importance_weights(design: &ShiftDesign) -> [[f64; 2]; 2] {
    let mut w = [[0.0; 2]; 2];
    for a in [false, true] {
        for y in [false, true] {
            w[usize::from(a)][usize::from(y)] = design.target_prob(y, a) / design.source_prob(y, a);
        }
    }
    w
}

/// Covariates with label and attribute, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSample {
    pub x: Vec<f64>,
    pub y: Vec<bool>,
    pub a: Vec<bool>,
    pub dim: usize,
}

impl GroupSample {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    pub fn subset(&self, idx: &[usize]) -> GroupSample {
        let mut x = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            x.extend_from_slice(self.x(i));
        }
        GroupSample {
            x,
            y: idx.iter().map(|&i| self.y[i]).collect(),
            a: idx.iter().map(|&i| self.a[i]).collect(),
            dim: self.dim,
        }
    }

    /// Fraction of rows in each group, indexed `[y][a]`.
    pub fn group_frequencies(&self) -> [[f64; 2]; 2] {
        let mut f = [[0.0; 2]; 2];
        for (&y, &a) in self.y.iter().zip(&self.a) {
            f[usize::from(y)][usize::from(a)] += 1.0;
        }
        let n = self.len() as f64;
        f.iter_mut().flatten().for_each(|v| *v /= n);
        f
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftData {
    pub source: GroupSample,
    pub target_train: GroupSample,
    pub target_test: GroupSample,
}

fn draw(design: &ShiftDesign, n: usize, source: bool, rng: &mut SimRng) -> GroupSample {
    let mut s = GroupSample {
        x: Vec::with_capacity(n * design.d),
        y: Vec::with_capacity(n),
        a: Vec::with_capacity(n),
        dim: design.d,
    };
    for _ in 0..n {
        let (u1, u2): (f64, f64) = (rng.random(), rng.random());
        let (y, a) = if source {
            let y = u1 < design.source_p_y1;
            (y, if u2 < design.source_p_aligned { y } else { !y })
        } else {
            (u1 < 0.5, u2 < 0.5)
        };
        let m = design.group_mean(y, a);
        for mj in m {
            let z: f64 = rng.sample(StandardNormal);
            s.x.push(mj + z);
        }
        s.y.push(y);
        s.a.push(a);
    }
    s
}

/// Source and full target samples (fixed by the design seed).
pub fn generate_domains(design: &ShiftDesign) -> Result<(GroupSample, GroupSample)> {
    design.validate()?;
    let source = draw(design, design.n_source, true, &mut stream_rng(design.seed, 0x50));
    let target = draw(design, design.n_target, false, &mut stream_rng(design.seed, 0x7a));
    Ok((source, target))
}

/// Random train/test split of the target for `repeat`.
pub fn split_target(design: &ShiftDesign, target: &GroupSample, repeat: u64) -> (GroupSample, GroupSample) {
    let n = target.len();
    let n_train = ((design.target_train_fraction * n as f64).floor() as usize).clamp(1, n - 1);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut stream_rng(design.seed, rep_stream(repeat, 2)));
    let (mut tr, mut te) = (idx[..n_train].to_vec(), idx[n_train..].to_vec());
    tr.sort_unstable();
    te.sort_unstable();
    (target.subset(&tr), target.subset(&te))
}

/// Source sample plus the first train/test split of the target.
pub fn generate_shift(design: &ShiftDesign) -> Result<ShiftData> {
    let (source, target) = generate_domains(design)?;
    let (target_train, target_test) = split_target(design, &target, 0);
    Ok(ShiftData {
        source,
        target_train,
        target_test,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trainer {
    Source,
    Target,
    Reweight,
    Iw,
    Or,
    Dr,
}

impl Trainer {
    pub const ALL: [Trainer; 6] = [
        Trainer::Source,
        Trainer::Target,
        Trainer::Reweight,
        Trainer::Iw,
        Trainer::Or,
        Trainer::Dr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Trainer::Source => "source",
            Trainer::Target => "target",
            Trainer::Reweight => "reweight",
            Trainer::Iw => "iw",
            Trainer::Or => "or",
            Trainer::Dr => "dr",
        }
    }
}

impl fmt::Display for Trainer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Trainer {
    type Err = TiltError;

    fn from_str(s: &str) -> Result<Self> {
        Trainer::ALL
            .into_iter()
            .find(|t| t.name() == s.to_ascii_lowercase())
            .ok_or_else(|| TiltError::InvalidArgument(format!("unknown trainer {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferConfig {
    pub design: ShiftDesign,
    pub tilt: TiltFitConfig,
    /// Settings of the `eta1` classifier fitted on the source.
    pub classifier: ClassifierConfig,
    /// Ridge strength shared by the six trainers and the surrogate models.
    pub lambda: f64,
    pub repeats: usize,
}

impl Default for TransferConfig {
    fn default() -> Self {
        TransferConfig {
            design: ShiftDesign::default(),
            tilt: TiltFitConfig::precise(),
            classifier: ClassifierConfig::default(),
            lambda: 1e-3,
            repeats: 20,
        }
    }
}

/// Fitted nuisances of one repeat.
#[derive(Debug, Clone)]
pub struct ShiftNuisance {
    pub theta: TiltParams,
    pub tilt_converged: bool,
    pub eta1: LogisticModel,
    /// `omega_hat(X_i, Y_i)` on source rows.
    pub source_weights: Vec<f64>,
    /// `m0_hat(X_i)` on target-train rows.
    pub target_soft_labels: Vec<f64>,
}

/// Tilt fit with `T(x) = x` on source (observed) + target-train (missing).
pub fn fit_nuisance(data: &ShiftData, cfg: &TransferConfig) -> Result<ShiftNuisance> {
    let (src, tgt) = (&data.source, &data.target_train);
    let mut cov = src.x.clone();
    cov.extend_from_slice(&tgt.x);
    let mut outcomes = src.y.clone();
    outcomes.extend(std::iter::repeat_n(false, tgt.len()));
    let mut observed = vec![true; src.len()];
    observed.extend(std::iter::repeat_n(false, tgt.len()));
    let ds = MnarDataset::new(cov, src.dim, outcomes, observed)?;
    let eta1 = fit_eta1(&ds, cfg.classifier.feature_map(src.dim)?, cfg.classifier.ridge_lambda)?;
    let fm = FeatureMap::identity(src.dim)?;
    let fit = exponentiated_gradient(&ds, &eta1, &fm, &cfg.tilt)?;
    let source_weights = (0..src.len())
        .map(|i| importance_weight(&fit.theta, &fm, src.x(i), src.y[i]))
        .collect::<Result<Vec<_>>>()?;
    let target_soft_labels = (0..tgt.len())
        .map(|i| outcome_regression_m0(&fit.theta, &eta1, &fm, tgt.x(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ShiftNuisance {
        theta: fit.theta,
        tilt_converged: fit.converged,
        eta1,
        source_weights,
        target_soft_labels,
    })
}

fn spec(lambda: f64, weights: Option<Vec<f64>>, soft: Option<Vec<f64>>) -> TrainingSpec {
    TrainingSpec {
        weights,
        soft_labels: soft,
        ..TrainingSpec::with_lambda(lambda)
    }
}

/// Trains one of the six classifiers on the benchmark data.
pub fn train(
    trainer: Trainer,
    data: &ShiftData,
    nuisance: &ShiftNuisance,
    design: &ShiftDesign,
    lambda: f64,
) -> Result<LogisticModel> {
    let (src, tgt) = (&data.source, &data.target_train);
    let fm = FeatureMap::identity(src.dim)?;
    let fit = match trainer {
        Trainer::Source => fit_logistic(&src.x, &src.y, fm, &spec(lambda, None, None))?,
        Trainer::Target => fit_logistic(&tgt.x, &tgt.y, fm, &spec(lambda, None, None))?,
        Trainer::Reweight => {
            let w_star = true_importance_weights(design);
            let w = src
                .y
                .iter()
                .zip(&src.a)
                .map(|(&y, &a)| w_star[usize::from(a)][usize::from(y)])
                .collect();
            fit_logistic(&src.x, &src.y, fm, &spec(lambda, Some(w), None))?
        }
        Trainer::Iw => {
            fit_logistic(&src.x, &src.y, fm, &spec(lambda, Some(nuisance.source_weights.clone()), None))?
        }
        Trainer::Or => {
            let dummy = vec![false; tgt.len()];
            fit_logistic(&tgt.x, &dummy, fm, &spec(lambda, None, Some(nuisance.target_soft_labels.clone())))?
        }
        Trainer::Dr => {
            // (1/n1) sum w {l(x, y) - l(x, m0)} + (1/n0) sum l(x, m0); the
            // source part is linear in the logit.
            let tilt_fm = FeatureMap::identity(src.dim)?;
            let src_m0 = (0..src.len())
                .map(|i| outcome_regression_m0(&nuisance.theta, &nuisance.eta1, &tilt_fm, src.x(i)))
                .collect::<Result<Vec<_>>>()?;
            let (n1, n0) = (src.len() as f64, tgt.len() as f64);
            let mut c = vec![0.0; src.len()];
            let mut d: Vec<f64> = (0..src.len())
                .map(|i| nuisance.source_weights[i] * (f64::from(u8::from(src.y[i])) - src_m0[i]) / n1)
                .collect();
            c.extend(std::iter::repeat_n(1.0 / n0, tgt.len()));
            d.extend(nuisance.target_soft_labels.iter().map(|m| m / n0));
            let mut x = src.x.clone();
            x.extend_from_slice(&tgt.x);
            let terms = LossTerms { softplus: c, linear: d };
            let base = TrainingSpec::with_lambda(lambda);
            let features = fm.apply_rows(&x)?;
            fit_terms(fm, &features, &terms, lambda, base.max_iter, base.tolerance)?
        }
    };
    Ok(fit.model)
}

/// 0/1 accuracy of `p >= 1/2` against `labels`.
pub fn accuracy(model: &dyn ProbClassifier, x: &[f64], dim: usize, labels: &[bool]) -> Result<f64> {
    let p = model.predict_rows(x, dim)?;
    let hits = p.iter().zip(labels).filter(|(p, &y)| (**p >= 0.5) == y).count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Accuracies of `A ~ U_hat` with `U_hat = (beta0 . X, beta1 . X)` and of
/// `A ~ X`, both trained on target-train and scored on target-test.
pub fn evaluate_mcv_surrogate(theta: &TiltParams, data: &ShiftData, lambda: f64) -> Result<(f64, f64)> {
    let (tr, te) = (&data.target_train, &data.target_test);
    for s in [tr, te] {
        if s.a.iter().all(|&a| a) || s.a.iter().all(|&a| !a) {
            return Err(TiltError::DegenerateClassifier("attribute takes a single value in a target split".into()));
        }
    }
    if theta.dim() != tr.dim {
        return Err(TiltError::DimensionMismatch {
            expected: tr.dim,
            got: theta.dim(),
        });
    }
    let surrogate = |s: &GroupSample| -> Vec<f64> {
        (0..s.len())
            .flat_map(|i| [dot(&theta.beta0, s.x(i)), dot(&theta.beta1, s.x(i))])
            .collect()
    };
    let (u_tr, u_te) = (surrogate(tr), surrogate(te));
    let sp = TrainingSpec::with_lambda(lambda);
    let m_u = fit_logistic(&u_tr, &tr.a, FeatureMap::identity(2)?, &sp)?.model;
    let m_x = fit_logistic(&tr.x, &tr.a, FeatureMap::identity(tr.dim)?, &sp)?.model;
    Ok((accuracy(&m_u, &u_te, 2, &te.a)?, accuracy(&m_x, &te.x, te.dim, &te.a)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub repeat: usize,
    pub trainer: Trainer,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McvRow {
    pub repeat: usize,
    /// `a_given_u` or `a_given_x`.
    pub model: String,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub repeat: usize,
    /// Trainer name, `nuisance` or `mcv`.
    pub stage: String,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl MeanSd {
    fn of(v: &[f64]) -> Self {
        MeanSd {
            mean: stats::mean(v),
            sd: stats::sd(v),
            n: v.len(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TransferBenchResult {
    pub accuracies: Vec<AccuracyRow>,
    pub mcv: Vec<McvRow>,
    pub failures: Vec<FailureRow>,
    pub tilt_converged: Vec<bool>,
}

impl TransferBenchResult {
    pub fn trainer_accuracies(&self, trainer: Trainer) -> Vec<f64> {
        self.accuracies
            .iter()
            .filter(|r| r.trainer == trainer)
            .map(|r| r.accuracy)
            .collect()
    }

    pub fn mcv_accuracies(&self, model: &str) -> Vec<f64> {
        self.mcv.iter().filter(|r| r.model == model).map(|r| r.accuracy).collect()
    }

    pub fn trainer_summary(&self) -> BTreeMap<String, MeanSd> {
        Trainer::ALL
            .into_iter()
            .map(|t| (t.name().to_string(), MeanSd::of(&self.trainer_accuracies(t))))
            .collect()
    }

    pub fn mcv_summary(&self) -> BTreeMap<String, MeanSd> {
        ["a_given_u", "a_given_x"]
            .into_iter()
            .map(|m| (m.to_string(), MeanSd::of(&self.mcv_accuracies(m))))
            .collect()
    }

    /// `repeat,trainer,accuracy`.
    pub fn accuracy_csv(&self) -> String {
        let mut out = String::from("repeat,trainer,accuracy\n");
        for r in &self.accuracies {
            out.push_str(&format!("{},{},{}\n", r.repeat, r.trainer, g17(r.accuracy)));
        }
        out
    }

    /// `repeat,model,mcv_accuracy`.
    pub fn mcv_csv(&self) -> String {
        let mut out = String::from("repeat,model,mcv_accuracy\n");
        for r in &self.mcv {
            out.push_str(&format!("{},{},{}\n", r.repeat, r.model, g17(r.accuracy)));
        }
        out
    }

    pub fn summary_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Summary {
            trainers: BTreeMap<String, MeanSd>,
            mcv: BTreeMap<String, MeanSd>,
            failures: usize,
            tilt_converged: usize,
            repeats: usize,
        }
        Ok(serde_json::to_string_pretty(&Summary {
            trainers: self.trainer_summary(),
            mcv: self.mcv_summary(),
            failures: self.failures.len(),
            tilt_converged: self.tilt_converged.iter().filter(|&&c| c).count(),
            repeats: self.tilt_converged.len(),
        })?)
    }
}

struct RepeatOutput {
    accuracies: Vec<AccuracyRow>,
    mcv: Vec<McvRow>,
    failures: Vec<FailureRow>,
    converged: bool,
}

fn run_repeat(cfg: &TransferConfig, source: &GroupSample, target: &GroupSample, repeat: usize) -> RepeatOutput {
    let (target_train, target_test) = split_target(&cfg.design, target, repeat as u64);
    let data = ShiftData {
        source: source.clone(),
        target_train,
        target_test,
    };
    let mut out = RepeatOutput {
        accuracies: Vec::new(),
        mcv: Vec::new(),
        failures: Vec::new(),
        converged: false,
    };
    let fail = |stage: &str, e: TiltError| FailureRow {
        repeat,
        stage: stage.to_string(),
        error: e.to_string(),
    };
    let nuisance = match fit_nuisance(&data, cfg) {
        Ok(n) => n,
        Err(e) => {
            out.failures.push(fail("nuisance", e));
            return out;
        }
    };
    out.converged = nuisance.tilt_converged;
    let te = &data.target_test;
    for trainer in Trainer::ALL {
        let acc = train(trainer, &data, &nuisance, &cfg.design, cfg.lambda)
            .and_then(|m| accuracy(&m, &te.x, te.dim, &te.y));
        match acc {
            Ok(accuracy) => out.accuracies.push(AccuracyRow {
                repeat,
                trainer,
                accuracy,
            }),
            Err(e) => out.failures.push(fail(trainer.name(), e)),
        }
    }
    match evaluate_mcv_surrogate(&nuisance.theta, &data, cfg.lambda) {
        Ok((u, x)) => {
            out.mcv.push(McvRow {
                repeat,
                model: "a_given_u".into(),
                accuracy: u,
            });
            out.mcv.push(McvRow {
                repeat,
                model: "a_given_x".into(),
                accuracy: x,
            });
        }
        Err(e) => out.failures.push(fail("mcv", e)),
    }
    out
}

/// Draws both domains once, then for every repeat re-splits the target,
/// refits the nuisances and trains the six classifiers. Fit failures are
/// recorded per repeat and stage.
pub fn run_benchmark(cfg: &TransferConfig) -> Result<TransferBenchResult> {
    if cfg.repeats == 0 {
        return Err(TiltError::InvalidArgument("repeats must be >= 1".into()));
    }
    if !(cfg.lambda >= 0.0) {
        return Err(TiltError::InvalidArgument("lambda must be >= 0".into()));
    }
    cfg.tilt.validate()?;
    let (source, target) = generate_domains(&cfg.design)?;
    let outputs: Vec<RepeatOutput> = (0..cfg.repeats)
        .into_par_iter()
        .map(|r| run_repeat(cfg, &source, &target, r))
        .collect();
    let mut result = TransferBenchResult::default();
    for o in outputs {
        result.accuracies.extend(o.accuracies);
        result.mcv.extend(o.mcv);
        result.failures.extend(o.failures);
        result.tilt_converged.push(o.converged);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn true_weights() {
        let w = true_importance_weights(&ShiftDesign::default());
        assert!((w[1][1] - 10.0 / 19.0).abs() < 1e-15);
        assert!((w[0][0] - 10.0 / 19.0).abs() < 1e-15);
        assert!((w[0][1] - 10.0).abs() < 1e-12);
        assert!((w[1][0] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn weights_normalize() {
        let d = ShiftDesign::default();
        let w = true_importance_weights(&d);
        let mut s = 0.0;
        for a in [false, true] {
            for y in [false, true] {
                s += w[usize::from(a)][usize::from(y)] * d.source_prob(y, a);
            }
        }
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spurious_axis_dominates() {
        let d = ShiftDesign::default();
        let gap = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        assert!(gap(d.group_mean(true, true), d.group_mean(true, false)) > gap(d.group_mean(true, true), d.group_mean(false, true)));
    }

    #[test]
    fn split_sizes() {
        let d = ShiftDesign {
            n_target: 100,
            ..Default::default()
        };
        let data = generate_shift(&d).unwrap();
        assert_eq!(data.target_train.len(), 75);
        assert_eq!(data.target_test.len(), 25);
        assert_eq!(data.source.len(), 2000);
    }

    #[test]
    fn trainer_names_roundtrip() {
        for t in Trainer::ALL {
            assert_eq!(t.name().parse::<Trainer>().unwrap(), t);
        }
    }
}
