//! Python bindings. The tilt always uses the identity feature map of the
//! dataset's covariates; the outcome classifier uses polynomial features.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tiltbench::cli::parse_tau;
use tiltbench::estimators::{self, Estimand, Method};
use tiltbench::synthetic::{self, DesignKind, SimDesign};
use tiltbench::tilt::{self, ElConfig, TiltFitConfig, TiltFitResult};
use tiltbench::transfer::{self, TransferConfig};
use tiltbench::{ClassifierConfig, FeatureMap, LogisticModel, MnarDataset, ProbClassifier, TiltError, TiltParams};

fn py_err(e: TiltError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr>(what: &str, s: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| PyValueError::new_err(format!("bad {what} {s:?}: {e}")))
}

fn tilt_map(ds: &MnarDataset) -> PyResult<FeatureMap> {
    FeatureMap::identity(ds.dim()).map_err(py_err)
}

/// Observed/missing dataset with binary outcomes.
#[pyclass(name = "Dataset", module = "tiltbench", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDataset(MnarDataset);

#[pymethods]
impl PyDataset {
    #[new]
    fn new(covariates: Vec<Vec<f64>>, outcomes: Vec<bool>, observed: Vec<bool>) -> PyResult<Self> {
        MnarDataset::from_rows(&covariates, outcomes, observed).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn load_csv(path: &str) -> PyResult<Self> {
        tiltbench::load_csv(path).map(Self).map_err(py_err)
    }

    /// Draws from the Gaussian design; `kind` is `well` or `miss`.
    #[staticmethod]
    #[pyo3(signature = (kind="well", sigma1=1.0, n=1000, seed=0))]
    fn simulate(kind: &str, sigma1: f64, n: usize, seed: u64) -> PyResult<Self> {
        let design = SimDesign::new(parse::<DesignKind>("kind", kind)?, sigma1, n, seed).map_err(py_err)?;
        synthetic::generate(&design).map(Self).map_err(py_err)
    }

    fn save_csv(&self, path: &str) -> PyResult<()> {
        tiltbench::save_csv(&self.0, path).map_err(py_err)
    }

    /// Random partition; returns `(first, second)` with `floor(fraction * n)` rows first.
    fn split(&self, fraction: f64, seed: u64) -> PyResult<(Self, Self)> {
        let (a, b) = tiltbench::split_dataset(&self.0, fraction, seed).map_err(py_err)?;
        Ok((Self(a), Self(b)))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn n0(&self) -> usize {
        self.0.n0()
    }

    #[getter]
    fn n1(&self) -> usize {
        self.0.n1()
    }

    fn row(&self, i: usize) -> PyResult<(Vec<f64>, bool, bool)> {
        if i >= self.0.len() {
            return Err(PyValueError::new_err(format!("row {i} out of range")));
        }
        Ok((self.0.x(i).to_vec(), self.0.y(i), self.0.r(i)))
    }

    fn __repr__(&self) -> String {
        format!("Dataset(n={}, dim={}, n1={}, n0={})", self.0.len(), self.0.dim(), self.0.n1(), self.0.n0())
    }
}

/// Logistic model of `P(Y=1 | x, R=1)`.
#[pyclass(name = "Classifier", module = "tiltbench", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyClassifier(LogisticModel);

#[pymethods]
impl PyClassifier {
    fn predict_proba(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.predict_proba(&x).map_err(py_err)
    }

    fn logit(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0.logit(&x).map_err(py_err)
    }

    #[getter]
    fn intercept(&self) -> f64 {
        self.0.intercept
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.weights.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(py_err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        LogisticModel::from_json(s).map(Self).map_err(py_err)
    }
}

/// Tilt parameters `(alpha0, alpha1, beta0, beta1)`.
#[pyclass(name = "TiltParams", module = "tiltbench", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTiltParams(TiltParams);

#[pymethods]
impl PyTiltParams {
    #[new]
    fn new(alpha0: f64, alpha1: f64, beta0: Vec<f64>, beta1: Vec<f64>) -> PyResult<Self> {
        TiltParams::new(alpha0, alpha1, beta0, beta1).map(Self).map_err(py_err)
    }

    #[getter]
    fn alpha0(&self) -> f64 {
        self.0.alpha0
    }

    #[getter]
    fn alpha1(&self) -> f64 {
        self.0.alpha1
    }

    #[getter]
    fn beta0(&self) -> Vec<f64> {
        self.0.beta0.clone()
    }

    #[getter]
    fn beta1(&self) -> Vec<f64> {
        self.0.beta1.clone()
    }

    /// `[alpha0, alpha1, beta0..., beta1...]`
    fn to_list(&self) -> Vec<f64> {
        self.0.to_vec()
    }

    /// `omega(x, y)` with identity features.
    fn weight(&self, x: Vec<f64>, y: bool) -> PyResult<f64> {
        let fm = FeatureMap::identity(x.len()).map_err(py_err)?;
        estimators::importance_weight(&self.0, &fm, &x, y).map_err(py_err)
    }

    fn max_abs_diff(&self, other: &PyTiltParams) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    fn __repr__(&self) -> String {
        format!(
            "TiltParams(alpha0={}, alpha1={}, beta0={:?}, beta1={:?})",
            self.0.alpha0, self.0.alpha1, self.0.beta0, self.0.beta1
        )
    }
}

#[pyclass(name = "TiltFit", module = "tiltbench", frozen)]
struct PyTiltFit(TiltFitResult);

#[pymethods]
impl PyTiltFit {
    #[getter]
    fn theta(&self) -> PyTiltParams {
        PyTiltParams(self.0.theta.clone())
    }

    #[getter]
    fn converged(&self) -> bool {
        self.0.converged
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }

    #[getter]
    fn final_objective(&self) -> f64 {
        self.0.final_objective
    }

    #[getter]
    fn final_constraint(&self) -> f64 {
        self.0.final_constraint
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(py_err)
    }
}

fn tilt_config(
    preset: &str,
    eps: Option<f64>,
    tol: Option<f64>,
    lr: Option<f64>,
    max_iter: Option<usize>,
    reg: Option<f64>,
) -> PyResult<TiltFitConfig> {
    let mut cfg = match preset {
        "default" => TiltFitConfig::default(),
        "precise" => TiltFitConfig::precise(),
        other => return Err(PyValueError::new_err(format!("unknown preset {other:?} (default or precise)"))),
    };
    cfg.eps = eps.unwrap_or(cfg.eps);
    cfg.tol = tol.unwrap_or(cfg.tol);
    cfg.lr = lr.unwrap_or(cfg.lr);
    cfg.max_iter = max_iter.unwrap_or(cfg.max_iter);
    cfg.reg = reg.unwrap_or(cfg.reg);
    Ok(cfg)
}

/// Fits `P(Y=1 | x, R=1)` on the observed rows.
#[pyfunction]
#[pyo3(signature = (data, degree=2, ridge=1e-3))]
fn fit_eta1(data: &PyDataset, degree: usize, ridge: f64) -> PyResult<PyClassifier> {
    let fm = FeatureMap::polynomial(data.0.dim(), degree).map_err(py_err)?;
    tiltbench::fit_eta1(&data.0, fm, ridge).map(PyClassifier).map_err(py_err)
}

/// Exponentiated-gradient tilt fit.
#[pyfunction]
#[pyo3(signature = (data, eta1, preset="default", eps=None, tol=None, lr=None, max_iter=None, reg=None))]
#[allow(clippy::too_many_arguments)]
fn fit_tilt(
    py: Python<'_>,
    data: &PyDataset,
    eta1: &PyClassifier,
    preset: &str,
    eps: Option<f64>,
    tol: Option<f64>,
    lr: Option<f64>,
    max_iter: Option<usize>,
    reg: Option<f64>,
) -> PyResult<PyTiltFit> {
    let cfg = tilt_config(preset, eps, tol, lr, max_iter, reg)?;
    let fm = tilt_map(&data.0)?;
    py.detach(|| tilt::exponentiated_gradient(&data.0, &eta1.0, &fm, &cfg))
        .map(PyTiltFit)
        .map_err(py_err)
}

/// Empirical-likelihood tilt fit; `final_objective` is the profile log-likelihood.
#[pyfunction]
#[pyo3(signature = (data, eta1, tol=None, max_iter=None))]
fn fit_empirical_likelihood(
    py: Python<'_>,
    data: &PyDataset,
    eta1: &PyClassifier,
    tol: Option<f64>,
    max_iter: Option<usize>,
) -> PyResult<PyTiltFit> {
    let mut cfg = ElConfig::default();
    cfg.tol = tol.unwrap_or(cfg.tol);
    cfg.max_iter = max_iter.unwrap_or(cfg.max_iter);
    let fm = tilt_map(&data.0)?;
    py.detach(|| tilt::fit_empirical_likelihood(&data.0, &eta1.0, &fm, &cfg))
        .map(|f| PyTiltFit(f.result))
        .map_err(py_err)
}

/// Point estimate of `estimand` (`mu` or `mu0`) by `method` (`iw`, `ipw`,
/// `dr`, `or`). `tau` is `y`, `1-y`, `const:C`, `xJ` or `y*xJ`.
#[pyfunction]
#[pyo3(signature = (data, theta, eta1=None, estimand="mu0", method="dr", tau="y"))]
fn estimate(
    data: &PyDataset,
    theta: &PyTiltParams,
    eta1: Option<&PyClassifier>,
    estimand: &str,
    method: &str,
    tau: &str,
) -> PyResult<f64> {
    let fm = tilt_map(&data.0)?;
    let tau = parse_tau(tau, data.0.dim()).map_err(py_err)?;
    let eta: Option<&dyn ProbClassifier> = eta1.map(|c| &c.0 as &dyn ProbClassifier);
    estimators::estimate(
        &data.0,
        parse::<Estimand>("estimand", estimand)?,
        parse::<Method>("method", method)?,
        &theta.0,
        eta,
        &fm,
        &tau,
    )
    .map(|r| r.point)
    .map_err(py_err)
}

/// Cross-fitted estimate with standard error and 95% interval: nuisances on
/// one part of a random split, scores on the other.
#[pyfunction]
#[pyo3(signature = (data, estimand="mu0", method="dr", tau="y", split=0.5, seed=0, preset="default", degree=2, ridge=1e-3))]
#[allow(clippy::too_many_arguments)]
fn estimate_with_ci<'py>(
    py: Python<'py>,
    data: &PyDataset,
    estimand: &str,
    method: &str,
    tau: &str,
    split: f64,
    seed: u64,
    preset: &str,
    degree: usize,
    ridge: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let fm = tilt_map(&data.0)?;
    let tau = parse_tau(tau, data.0.dim()).map_err(py_err)?;
    let estimand = parse::<Estimand>("estimand", estimand)?;
    let method = parse::<Method>("method", method)?;
    let tilt_cfg = tilt_config(preset, None, None, None, None, None)?;
    let classifier = ClassifierConfig {
        degree,
        ridge_lambda: ridge,
    };
    let res = py
        .detach(|| estimators::estimate_with_ci(&data.0, &fm, &tau, estimand, method, split, seed, &classifier, &tilt_cfg))
        .map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("point", res.report.point)?;
    out.set_item("std_error", res.report.std_error)?;
    out.set_item("ci95", res.report.ci95)?;
    out.set_item("n_used", res.report.n_used)?;
    out.set_item("n_fit", res.n_fit)?;
    out.set_item("theta", PyTiltParams(res.tilt.theta.clone()))?;
    out.set_item("converged", res.tilt.converged)?;
    Ok(out)
}

/// Closed-form tilt of the well-specified Gaussian design.
#[pyfunction]
fn oracle_tilt(sigma1: f64) -> PyResult<PyTiltParams> {
    let design = SimDesign::well_specified(sigma1, 2, 0).map_err(py_err)?;
    synthetic::oracle_tilt(&design)
        .map(|o| PyTiltParams(o.theta_star))
        .map_err(py_err)
}

/// Runs the subpopulation-shift benchmark and returns its JSON summary.
#[pyfunction]
#[pyo3(signature = (repeats=20, seed=0))]
fn transfer_bench(py: Python<'_>, repeats: usize, seed: u64) -> PyResult<String> {
    let mut cfg = TransferConfig {
        repeats,
        ..Default::default()
    };
    cfg.design.seed = seed;
    py.detach(|| transfer::run_benchmark(&cfg).and_then(|r| r.summary_json()))
        .map_err(py_err)
}

#[pymodule]
#[pyo3(name = "tiltbench")]
fn tiltbench_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyClassifier>()?;
    m.add_class::<PyTiltParams>()?;
    m.add_class::<PyTiltFit>()?;
    m.add_function(wrap_pyfunction!(fit_eta1, m)?)?;
    m.add_function(wrap_pyfunction!(fit_tilt, m)?)?;
    m.add_function(wrap_pyfunction!(fit_empirical_likelihood, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_with_ci, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_tilt, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_bench, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
