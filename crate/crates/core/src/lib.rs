//! Exponential-tilt estimation for binary outcomes missing not at random.
//!
//! The density ratio between the missing and observed arms is modelled as
//! `omega(x, y) = exp(alpha_y + beta_y . T(x))`. The crate fits the tilt by
//! constrained KL matching ([`tilt::exponentiated_gradient`]) or by empirical
//! likelihood ([`tilt::fit_empirical_likelihood`]), then plugs it into
//! weighting, outcome-regression and doubly robust estimators of means over
//! the missing arm ([`estimators`]). [`synthetic`] and [`transfer`] hold the
//! simulation designs and the subpopulation-shift benchmark.

pub mod classifier;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod estimators;
pub mod features;
pub mod fmt;
pub mod params;
pub mod rng;
pub mod stats;
pub mod synthetic;
pub mod tilt;
pub mod transfer;

pub use classifier::{fit_eta1, fit_logistic, ClassifierConfig, LogisticModel, ProbClassifier, TrainingSpec};
pub use dataset::{load_csv, save_csv, split_dataset, MnarDataset, PiR, Validation};
pub use error::{Result, TiltError};
pub use estimators::{EstimateReport, Estimand, MeanFunctional, Method};
pub use features::{FeatureKind, FeatureMap};
pub use params::TiltParams;
pub use tilt::{ElConfig, TiltFitConfig, TiltFitResult};
