//! Estimation of the tilt parameters.

pub mod empirical;
pub mod expgrad;
pub mod nonident;
pub mod objective;

pub use empirical::{fit_empirical_likelihood, fit_empirical_likelihood_problem, ElConfig, ElFit};
pub use expgrad::{
    exponentiated_gradient, exponentiated_gradient_problem, DualState, TiltFitConfig, TiltFitResult, TraceRow,
};
pub use nonident::{demo_nonidentifiable, NonIdentifiableDemo};
pub use objective::{constraint_gn, gradients, objective_fn, profile_likelihood, TiltEval, TiltProblem, EXP_CAP};
