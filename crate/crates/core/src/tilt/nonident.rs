//! Two distinct tilts that induce the same missing-arm marginal.
//!
//! With unit-variance Gaussian components, tilting the observed component
//! `N(mu_{1,y}, I)` by `exp(x . (m - mu_{1,y}))` moves it onto any other
//! unit-variance Gaussian `N(m, I)`. Sending `y=1 -> mu_{0,1}` and
//! `y=0 -> mu_{0,0}` reproduces `p(x | R=0)`; so does the swapped
//! assignment `y=1 -> mu_{0,0}`, `y=0 -> mu_{0,1}` once the intercepts carry
//! the swapped class proportions. Without further restrictions the marginal
//! alone cannot tell the two apart.

use rand::Rng;
use serde::Serialize;

use crate::params::{dot, TiltParams};
use crate::rng::stream_rng;
use crate::synthetic::{gaussian_pdf, group_mean};

const PI_1_GIVEN_1: f64 = 0.4;
const PI_1_GIVEN_0: f64 = 0.6;

#[derive(Debug, Clone, Serialize)]
pub struct NonIdentifiableDemo {
    pub theta_a: TiltParams,
    pub theta_b: TiltParams,
    /// Largest absolute difference of the two tilted mixtures over the grid.
    pub max_density_gap: f64,
    /// Integral of each tilted mixture (should be 1).
    pub integral_a: f64,
    pub integral_b: f64,
}

fn tilt_onto(source_mean: &[f64], target_mean: &[f64], mass_ratio: f64) -> (f64, Vec<f64>) {
    // phi(x; m) = phi(x; s) exp(x.(m - s) - (|m|^2 - |s|^2)/2)
    let beta: Vec<f64> = target_mean.iter().zip(source_mean).map(|(m, s)| m - s).collect();
    let alpha = mass_ratio.ln() - 0.5 * (dot(target_mean, target_mean) - dot(source_mean, source_mean));
    (alpha, beta)
}

/// Observed-arm joint density `p(x, y | R=1)`.
fn observed_joint(x: &[f64], y: bool) -> f64 {
    let prior = if y { PI_1_GIVEN_1 } else { 1.0 - PI_1_GIVEN_1 };
    prior * gaussian_pdf(x, &group_mean(1, y), 1.0)
}

/// `sum_y exp(alpha_y + beta_y . x) p(x, y | R=1)`.
pub fn tilted_mixture(theta: &TiltParams, x: &[f64]) -> f64 {
    [false, true]
        .iter()
        .map(|&y| theta.log_weight(x, y).exp() * observed_joint(x, y))
        .sum()
}

fn integrate_2d(f: impl Fn(&[f64]) -> f64) -> f64 {
    // Trapezoid rule on a wide box; the integrands are Gaussian mixtures so
    // the rule converges geometrically.
    let (lo, hi, m) = (-14.0, 14.0, 1400usize);
    let h = (hi - lo) / m as f64;
    let mut total = 0.0;
    for i in 0..=m {
        let wi = if i == 0 || i == m { 0.5 } else { 1.0 };
        let x0 = lo + i as f64 * h;
        for j in 0..=m {
            let wj = if j == 0 || j == m { 0.5 } else { 1.0 };
            total += wi * wj * f(&[x0, lo + j as f64 * h]);
        }
    }
    total * h * h
}

pub fn demo_nonidentifiable() -> NonIdentifiableDemo {
    let (m11, m10) = (group_mean(1, true), group_mean(1, false));
    let (m01, m00) = (group_mean(0, true), group_mean(0, false));
    let (q1, q0) = (PI_1_GIVEN_1, 1.0 - PI_1_GIVEN_1);
    let (p1, p0) = (PI_1_GIVEN_0, 1.0 - PI_1_GIVEN_0);

    let (a1, b1) = tilt_onto(&m11, &m01, p1 / q1);
    let (a0, b0) = tilt_onto(&m10, &m00, p0 / q0);
    let theta_a = TiltParams {
        alpha0: a0,
        alpha1: a1,
        beta0: b0,
        beta1: b1,
    };
    let (a1, b1) = tilt_onto(&m11, &m00, p0 / q1);
    let (a0, b0) = tilt_onto(&m10, &m01, p1 / q0);
    let theta_b = TiltParams {
        alpha0: a0,
        alpha1: a1,
        beta0: b0,
        beta1: b1,
    };

    let mut rng = stream_rng(2024, 0xde30);
    let mut gap: f64 = 0.0;
    for _ in 0..1000 {
        let x = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        gap = gap.max((tilted_mixture(&theta_a, &x) - tilted_mixture(&theta_b, &x)).abs());
    }
    NonIdentifiableDemo {
        integral_a: integrate_2d(|x| tilted_mixture(&theta_a, x)),
        integral_b: integrate_2d(|x| tilted_mixture(&theta_b, x)),
        theta_a,
        theta_b,
        max_density_gap: gap,
    }
}
