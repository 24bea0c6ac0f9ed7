//! Helpers shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use tiltbench::{MnarDataset, TiltParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random dataset with at least one row in each arm.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> MnarDataset {
    assert!(n >= 2);
    let cov: Vec<f64> = (0..n * dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let mut rs: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < 0.5).collect();
    rs[0] = true;
    rs[1] = false;
    let ys: Vec<bool> = rs.iter().map(|&r| r && rng.random::<f64>() < 0.5).collect();
    MnarDataset::new(cov, dim, ys, rs).unwrap()
}

pub fn random_theta(rng: &mut ChaCha8Rng, p: usize, scale: f64) -> TiltParams {
    let v: Vec<f64> = (0..2 + 2 * p).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
    TiltParams::from_slice(&v).unwrap()
}

pub fn random_probs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.05..0.95)).collect()
}

/// Central finite differences.
pub fn fd_grad(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut v = x.to_vec();
    (0..x.len())
        .map(|j| {
            v[j] = x[j] + h;
            let up = f(&v);
            v[j] = x[j] - h;
            let down = f(&v);
            v[j] = x[j];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `|a - b|_inf / max(|a|_inf, |b|_inf)`.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = inf(a).max(inf(b));
    if scale == 0.0 {
        0.0
    } else {
        inf(&diff) / scale
    }
}
