//! Sufficient-statistic feature maps `t = T(x)`.
//!
//! Two families are supported: the identity map and the polynomial map of a
//! given total degree. Polynomial monomials are listed in graded
//! lexicographic order (all degree-1 terms, then all degree-2 terms, ...),
//! each degree block enumerating non-decreasing index tuples
//! `i1 <= i2 <= ... <= ik` lexicographically. The constant monomial is
//! excluded because every model carrying a feature map has its own
//! intercept.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TiltError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    Identity,
    Polynomial { degree: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FeatureMapRepr", into = "FeatureMapRepr")]
pub struct FeatureMap {
    kind: FeatureKind,
    input_dim: usize,
    // Index tuples, one per output coordinate.
    monomials: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct FeatureMapRepr {
    #[serde(flatten)]
    kind: FeatureKind,
    input_dim: usize,
}

impl TryFrom<FeatureMapRepr> for FeatureMap {
    type Error = TiltError;

    fn try_from(r: FeatureMapRepr) -> Result<Self> {
        match r.kind {
            FeatureKind::Identity => FeatureMap::identity(r.input_dim),
            FeatureKind::Polynomial { degree } => FeatureMap::polynomial(r.input_dim, degree),
        }
    }
}

impl From<FeatureMap> for FeatureMapRepr {
    fn from(fm: FeatureMap) -> Self {
        FeatureMapRepr {
            kind: fm.kind,
            input_dim: fm.input_dim,
        }
    }
}

impl FeatureMap {
    pub fn identity(input_dim: usize) -> Result<Self> {
        if input_dim == 0 {
            return Err(TiltError::InvalidArgument("input dimension must be >= 1".into()));
        }
        Ok(FeatureMap {
            kind: FeatureKind::Identity,
            input_dim,
            monomials: (0..input_dim).map(|i| vec![i]).collect(),
        })
    }

    pub fn polynomial(input_dim: usize, degree: usize) -> Result<Self> {
        if input_dim == 0 {
            return Err(TiltError::InvalidArgument("input dimension must be >= 1".into()));
        }
        if degree == 0 {
            return Err(TiltError::InvalidArgument("polynomial degree must be >= 1".into()));
        }
        let mut monomials = Vec::new();
        for k in 1..=degree {
            let mut current = Vec::with_capacity(k);
            push_tuples(input_dim, k, 0, &mut current, &mut monomials);
        }
        Ok(FeatureMap {
            kind: FeatureKind::Polynomial { degree },
            input_dim,
            monomials,
        })
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.output_dim()];
        self.apply_into(x, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(TiltError::DimensionMismatch {
                expected: self.input_dim,
                got: x.len(),
            });
        }
        debug_assert_eq!(out.len(), self.output_dim());
        if let FeatureKind::Identity = self.kind {
            out.copy_from_slice(x);
            return Ok(());
        }
        for (o, mono) in out.iter_mut().zip(&self.monomials) {
            *o = mono.iter().map(|&i| x[i]).product();
        }
        Ok(())
    }

    /// Applies the map to every row of a row-major `n x d` matrix and returns
    /// a row-major `n x p` matrix.
    pub fn apply_rows(&self, rows: &[f64]) -> Result<Vec<f64>> {
        let d = self.input_dim;
        if rows.len() % d != 0 {
            return Err(TiltError::DimensionMismatch {
                expected: d,
                got: rows.len() % d,
            });
        }
        let p = self.output_dim();
        let n = rows.len() / d;
        let mut out = vec![0.0; n * p];
        for (x, t) in rows.chunks_exact(d).zip(out.chunks_exact_mut(p)) {
            self.apply_into(x, t)?;
        }
        Ok(out)
    }
}

fn push_tuples(d: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    for i in start..d {
        current.push(i);
        push_tuples(d, k, i, current, out);
        current.pop();
    }
}
