//! The observed-data container `(X, Y·R, R)` and its CSV representation.
//!
//! CSV layout: header `x1,...,xd,y,r`, one row per unit, LF line endings.
//! The `y` cell may be empty when `r = 0`; missing outcomes are stored as 0.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TiltError};
use crate::fmt::g17;
use crate::rng::stream_rng;

/// How to treat rows that carry an outcome although `r = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Validation {
    #[default]
    Strict,
    /// Zero the outcome and record a warning.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnarDataset {
    covariates: Vec<f64>,
    outcomes: Vec<bool>,
    observed: Vec<bool>,
    dim: usize,
}

/// Estimate `n1 / n` of `P(R = 1)`, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PiR(f64);

impl PiR {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(PiR(value))
        } else {
            Err(TiltError::InvalidArgument(format!(
                "P(R=1) estimate must lie in (0,1), got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl MnarDataset {
    /// Builds a dataset from row-major covariates. Outcomes of rows with
    /// `observed[i] == false` must be `false` (strict validation).
    pub fn new(covariates: Vec<f64>, dim: usize, outcomes: Vec<bool>, observed: Vec<bool>) -> Result<Self> {
        Self::with_validation(covariates, dim, outcomes, observed, Validation::Strict).map(|(ds, _)| ds)
    }

    pub fn with_validation(
        covariates: Vec<f64>,
        dim: usize,
        mut outcomes: Vec<bool>,
        observed: Vec<bool>,
        validation: Validation,
    ) -> Result<(Self, Vec<String>)> {
        if dim == 0 {
            return Err(TiltError::InvalidDataset("covariate dimension must be >= 1".into()));
        }
        let n = outcomes.len();
        if n == 0 {
            return Err(TiltError::InvalidDataset("dataset must have at least one row".into()));
        }
        if observed.len() != n {
            return Err(TiltError::InvalidDataset(format!(
                "{} outcomes but {} missingness indicators",
                n,
                observed.len()
            )));
        }
        if covariates.len() != n * dim {
            return Err(TiltError::InvalidDataset(format!(
                "expected {} covariate entries for n={n}, d={dim}, got {}",
                n * dim,
                covariates.len()
            )));
        }
        if let Some(pos) = covariates.iter().position(|v| !v.is_finite()) {
            return Err(TiltError::InvalidDataset(format!(
                "non-finite covariate in row {}",
                pos / dim
            )));
        }
        let mut warnings = Vec::new();
        for i in 0..n {
            if outcomes[i] && !observed[i] {
                match validation {
                    Validation::Strict => {
                        return Err(TiltError::InvalidDataset(format!(
                            "row {i}: observed outcome with r=0"
                        )))
                    }
                    Validation::Lenient => {
                        outcomes[i] = false;
                        warnings.push(format!("row {i}: observed outcome with r=0 set to 0"));
                    }
                }
            }
        }
        Ok((
            MnarDataset {
                covariates,
                outcomes,
                observed,
                dim,
            },
            warnings,
        ))
    }

    pub fn from_rows(rows: &[Vec<f64>], outcomes: Vec<bool>, observed: Vec<bool>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(TiltError::InvalidDataset("ragged covariate rows".into()));
        }
        Self::new(rows.concat(), dim, outcomes, observed)
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.covariates[i * self.dim..(i + 1) * self.dim]
    }

    pub fn y(&self, i: usize) -> bool {
        self.outcomes[i]
    }

    pub fn r(&self, i: usize) -> bool {
        self.observed[i]
    }

    pub fn covariates(&self) -> &[f64] {
        &self.covariates
    }

    pub fn outcomes(&self) -> &[bool] {
        &self.outcomes
    }

    pub fn observed(&self) -> &[bool] {
        &self.observed
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.covariates.chunks_exact(self.dim)
    }

    pub fn n1(&self) -> usize {
        self.observed.iter().filter(|&&r| r).count()
    }

    pub fn n0(&self) -> usize {
        self.len() - self.n1()
    }

    pub fn pi_r(&self) -> Result<PiR> {
        let n1 = self.n1();
        if n1 == 0 {
            return Err(TiltError::NoObservedRows);
        }
        if n1 == self.len() {
            return Err(TiltError::NoMissingRows);
        }
        PiR::new(n1 as f64 / self.len() as f64)
    }

    /// Fails unless both arms are non-empty.
    pub fn require_both_arms(&self) -> Result<()> {
        if self.n1() == 0 {
            return Err(TiltError::NoObservedRows);
        }
        if self.n0() == 0 {
            return Err(TiltError::NoMissingRows);
        }
        Ok(())
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut cov = Vec::with_capacity(indices.len() * self.dim);
        let mut y = Vec::with_capacity(indices.len());
        let mut r = Vec::with_capacity(indices.len());
        for &i in indices {
            cov.extend_from_slice(self.x(i));
            y.push(self.outcomes[i]);
            r.push(self.observed[i]);
        }
        Self::new(cov, self.dim, y, r)
    }

    /// Rows with `r = 1` as `(covariates, labels)`.
    pub fn observed_part(&self) -> (Vec<f64>, Vec<bool>) {
        let mut cov = Vec::new();
        let mut y = Vec::new();
        for i in 0..self.len() {
            if self.observed[i] {
                cov.extend_from_slice(self.x(i));
                y.push(self.outcomes[i]);
            }
        }
        (cov, y)
    }
}

/// Reads a dataset with strict validation.
pub fn load_csv(path: impl AsRef<Path>) -> Result<MnarDataset> {
    load_csv_with(path, Validation::Strict).map(|(ds, _)| ds)
}

pub fn load_csv_with(path: impl AsRef<Path>, validation: Validation) -> Result<(MnarDataset, Vec<String>)> {
    let path = path.as_ref();
    let io_err = |source| TiltError::Io {
        path: path.to_path_buf(),
        source,
    };
    let text = fs::read_to_string(path).map_err(io_err)?;
    let parse_err = |line: u64, msg: String| TiltError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let ncol = header.len();
    if ncol < 3 {
        return Err(parse_err(1, "header must be x1,...,xd,y,r".into()));
    }
    let dim = ncol - 2;
    for (j, name) in header.iter().enumerate() {
        let expected = match j {
            j if j < dim => format!("x{}", j + 1),
            j if j == dim => "y".to_string(),
            _ => "r".to_string(),
        };
        if name != expected {
            return Err(parse_err(1, format!("header column {} is {name:?}, expected {expected:?}", j + 1)));
        }
    }

    let mut cov = Vec::new();
    let mut ys = Vec::new();
    let mut rs = Vec::new();
    let mut warnings = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, format!("malformed row: {e}"))
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != ncol {
            return Err(parse_err(line, format!("malformed row: expected {ncol} fields, got {}", rec.len())));
        }
        for j in 0..dim {
            let v: f64 = rec[j]
                .parse()
                .map_err(|_| parse_err(line, format!("covariate x{} is not a number: {:?}", j + 1, &rec[j])))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("non-finite covariate x{}", j + 1)));
            }
            cov.push(v);
        }
        let r = match &rec[dim + 1] {
            "0" => false,
            "1" => true,
            other => return Err(parse_err(line, format!("r must be 0 or 1, got {other:?}"))),
        };
        let y = match (&rec[dim], r) {
            ("", true) => return Err(parse_err(line, "y empty while r=1".into())),
            ("", false) | ("0", _) => false,
            ("1", true) => true,
            ("1", false) => match validation {
                Validation::Strict => return Err(parse_err(line, "observed outcome with r=0".into())),
                Validation::Lenient => {
                    warnings.push(format!("{}: line {line}: observed outcome with r=0 set to 0", path.display()));
                    false
                }
            },
            (other, _) => return Err(parse_err(line, format!("y must be 0, 1 or empty, got {other:?}"))),
        };
        ys.push(y);
        rs.push(r);
    }
    if ys.is_empty() {
        return Err(TiltError::NoDataRows(path.to_path_buf()));
    }
    let ds = MnarDataset::new(cov, dim, ys, rs)?;
    Ok((ds, warnings))
}

/// Writes the dataset; missing outcomes are written as empty cells.
pub fn save_csv(ds: &MnarDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| TiltError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    let mut header: Vec<String> = (1..=ds.dim()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    header.push("r".into());
    writeln!(w, "{}", header.join(",")).map_err(io_err)?;
    for i in 0..ds.len() {
        let mut line: Vec<String> = ds.x(i).iter().map(|&v| g17(v)).collect();
        line.push(match (ds.r(i), ds.y(i)) {
            (false, _) => String::new(),
            (true, y) => (y as u8).to_string(),
        });
        line.push((ds.r(i) as u8).to_string());
        writeln!(w, "{}", line.join(",")).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Uniform random partition into `(A, B)` with `|A| = floor(fraction * n)`
/// clamped to `[1, n - 1]`. Row order is preserved inside each part.
pub fn split_dataset(ds: &MnarDataset, fraction: f64, seed: u64) -> Result<(MnarDataset, MnarDataset)> {
    let (a, b) = split_indices(ds.len(), fraction, seed)?;
    Ok((ds.subset(&a)?, ds.subset(&b)?))
}

pub fn split_indices(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(TiltError::InvalidArgument(format!("split fraction must be in (0,1), got {fraction}")));
    }
    if n < 2 {
        return Err(TiltError::InvalidArgument(format!("cannot split {n} rows into two non-empty parts")));
    }
    let size_a = ((fraction * n as f64).floor() as usize).clamp(1, n - 1);
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = stream_rng(seed, 0x5_1171);
    idx.shuffle(&mut rng);
    let (a, b) = idx.split_at(size_a);
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_empty_missing_outcome() {
        let f = write_tmp("x1,x2,y,r\n1.0,2.0,1,1\n0.5,-1.0,,0\n");
        let ds = load_csv(f.path()).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.outcomes(), &[true, false]);
        assert_eq!(ds.observed(), &[true, false]);
        assert_eq!(ds.x(1), &[0.5, -1.0]);
    }

    #[test]
    fn header_only_is_an_error() {
        let f = write_tmp("x1,y,r\n");
        let err = load_csv(f.path()).unwrap_err();
        assert!(err.to_string().contains("no data rows"), "{err}");
    }

    #[test]
    fn outcome_with_r0_strict_and_lenient() {
        let f = write_tmp("x1,y,r\n0.1,1,1\n0.2,1,0\n");
        let err = load_csv(f.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("observed outcome with r=0"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");

        let (ds, warnings) = load_csv_with(f.path(), Validation::Lenient).unwrap();
        assert_eq!(ds.outcomes(), &[true, false]);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn rejects_bad_cells() {
        let cases = [
            ("x1,y,r\n0.1,2,1\n", "y must be"),
            ("x1,y,r\n0.1,1,3\n", "r must be"),
            ("x1,y,r\n0.1,,1\n", "y empty while r=1"),
            ("x1,y,r\nNaN,1,1\n", "non-finite"),
            ("x1,y,r\ninf,1,1\n", "non-finite"),
            ("x1,y,r\nabc,1,1\n", "not a number"),
            ("x1,y,r\n0.1,1\n", "malformed row"),
            ("a,y,r\n0.1,1,1\n", "header"),
        ];
        for (content, needle) in cases {
            let f = write_tmp(content);
            let msg = load_csv(f.path()).unwrap_err().to_string();
            assert!(msg.contains(needle), "{content:?}: {msg}");
        }
    }

    #[test]
    fn save_single_row() {
        let ds = MnarDataset::new(vec![0.25], 1, vec![true], vec![true]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("one.csv");
        save_csv(&ds, &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text, "x1,y,r\n0.25,1,1\n");
    }

    #[test]
    fn save_to_unwritable_path() {
        let ds = MnarDataset::new(vec![0.25], 1, vec![true], vec![true]).unwrap();
        let err = save_csv(&ds, "/nonexistent-dir/sub/out.csv").unwrap_err();
        assert!(matches!(err, TiltError::Io { .. }));
    }

    #[test]
    fn split_even_and_rounding() {
        let ds = MnarDataset::new((0..10).map(f64::from).collect(), 1, vec![false; 10], vec![false; 10]).unwrap();
        let (a, b) = split_dataset(&ds, 0.5, 3).unwrap();
        assert_eq!((a.len(), b.len()), (5, 5));
        let (a2, _) = split_dataset(&ds, 0.5, 3).unwrap();
        assert_eq!(a, a2);
        let (a, b) = split_dataset(&ds, 0.99, 3).unwrap();
        assert_eq!((a.len(), b.len()), (9, 1));
        let (a, b) = split_dataset(&ds, 0.01, 3).unwrap();
        assert_eq!((a.len(), b.len()), (1, 9));
    }

    #[test]
    fn split_too_small() {
        let ds = MnarDataset::new(vec![1.0], 1, vec![false], vec![false]).unwrap();
        assert!(split_dataset(&ds, 0.5, 0).is_err());
        let ds = MnarDataset::new(vec![1.0, 2.0], 1, vec![false; 2], vec![false; 2]).unwrap();
        assert!(split_dataset(&ds, 1.0, 0).is_err());
    }

    #[test]
    fn construction_invariants() {
        assert!(MnarDataset::new(vec![], 1, vec![], vec![]).is_err());
        assert!(MnarDataset::new(vec![1.0], 0, vec![true], vec![true]).is_err());
        assert!(MnarDataset::new(vec![f64::NAN], 1, vec![true], vec![true]).is_err());
        assert!(MnarDataset::new(vec![1.0], 1, vec![true], vec![false]).is_err());
        assert!(MnarDataset::new(vec![1.0, 2.0], 1, vec![true], vec![true]).is_err());
    }

    #[test]
    fn pi_r_requires_both_arms() {
        let ds = MnarDataset::new(vec![1.0, 2.0, 3.0, 4.0], 1, vec![true, false, false, false], vec![true, true, false, false]).unwrap();
        assert_eq!(ds.pi_r().unwrap().value(), 0.5);
        let all_obs = MnarDataset::new(vec![1.0], 1, vec![true], vec![true]).unwrap();
        assert!(matches!(all_obs.pi_r(), Err(TiltError::NoMissingRows)));
        assert!(PiR::new(1.0).is_err());
        assert!(PiR::new(0.0).is_err());
    }
}
