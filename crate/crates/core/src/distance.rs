//! Symmetric distance matrices and the ultrametric check.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An immutable `n x n` symmetric matrix of non-negative finite distances
/// with a zero diagonal and one label per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    /// Row-major `n x n`; kept exactly symmetric by construction.
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from a full row-major grid.
    ///
    /// Symmetry is required within `1e-9`; the stored matrix mirrors the
    /// upper triangle so lookups are exactly symmetric afterwards. The
    /// diagonal must be zero within `1e-12` and is stored as exactly 0.
    ///
    /// # Errors
    /// Rejects non-square input, asymmetry, negative, non-finite, or
    /// nonzero-diagonal entries, and bad labels.
    pub fn from_raw(labels: Vec<String>, d: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        crate::matrix::DataMatrix::real(
            labels.clone(),
            labels.clone(),
            vec![vec![Some(0.0); n]; n],
        )?; // label validation only; reuses the matrix label rules
        if d.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "distance grid has {} entries, expected {}",
                d.len(),
                n * n
            )));
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let dii = d[i * n + i];
            if dii.abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "diagonal entry d[{i}][{i}] = {dii} must be 0"
                )));
            }
            for j in (i + 1)..n {
                let (a, b) = (d[i * n + j], d[j * n + i]);
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "distance d[{i}][{j}] = {a} must be finite and >= 0"
                    )));
                }
                if (a - b).abs() > 1e-9 {
                    return Err(Error::InvalidInput(format!(
                        "asymmetric distances d[{i}][{j}]={a} vs d[{j}][{i}]={b}"
                    )));
                }
                out[i * n + j] = a;
                out[j * n + i] = a;
            }
        }
        Ok(DistanceMatrix { labels, d: out })
    }

    /// Builds from a pairwise function over `0..n` (called once per `i<j`).
    ///
    /// # Errors
    /// Same value checks as [`DistanceMatrix::from_raw`].
    pub fn from_fn(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = labels.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Self::from_raw(labels, d)
    }

    /// Number of points.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Point labels.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Distance between points `i` and `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n() + j]
    }

    /// Largest off-diagonal distance (0 for n < 2).
    pub fn max(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n() {
            for j in (i + 1)..self.n() {
                m = m.max(self.get(i, j));
            }
        }
        m
    }

    /// Median of the off-diagonal distances (0 for n < 2).
    pub fn median_off_diagonal(&self) -> f64 {
        let mut v: Vec<f64> = Vec::new();
        for i in 0..self.n() {
            for j in (i + 1)..self.n() {
                v.push(self.get(i, j));
            }
        }
        if v.is_empty() {
            return 0.0;
        }
        v.sort_by(f64::total_cmp);
        if v.len() % 2 == 1 {
            v[v.len() / 2]
        } else {
            (v[v.len() / 2 - 1] + v[v.len() / 2]) / 2.0
        }
    }

    /// Parses the labeled CSV distance format (same layout as data
    /// matrices; row and column labels must agree).
    ///
    /// # Errors
    /// Propagates CSV parse errors and all structural checks.
    pub fn from_csv(text: &str) -> Result<Self> {
        let m = crate::matrix::DataMatrix::from_csv(text)?;
        if m.row_labels() != m.col_labels() {
            return Err(Error::InvalidInput(
                "distance CSV must have identical row and column labels".into(),
            ));
        }
        let n = m.n_rows();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = m.get(i, j).ok_or_else(|| {
                    Error::InvalidInput(format!("gap cell at row {i}, col {j} in distance CSV"))
                })?;
            }
        }
        Self::from_raw(m.row_labels().to_vec(), d)
    }

    /// Serializes to labeled CSV (shortest round-trip float form).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push(',');
        out.push_str(&self.labels.join(","));
        out.push('\n');
        for i in 0..self.n() {
            out.push_str(&self.labels[i]);
            for j in 0..self.n() {
                out.push(',');
                out.push_str(&format!("{}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// Checks the super-triangular (ultrametric) inequality on every triple.
///
/// Returns `(flag, violations)`: `flag` is true iff, for every triple of
/// points, the two largest of its three pairwise distances differ by at
/// most `tol`; `violations` counts the failing triples.
///
/// # Errors
/// Needs `n >= 3` and `tol >= 0`.
pub fn is_ultrametric(d: &DistanceMatrix, tol: f64) -> Result<(bool, usize)> {
    if d.n() < 3 {
        return Err(Error::InvalidInput(format!(
            "ultrametric check needs at least 3 points, found {}",
            d.n()
        )));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be >= 0")));
    }
    let mut violations = 0usize;
    for i in 0..d.n() {
        for j in (i + 1)..d.n() {
            for k in (j + 1)..d.n() {
                let mut t = [d.get(i, j), d.get(i, k), d.get(j, k)];
                t.sort_by(f64::total_cmp);
                if t[2] - t[1] > tol {
                    violations += 1;
                }
            }
        }
    }
    Ok((violations == 0, violations))
}
