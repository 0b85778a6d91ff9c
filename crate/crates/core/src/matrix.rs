//! Labeled data matrices.
//!
//! [`DataMatrix`] is the shared input type for every pipeline stage: an
//! `m x n` grid of cells where each cell is either a value or a gap, plus
//! row and column labels and a [`MatrixKind`] tag. Matrices are immutable
//! after construction; all operations return new values.
//!
//! The on-disk format is plain CSV: the first row holds column labels
//! (corner cell ignored), the first column holds row labels, an empty cell
//! is a gap, and numbers use `.` as the decimal separator.

use crate::error::{Error, Result};
use crate::DistanceMatrix;
use serde::{Deserialize, Serialize};

/// Which axis of a matrix an operation runs along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Treat each row as one vector / one unit.
    Rows,
    /// Treat each column as one vector / one unit.
    Cols,
}

impl Axis {
    /// The opposite axis.
    pub fn other(self) -> Axis {
        match self {
            Axis::Rows => Axis::Cols,
            Axis::Cols => Axis::Rows,
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Rows => write!(f, "rows"),
            Axis::Cols => write!(f, "cols"),
        }
    }
}

/// Value class of a matrix, fixed at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    /// Every non-gap cell is 0 or 1.
    #[serde(rename = "binary")]
    Binary,
    /// Every non-gap cell belongs to a declared finite code set.
    #[serde(rename = "coded-categorical")]
    Coded,
    /// Arbitrary finite real values.
    #[serde(rename = "real")]
    Real,
}

/// A cell is either a finite value or a gap (`None`).
pub type Cell = Option<f64>;

/// Default code set for coded-categorical matrices.
pub const DEFAULT_CODES: [i64; 4] = [1, 2, 5, 6];

/// An immutable labeled `m x n` matrix of cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    kind: MatrixKind,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    /// Declared code set; `[0,1]` for binary, empty for real matrices.
    codes: Vec<i64>,
    /// Row-major `m x n` cell grid.
    values: Vec<Cell>,
}

/// Validates a label list: non-empty, unique, and free of characters that
/// would break the CSV and Newick writers.
pub(crate) fn check_labels(what: &str, labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::InvalidInput(format!("{what} labels are empty")));
    }
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if l.is_empty() {
            return Err(Error::InvalidInput(format!("empty {what} label")));
        }
        if l.chars().any(|c| {
            c.is_control()
                || c.is_whitespace()
                || matches!(c, ',' | '(' | ')' | ':' | ';' | '"' | '\'' | '[' | ']')
        }) {
            return Err(Error::InvalidInput(format!(
                "{what} label {l:?} contains a reserved character"
            )));
        }
        if !seen.insert(l.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate {what} label {l:?}")));
        }
    }
    Ok(())
}

impl DataMatrix {
    fn build(
        kind: MatrixKind,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        codes: Vec<i64>,
        rows: Vec<Vec<Cell>>,
    ) -> Result<Self> {
        check_labels("row", &row_labels)?;
        check_labels("column", &col_labels)?;
        let (m, n) = (row_labels.len(), col_labels.len());
        if rows.len() != m {
            return Err(Error::InvalidInput(format!(
                "expected {m} rows, got {}",
                rows.len()
            )));
        }
        let mut values = Vec::with_capacity(m * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} cells, expected {n}",
                    row.len()
                )));
            }
            values.extend(row);
        }
        for (idx, cell) in values.iter().enumerate() {
            if let Some(v) = cell {
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "non-finite cell at row {}, col {}",
                        idx / n,
                        idx % n
                    )));
                }
                let ok = match kind {
                    MatrixKind::Binary => *v == 0.0 || *v == 1.0,
                    MatrixKind::Coded => {
                        v.fract() == 0.0 && codes.contains(&(*v as i64))
                    }
                    MatrixKind::Real => true,
                };
                if !ok {
                    return Err(Error::InvalidInput(format!(
                        "cell {v} at row {}, col {} is outside the {kind:?} value set",
                        idx / n,
                        idx % n
                    )));
                }
            }
        }
        Ok(DataMatrix {
            kind,
            row_labels,
            col_labels,
            codes,
            values,
        })
    }

    /// Builds a real-valued matrix.
    ///
    /// # Errors
    /// Rejects ragged rows, bad labels, and non-finite values.
    pub fn real(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        rows: Vec<Vec<Cell>>,
    ) -> Result<Self> {
        Self::build(MatrixKind::Real, row_labels, col_labels, Vec::new(), rows)
    }

    /// Builds a binary matrix (every non-gap cell must be 0 or 1).
    ///
    /// # Errors
    /// Rejects ragged rows, bad labels, and values outside {0,1}.
    pub fn binary(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        rows: Vec<Vec<Cell>>,
    ) -> Result<Self> {
        Self::build(
            MatrixKind::Binary,
            row_labels,
            col_labels,
            vec![0, 1],
            rows,
        )
    }

    /// Builds a coded-categorical matrix over the given code set
    /// (pass [`DEFAULT_CODES`] for the usual `{1,2,5,6}` coding).
    ///
    /// # Errors
    /// Rejects ragged rows, bad labels, an empty or duplicated code set,
    /// and cells outside the code set.
    pub fn coded(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        rows: Vec<Vec<Cell>>,
        codes: &[i64],
    ) -> Result<Self> {
        let mut sorted = codes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() || sorted.len() != codes.len() {
            return Err(Error::InvalidInput(
                "code set must be non-empty and free of duplicates".into(),
            ));
        }
        Self::build(MatrixKind::Coded, row_labels, col_labels, sorted, rows)
    }

    /// Number of rows.
    pub fn n_rows(&self) -> usize {
        self.row_labels.len()
    }

    /// Number of columns.
    pub fn n_cols(&self) -> usize {
        self.col_labels.len()
    }

    /// Length of the given axis.
    pub fn axis_len(&self, axis: Axis) -> usize {
        match axis {
            Axis::Rows => self.n_rows(),
            Axis::Cols => self.n_cols(),
        }
    }

    /// Value class of this matrix.
    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    /// Declared code set (sorted); empty for real matrices.
    pub fn codes(&self) -> &[i64] {
        &self.codes
    }

    /// Row labels.
    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    /// Column labels.
    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// Labels along the given axis.
    pub fn axis_labels(&self, axis: Axis) -> &[String] {
        match axis {
            Axis::Rows => &self.row_labels,
            Axis::Cols => &self.col_labels,
        }
    }

    /// Cell at `(row, col)`; `None` is a gap.
    pub fn get(&self, row: usize, col: usize) -> Cell {
        self.values[row * self.n_cols() + col]
    }

    /// True if any cell is a gap.
    pub fn has_gaps(&self) -> bool {
        self.values.iter().any(|c| c.is_none())
    }

    /// The `index`-th vector along `axis`, with gaps preserved.
    pub fn axis_cells(&self, axis: Axis, index: usize) -> Vec<Cell> {
        match axis {
            Axis::Rows => (0..self.n_cols()).map(|j| self.get(index, j)).collect(),
            Axis::Cols => (0..self.n_rows()).map(|i| self.get(i, index)).collect(),
        }
    }

    /// Parses the CSV matrix format (see module docs).
    ///
    /// The kind is inferred from the values: everything in {0,1} is
    /// binary; otherwise all-integer values inside the default code set
    /// `{1,2,5,6}` are coded-categorical; anything else is real.
    ///
    /// # Errors
    /// Reports malformed numbers, ragged rows, and duplicate labels with
    /// 1-based line numbers.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty matrix file".into(),
        })?;
        let header_cells: Vec<&str> = header.trim_end_matches('\r').split(',').collect();
        if header_cells.len() < 2 {
            return Err(Error::Parse {
                line: 1,
                msg: "header must contain at least one column label".into(),
            });
        }
        let col_labels: Vec<String> = header_cells[1..]
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        let n = col_labels.len();
        let mut row_labels = Vec::new();
        let mut rows: Vec<Vec<Cell>> = Vec::new();
        for (lineno, line) in lines {
            let cells: Vec<&str> = line.trim_end_matches('\r').split(',').collect();
            if cells.len() != n + 1 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected {} cells, found {}", n + 1, cells.len()),
                });
            }
            row_labels.push(cells[0].trim().to_string());
            let mut row = Vec::with_capacity(n);
            for cell in &cells[1..] {
                let cell = cell.trim();
                if cell.is_empty() {
                    row.push(None);
                } else {
                    let v: f64 = cell.parse().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        msg: format!("bad number {cell:?}"),
                    })?;
                    row.push(Some(v));
                }
            }
            rows.push(row);
        }
        let present: Vec<f64> = rows.iter().flatten().filter_map(|c| *c).collect();
        let all_binary = !present.is_empty() && present.iter().all(|v| *v == 0.0 || *v == 1.0);
        let all_default_coded = !present.is_empty()
            && present
                .iter()
                .all(|v| v.fract() == 0.0 && DEFAULT_CODES.contains(&(*v as i64)));
        if all_binary {
            Self::binary(row_labels, col_labels, rows)
        } else if all_default_coded {
            Self::coded(row_labels, col_labels, rows, &DEFAULT_CODES)
        } else {
            Self::real(row_labels, col_labels, rows)
        }
    }

    /// Serializes to the CSV matrix format. Integral kinds print without a
    /// decimal point; real values use the shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push(',');
        out.push_str(&self.col_labels.join(","));
        out.push('\n');
        for i in 0..self.n_rows() {
            out.push_str(&self.row_labels[i]);
            for j in 0..self.n_cols() {
                out.push(',');
                if let Some(v) = self.get(i, j) {
                    match self.kind {
                        MatrixKind::Real => out.push_str(&format!("{v}")),
                        _ => out.push_str(&format!("{}", v as i64)),
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Maps every row of a real matrix through its own rank transform.
///
/// Values become `(rank - 1) / (count - 1)` in `[0,1]`, ties receive the
/// average of their ranks, and constant rows map to all-0. Binary and
/// coded-categorical matrices pass through unchanged, and gaps stay gaps
/// (ranks are computed over the non-gap cells of each row).
///
/// # Errors
/// Never fails on a constructed [`DataMatrix`] (non-finite cells are
/// rejected at construction).
pub fn rank_normalize(m: &DataMatrix) -> Result<DataMatrix> {
    if m.kind != MatrixKind::Real {
        return Ok(m.clone());
    }
    let n = m.n_cols();
    let mut rows: Vec<Vec<Cell>> = Vec::with_capacity(m.n_rows());
    for i in 0..m.n_rows() {
        let cells = m.axis_cells(Axis::Rows, i);
        let observed: Vec<(usize, f64)> = cells
            .iter()
            .enumerate()
            .filter_map(|(j, c)| c.map(|v| (j, v)))
            .collect();
        let count = observed.len();
        let mut out = vec![None; n];
        if count <= 1 {
            for (j, _) in &observed {
                out[*j] = Some(0.0);
            }
            rows.push(out);
            continue;
        }
        // Average rank per value: sort, then share ranks inside tie groups.
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by(|a, b| observed[*a].1.total_cmp(&observed[*b].1));
        let mut ranks = vec![0.0; count];
        let mut s = 0;
        while s < count {
            let mut e = s;
            while e + 1 < count && observed[order[e + 1]].1 == observed[order[s]].1 {
                e += 1;
            }
            // 1-based ranks s+1 ..= e+1 averaged over the tie group.
            let avg = (s + 1 + e + 1) as f64 / 2.0;
            for k in s..=e {
                ranks[order[k]] = avg;
            }
            s = e + 1;
        }
        let constant = observed.iter().all(|(_, v)| *v == observed[0].1);
        for (k, (j, _)) in observed.iter().enumerate() {
            out[*j] = Some(if constant {
                0.0
            } else {
                (ranks[k] - 1.0) / (count as f64 - 1.0)
            });
        }
        rows.push(out);
    }
    DataMatrix::real(m.row_labels.clone(), m.col_labels.clone(), rows)
}

/// Euclidean distances between the vectors along `axis`.
///
/// # Errors
/// Fails on gap cells (only the aligned-sequence path handles gaps) and
/// when the chosen axis has fewer than two vectors.
pub fn pairwise_euclidean(m: &DataMatrix, axis: Axis) -> Result<DistanceMatrix> {
    if m.has_gaps() {
        return Err(Error::InvalidInput(
            "matrix has gap cells; distances need fully observed data".into(),
        ));
    }
    let n = m.axis_len(axis);
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 vectors along {axis}, found {n}"
        )));
    }
    let vectors: Vec<Vec<f64>> = (0..n)
        .map(|i| m.axis_cells(axis, i).into_iter().map(|c| c.unwrap()).collect())
        .collect();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = euclidean(&vectors[i], &vectors[j]);
            d[i * n + j] = dist;
            d[j * n + i] = dist;
        }
    }
    DistanceMatrix::from_raw(m.axis_labels(axis).to_vec(), d)
}

/// Plain Euclidean distance between two equal-length vectors.
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Recodes a real matrix into `n_bins` equal-frequency bins (bin indices
/// `0..n_bins` become the category codes). Bin edges are global quantiles
/// over all non-gap cells, so ties always land in the same bin. Used to
/// make real matrices digestible by the categorical energy measure.
///
/// # Errors
/// Requires a real matrix, `n_bins >= 2`, and at least one non-gap cell.
pub fn discretize_equal_frequency(m: &DataMatrix, n_bins: usize) -> Result<DataMatrix> {
    if m.kind() != MatrixKind::Real {
        return Err(Error::InvalidInput(
            "only real matrices are discretized; categorical input is already coded".into(),
        ));
    }
    if n_bins < 2 {
        return Err(Error::InvalidInput("need at least 2 bins".into()));
    }
    let mut sorted: Vec<f64> = (0..m.n_rows())
        .flat_map(|i| m.axis_cells(Axis::Rows, i))
        .flatten()
        .collect();
    if sorted.is_empty() {
        return Err(Error::InvalidInput("matrix is all gaps".into()));
    }
    sorted.sort_by(f64::total_cmp);
    // Inclusive upper edge of bin k-1: the last sorted value belonging to
    // it, so a value v lands in bin |{edges e : e < v}|.
    let edges: Vec<f64> = (1..n_bins)
        .map(|k| sorted[(k * sorted.len() / n_bins).saturating_sub(1)])
        .collect();
    let codes: Vec<i64> = (0..n_bins as i64).collect();
    let rows: Vec<Vec<Cell>> = (0..m.n_rows())
        .map(|i| {
            m.axis_cells(Axis::Rows, i)
                .into_iter()
                .map(|c| {
                    c.map(|v| {
                        let bin = edges.iter().filter(|e| v > **e).count();
                        bin as f64
                    })
                })
                .collect()
        })
        .collect();
    DataMatrix::coded(m.row_labels.clone(), m.col_labels.clone(), rows, &codes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn real_from(rows: &[&[f64]]) -> DataMatrix {
        DataMatrix::real(
            labels("r", rows.len()),
            labels("c", rows[0].len()),
            rows.iter()
                .map(|r| r.iter().map(|v| Some(*v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rank_normalize_simple_row() {
        let m = real_from(&[&[10.0, 20.0, 30.0]]);
        let out = rank_normalize(&m).unwrap();
        assert_eq!(out.get(0, 0), Some(0.0));
        assert_eq!(out.get(0, 1), Some(0.5));
        assert_eq!(out.get(0, 2), Some(1.0));
    }

    #[test]
    fn rank_normalize_passes_binary_through() {
        let m = DataMatrix::binary(
            labels("r", 1),
            labels("c", 4),
            vec![vec![Some(0.0), Some(1.0), Some(1.0), Some(0.0)]],
        )
        .unwrap();
        let out = rank_normalize(&m).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn rank_normalize_constant_row_is_zero() {
        let m = real_from(&[&[7.0, 7.0, 7.0]]);
        let out = rank_normalize(&m).unwrap();
        for j in 0..3 {
            assert_eq!(out.get(0, j), Some(0.0));
        }
    }

    #[test]
    fn rank_normalize_average_ranks_for_ties() {
        // Ranks of [1,1,2] are {1.5, 1.5, 3}; scaled: (r-1)/2.
        let m = real_from(&[&[1.0, 1.0, 2.0]]);
        let out = rank_normalize(&m).unwrap();
        assert_relative_eq!(out.get(0, 0).unwrap(), 0.25);
        assert_relative_eq!(out.get(0, 1).unwrap(), 0.25);
        assert_relative_eq!(out.get(0, 2).unwrap(), 1.0);
    }

    #[test]
    fn rank_normalize_is_idempotent() {
        let m = real_from(&[&[3.0, 1.0, 4.0, 1.0, 5.0], &[9.0, 2.0, 6.0, 5.0, 3.0]]);
        let once = rank_normalize(&m).unwrap();
        let twice = rank_normalize(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn euclidean_three_four_five() {
        let m = real_from(&[&[0.0, 0.0], &[3.0, 4.0]]);
        let d = pairwise_euclidean(&m, Axis::Rows).unwrap();
        assert_relative_eq!(d.get(0, 1), 5.0);
    }

    #[test]
    fn euclidean_identical_rows_are_zero() {
        let m = real_from(&[&[1.0, 2.0], &[1.0, 2.0]]);
        let d = pairwise_euclidean(&m, Axis::Rows).unwrap();
        assert_eq!(d.get(0, 1), 0.0);
    }

    #[test]
    fn euclidean_matches_brute_force() {
        // Independent oracle: element-by-element sum of squares.
        let rows: Vec<Vec<f64>> = vec![
            vec![0.5, -1.25],
            vec![2.0, 3.5],
            vec![-0.75, 0.25],
        ];
        let m = real_from(&[&rows[0], &rows[1], &rows[2]]);
        let d = pairwise_euclidean(&m, Axis::Rows).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut ss = 0.0;
                for k in 0..2 {
                    ss += (rows[i][k] - rows[j][k]).powi(2);
                }
                assert_relative_eq!(d.get(i, j), ss.sqrt());
            }
        }
    }

    #[test]
    fn euclidean_rejects_single_vector_axis() {
        let m = real_from(&[&[1.0, 2.0, 3.0]]);
        assert!(pairwise_euclidean(&m, Axis::Rows).is_err());
        assert!(pairwise_euclidean(&m, Axis::Cols).is_ok());
    }

    #[test]
    fn csv_round_trip_with_gap() {
        let text = ",c0,c1\nr0,1,\nr1,0,1\n";
        let m = DataMatrix::from_csv(text).unwrap();
        assert_eq!(m.kind(), MatrixKind::Binary);
        assert_eq!(m.get(0, 1), None);
        assert_eq!(m.to_csv(), text);
        assert_eq!(DataMatrix::from_csv(&m.to_csv()).unwrap(), m);
    }

    #[test]
    fn csv_kind_sniffing() {
        let coded = DataMatrix::from_csv(",c0,c1\nr0,1,6\nr1,5,2\n").unwrap();
        assert_eq!(coded.kind(), MatrixKind::Coded);
        assert_eq!(coded.codes(), &[1, 2, 5, 6]);
        let real = DataMatrix::from_csv(",c0,c1\nr0,1.5,6\nr1,5,2\n").unwrap();
        assert_eq!(real.kind(), MatrixKind::Real);
    }

    #[test]
    fn csv_reports_line_numbers() {
        let err = DataMatrix::from_csv(",c0,c1\nr0,1,2\nr1,x,2\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(DataMatrix::from_csv(",c0,c0\nr0,1,2\n").is_err());
    }

    #[test]
    fn discretize_bins_are_equal_frequency() {
        let m = real_from(&[&[1.0, 2.0, 3.0, 4.0], &[5.0, 6.0, 7.0, 8.0]]);
        let out = discretize_equal_frequency(&m, 4).unwrap();
        assert_eq!(out.kind(), MatrixKind::Coded);
        // 8 values into 4 bins: 2 per bin.
        let mut counts = [0usize; 4];
        for i in 0..2 {
            for j in 0..4 {
                counts[out.get(i, j).unwrap() as usize] += 1;
            }
        }
        assert_eq!(counts, [2, 2, 2, 2]);
    }
}
