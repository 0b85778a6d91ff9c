//! Python bindings for the `dcgkit` toolkit.
//!
//! Thin wrappers: each class holds one core value and forwards to the
//! Rust API; each function parses plain Python data (lists, strings,
//! numbers) into core types and returns plain data or wrapper objects.
//! Errors surface as `ValueError` (`OSError` for I/O).

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use dcgkit::dcg::{DcgConfig, SharingMatrix, Temperature, WalkParams};
use dcgkit::dm::CouplingConfig;
use dcgkit::mimic::{MarginSpec, MimicMode};
use dcgkit::seqscore::{AlignedSet, ScoringParams};
use dcgkit::{Axis, DataMatrix, DistanceMatrix, Partition};

fn pyerr(e: dcgkit::Error) -> PyErr {
    match e {
        dcgkit::Error::Io(_) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_axis(axis: &str) -> PyResult<Axis> {
    match axis {
        "rows" => Ok(Axis::Rows),
        "cols" | "columns" => Ok(Axis::Cols),
        other => Err(PyValueError::new_err(format!(
            "unknown axis {other:?} (expected \"rows\" or \"cols\")"
        ))),
    }
}

fn parse_partition(assignment: Vec<usize>) -> PyResult<Partition> {
    Partition::from_labels(&assignment).map_err(pyerr)
}

fn parse_grid(grid: Vec<f64>) -> PyResult<Vec<Temperature>> {
    grid.into_iter()
        .map(|t| Temperature::new(t).map_err(pyerr))
        .collect()
}

// ---------------------------------------------------------------------------
// Data carriers.

/// A labeled data matrix (binary, coded-categorical, or real).
#[pyclass(name = "DataMatrix", frozen)]
struct PyDataMatrix {
    inner: DataMatrix,
}

#[pymethods]
impl PyDataMatrix {
    /// Parses the labeled CSV format; the value kind is inferred.
    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(PyDataMatrix {
            inner: DataMatrix::from_csv(text).map_err(pyerr)?,
        })
    }

    /// Builds a real-valued matrix from row-major cells (`None` = gap).
    #[staticmethod]
    fn real(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        rows: Vec<Vec<Option<f64>>>,
    ) -> PyResult<Self> {
        Ok(PyDataMatrix {
            inner: DataMatrix::real(row_labels, col_labels, rows).map_err(pyerr)?,
        })
    }

    /// Builds a 0/1 matrix from row-major cells.
    #[staticmethod]
    fn binary(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        rows: Vec<Vec<Option<f64>>>,
    ) -> PyResult<Self> {
        Ok(PyDataMatrix {
            inner: DataMatrix::binary(row_labels, col_labels, rows).map_err(pyerr)?,
        })
    }

    /// Builds a coded-categorical matrix; `codes` defaults to the
    /// `{1, 2, 5, 6}` letter coding.
    #[staticmethod]
    #[pyo3(signature = (row_labels, col_labels, rows, codes=None))]
    fn coded(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        rows: Vec<Vec<Option<f64>>>,
        codes: Option<Vec<i64>>,
    ) -> PyResult<Self> {
        let codes = codes.unwrap_or_else(|| dcgkit::DEFAULT_CODES.to_vec());
        Ok(PyDataMatrix {
            inner: DataMatrix::coded(row_labels, col_labels, rows, &codes).map_err(pyerr)?,
        })
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    #[getter]
    fn n_cols(&self) -> usize {
        self.inner.n_cols()
    }

    /// `"binary"`, `"coded"`, or `"real"`.
    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner.kind() {
            dcgkit::MatrixKind::Binary => "binary",
            dcgkit::MatrixKind::Coded => "coded",
            dcgkit::MatrixKind::Real => "real",
        }
    }

    #[getter]
    fn row_labels(&self) -> Vec<String> {
        self.inner.row_labels().to_vec()
    }

    #[getter]
    fn col_labels(&self) -> Vec<String> {
        self.inner.col_labels().to_vec()
    }

    /// Cell value, or `None` for a gap.
    fn get(&self, row: usize, col: usize) -> PyResult<Option<f64>> {
        if row >= self.inner.n_rows() || col >= self.inner.n_cols() {
            return Err(PyValueError::new_err(format!(
                "cell ({row}, {col}) outside a {}x{} matrix",
                self.inner.n_rows(),
                self.inner.n_cols()
            )));
        }
        Ok(self.inner.get(row, col))
    }

    /// All cells, row-major.
    fn rows(&self) -> Vec<Vec<Option<f64>>> {
        (0..self.inner.n_rows())
            .map(|i| (0..self.inner.n_cols()).map(|j| self.inner.get(i, j)).collect())
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "DataMatrix({}x{}, kind={:?})",
            self.inner.n_rows(),
            self.inner.n_cols(),
            self.kind()
        )
    }
}

/// A labeled symmetric distance matrix with zero diagonal.
#[pyclass(name = "DistanceMatrix", frozen)]
struct PyDistanceMatrix {
    inner: DistanceMatrix,
}

#[pymethods]
impl PyDistanceMatrix {
    /// Parses the labeled square CSV format.
    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(PyDistanceMatrix {
            inner: DistanceMatrix::from_csv(text).map_err(pyerr)?,
        })
    }

    /// Builds from labels and a full square of distances.
    #[staticmethod]
    fn from_rows(labels: Vec<String>, rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err(format!(
                "expected a {n}x{n} grid of distances"
            )));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Ok(PyDistanceMatrix {
            inner: DistanceMatrix::from_raw(labels, flat).map_err(pyerr)?,
        })
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        if i >= self.inner.n() || j >= self.inner.n() {
            return Err(PyValueError::new_err(format!(
                "entry ({i}, {j}) outside a {0}x{0} matrix",
                self.inner.n()
            )));
        }
        Ok(self.inner.get(i, j))
    }

    fn __repr__(&self) -> String {
        format!("DistanceMatrix(n={})", self.inner.n())
    }
}

/// A multi-level tree over a named leaf set (levels coarse to fine).
#[pyclass(name = "ClusterTree", frozen)]
struct PyClusterTree {
    inner: dcgkit::ClusterTree,
}

#[pymethods]
impl PyClusterTree {
    #[staticmethod]
    fn from_newick(text: &str) -> PyResult<Self> {
        Ok(PyClusterTree {
            inner: dcgkit::ClusterTree::from_newick(text).map_err(pyerr)?,
        })
    }

    fn to_newick(&self) -> String {
        self.inner.to_newick()
    }

    #[getter]
    fn leaves(&self) -> Vec<String> {
        self.inner.leaves().to_vec()
    }

    #[getter]
    fn n_levels(&self) -> usize {
        self.inner.levels().len()
    }

    /// `(height, assignment)` per level, coarse to fine.
    fn levels(&self) -> Vec<(f64, Vec<usize>)> {
        self.inner
            .levels()
            .iter()
            .map(|l| (l.height, l.partition.assignment().to_vec()))
            .collect()
    }

    /// Cluster assignment at one level (0 = coarsest).
    fn cut(&self, level: usize) -> PyResult<Vec<usize>> {
        dcgkit::cut_partition(&self.inner, level)
            .map(|p| p.assignment().to_vec())
            .map_err(pyerr)
    }

    /// Leaf indices ordered so every cluster of every level is contiguous.
    fn grouped_leaf_order(&self) -> Vec<usize> {
        self.inner.grouped_leaf_order()
    }

    /// Cophenetic distances (height of the finest level joining each pair).
    fn cophenetic(&self) -> PyResult<PyDistanceMatrix> {
        Ok(PyDistanceMatrix {
            inner: self.inner.cophenetic().map_err(pyerr)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "ClusterTree({} leaves, {} levels)",
            self.inner.n_leaves(),
            self.inner.levels().len()
        )
    }
}

/// Output of the scale sweep: tree, profile, and selection diagnostics.
#[pyclass(name = "DcgRun", frozen)]
struct PyDcgRun {
    inner: dcgkit::dcg::DcgRun,
}

#[pymethods]
impl PyDcgRun {
    #[getter]
    fn tree(&self) -> PyClusterTree {
        PyClusterTree {
            inner: self.inner.tree.clone(),
        }
    }

    /// True when no scale qualified and the tree fell back to one level.
    #[getter]
    fn degenerate_selection(&self) -> bool {
        self.inner.degenerate_selection
    }

    /// `(grid_index, temperature, cluster_count)` per selected scale,
    /// coarse to fine.
    #[getter]
    fn selected(&self) -> Vec<(usize, f64, usize)> {
        self.inner
            .selected
            .iter()
            .map(|s| (s.grid_index, s.temperature.value(), s.cluster_count))
            .collect()
    }

    /// The swept temperature grid.
    #[getter]
    fn grid(&self) -> Vec<f64> {
        self.inner.profile.grid().iter().map(|t| t.value()).collect()
    }

    /// Cluster count per grid point.
    #[getter]
    fn counts(&self) -> Vec<usize> {
        self.inner.profile.counts().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "DcgRun({} grid points, {} selected, degenerate={})",
            self.inner.profile.grid().len(),
            self.inner.selected.len(),
            self.inner.degenerate_selection
        )
    }
}

/// Output of the coupled row/column clustering loop.
#[pyclass(name = "CoupleResult", frozen)]
struct PyCoupleResult {
    row_tree: dcgkit::ClusterTree,
    col_tree: dcgkit::ClusterTree,
    iterations: usize,
    stable: bool,
}

#[pymethods]
impl PyCoupleResult {
    #[getter]
    fn row_tree(&self) -> PyClusterTree {
        PyClusterTree {
            inner: self.row_tree.clone(),
        }
    }

    #[getter]
    fn col_tree(&self) -> PyClusterTree {
        PyClusterTree {
            inner: self.col_tree.clone(),
        }
    }

    /// Full coupling iterations executed.
    #[getter]
    fn iterations(&self) -> usize {
        self.iterations
    }

    /// True when the bottom partitions repeated and the loop stopped early.
    #[getter]
    fn stable(&self) -> bool {
        self.stable
    }

    fn __repr__(&self) -> String {
        format!(
            "CoupleResult(iterations={}, stable={})",
            self.iterations, self.stable
        )
    }
}

// ---------------------------------------------------------------------------
// Matrix preparation.

/// Maps every column to average ranks scaled into [0, 1].
#[pyfunction]
#[pyo3(name = "rank_normalize")]
fn py_rank_normalize(m: PyRef<'_, PyDataMatrix>) -> PyResult<PyDataMatrix> {
    Ok(PyDataMatrix {
        inner: dcgkit::rank_normalize(&m.inner).map_err(pyerr)?,
    })
}

/// Euclidean distances between rows (or columns) of a matrix.
#[pyfunction]
#[pyo3(name = "pairwise_euclidean", signature = (m, axis="rows"))]
fn py_pairwise_euclidean(m: PyRef<'_, PyDataMatrix>, axis: &str) -> PyResult<PyDistanceMatrix> {
    Ok(PyDistanceMatrix {
        inner: dcgkit::pairwise_euclidean(&m.inner, parse_axis(axis)?).map_err(pyerr)?,
    })
}

/// `(is_ultrametric, violating_triples)` of a distance matrix at `tol`.
#[pyfunction]
#[pyo3(name = "is_ultrametric", signature = (d, tol=0.0))]
fn py_is_ultrametric(d: PyRef<'_, PyDistanceMatrix>, tol: f64) -> PyResult<(bool, usize)> {
    dcgkit::is_ultrametric(&d.inner, tol).map_err(pyerr)
}

/// Adjusted Rand index between two assignments of the same point set.
#[pyfunction]
#[pyo3(name = "adjusted_rand_index")]
fn py_adjusted_rand_index(a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    dcgkit::adjusted_rand_index(&parse_partition(a)?, &parse_partition(b)?).map_err(pyerr)
}

/// The bundled 100-animal binary attribute matrix.
#[pyfunction]
#[pyo3(name = "zoo_matrix")]
fn py_zoo_matrix() -> PyResult<PyDataMatrix> {
    Ok(PyDataMatrix {
        inner: dcgkit::data::zoo_matrix().map_err(pyerr)?,
    })
}

// ---------------------------------------------------------------------------
// Scale-sweep clustering.

/// Log-spaced scale grid from `lo` to `hi` inclusive.
#[pyfunction]
#[pyo3(name = "log_grid")]
fn py_log_grid(lo: f64, hi: f64, count: usize) -> PyResult<Vec<f64>> {
    Ok(dcgkit::dcg::log_grid(lo, hi, count)
        .map_err(pyerr)?
        .into_iter()
        .map(Temperature::value)
        .collect())
}

/// Default scale grid spanning a distance matrix's own range.
#[pyfunction]
#[pyo3(name = "default_grid")]
fn py_default_grid(d: PyRef<'_, PyDistanceMatrix>, count: usize) -> PyResult<Vec<f64>> {
    Ok(dcgkit::dcg::default_grid(&d.inner, count)
        .map_err(pyerr)?
        .into_iter()
        .map(Temperature::value)
        .collect())
}

/// Full scale sweep: profile, scale selection, and tree assembly.
#[pyfunction]
#[pyo3(
    name = "dcg_run",
    signature = (d, *, grid=None, grid_count=30, m_traj=100, visit_threshold=5,
                 spike_factor=5.0, eigen_rel_tol=0.05, min_run=3, seed=0)
)]
#[allow(clippy::too_many_arguments)]
fn py_dcg_run(
    d: PyRef<'_, PyDistanceMatrix>,
    grid: Option<Vec<f64>>,
    grid_count: usize,
    m_traj: usize,
    visit_threshold: usize,
    spike_factor: f64,
    eigen_rel_tol: f64,
    min_run: usize,
    seed: u64,
) -> PyResult<PyDcgRun> {
    let grid = match grid {
        Some(values) => parse_grid(values)?,
        None => dcgkit::dcg::default_grid(&d.inner, grid_count).map_err(pyerr)?,
    };
    let cfg = DcgConfig {
        m_traj,
        walk: WalkParams {
            visit_threshold,
            spike_factor,
            ..WalkParams::default()
        },
        eigen_rel_tol,
        min_run,
    };
    Ok(PyDcgRun {
        inner: dcgkit::dcg::dcg_run(&d.inner, &grid, &cfg, seed).map_err(pyerr)?,
    })
}

/// Cluster count of a sharing matrix via its eigenvalue spectrum.
#[pyfunction]
#[pyo3(name = "eigen_cluster_count", signature = (q, rel_tol=0.05))]
fn py_eigen_cluster_count(q: Vec<Vec<f64>>, rel_tol: f64) -> PyResult<usize> {
    let n = q.len();
    if q.iter().any(|row| row.len() != n) {
        return Err(PyValueError::new_err(format!(
            "expected a square sharing grid, got {n} rows"
        )));
    }
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    let flat: Vec<f64> = q.into_iter().flatten().collect();
    let sharing = SharingMatrix::from_raw(labels, flat, 1).map_err(pyerr)?;
    dcgkit::dcg::eigen_cluster_count(&sharing, rel_tol).map_err(pyerr)
}

// ---------------------------------------------------------------------------
// Agglomerative clustering.

/// Agglomerative tree under `"single"`, `"complete"`, or `"average"`
/// linkage, with levels either at the given cluster counts or at every
/// achievable count.
#[pyfunction]
#[pyo3(name = "hc_tree", signature = (d, linkage="average", levels=None))]
fn py_hc_tree(
    d: PyRef<'_, PyDistanceMatrix>,
    linkage: &str,
    levels: Option<Vec<usize>>,
) -> PyResult<PyClusterTree> {
    let link = linkage.parse().map_err(pyerr)?;
    let dg = dcgkit::hc::hc_build(&d.inner, link).map_err(pyerr)?;
    let k_list = levels.unwrap_or_else(|| dg.achievable_k());
    Ok(PyClusterTree {
        inner: dcgkit::hc::dendrogram_to_tree(&dg, &k_list).map_err(pyerr)?,
    })
}

// ---------------------------------------------------------------------------
// Coupled row/column clustering.

/// Alternating row/column clustering of a data matrix.
#[pyfunction]
#[pyo3(
    name = "couple",
    signature = (m, *, row_alg="hc-average", col_alg="hc-average",
                 max_iterations=3, grid_count=30, m_traj=100, seed=0)
)]
fn py_couple(
    m: PyRef<'_, PyDataMatrix>,
    row_alg: &str,
    col_alg: &str,
    max_iterations: usize,
    grid_count: usize,
    m_traj: usize,
    seed: u64,
) -> PyResult<PyCoupleResult> {
    let cfg = CouplingConfig {
        max_iterations,
        row_algorithm: row_alg.parse().map_err(pyerr)?,
        col_algorithm: col_alg.parse().map_err(pyerr)?,
        dcg: DcgConfig {
            m_traj,
            ..DcgConfig::default()
        },
        dcg_grid_count: grid_count,
        level_overrides: Vec::new(),
    };
    let (row_tree, col_tree, log) = dcgkit::dm::couple(&m.inner, &cfg, seed).map_err(pyerr)?;
    Ok(PyCoupleResult {
        row_tree,
        col_tree,
        iterations: log.iterations,
        stable: log.stable,
    })
}

/// Total-variation energy of a matrix under a row/column blocking
/// (real matrices are binned into equal-frequency categories first).
#[pyfunction]
#[pyo3(name = "energy_density")]
fn py_energy_density(
    m: PyRef<'_, PyDataMatrix>,
    row_assignment: Vec<usize>,
    col_assignment: Vec<usize>,
) -> PyResult<f64> {
    let prepared = dcgkit::dm::prepare_energy_matrix(&m.inner).map_err(pyerr)?;
    let bd = dcgkit::dm::blocks(
        &prepared,
        &parse_partition(row_assignment)?,
        &parse_partition(col_assignment)?,
    )
    .map_err(pyerr)?;
    dcgkit::dm::energy_density(&prepared, &bd).map_err(pyerr)
}

// ---------------------------------------------------------------------------
// Margin-preserving mimicking.

/// A 0/1 matrix with exactly the requested row and column sums.
#[pyfunction]
#[pyo3(name = "sample_binary", signature = (row_sums, col_sums, seed=0))]
fn py_sample_binary(
    row_sums: Vec<usize>,
    col_sums: Vec<usize>,
    seed: u64,
) -> PyResult<Vec<Vec<u8>>> {
    let ms = MarginSpec::new(row_sums, col_sums).map_err(pyerr)?;
    Ok(dcgkit::mimic::sample_binary(&ms, seed))
}

fn parse_mode(mode: &str) -> PyResult<MimicMode> {
    mode.parse().map_err(pyerr)
}

/// One margin-preserving replicate of a blocked letter matrix.
#[pyfunction]
#[pyo3(name = "mimic_matrix", signature = (m, row_assignment, col_assignment, mode="fixed", seed=0))]
fn py_mimic_matrix(
    m: PyRef<'_, PyDataMatrix>,
    row_assignment: Vec<usize>,
    col_assignment: Vec<usize>,
    mode: &str,
    seed: u64,
) -> PyResult<PyDataMatrix> {
    let bd = dcgkit::dm::blocks(
        &m.inner,
        &parse_partition(row_assignment)?,
        &parse_partition(col_assignment)?,
    )
    .map_err(pyerr)?;
    Ok(PyDataMatrix {
        inner: dcgkit::mimic::mimic_matrix(&m.inner, &bd, parse_mode(mode)?, seed).map_err(pyerr)?,
    })
}

/// Energy densities of `n_rep` mimicked replicates under one blocking.
#[pyfunction]
#[pyo3(
    name = "mimic_ensemble",
    signature = (m, row_assignment, col_assignment, n_rep=100, mode="fixed", seed=0)
)]
fn py_mimic_ensemble(
    m: PyRef<'_, PyDataMatrix>,
    row_assignment: Vec<usize>,
    col_assignment: Vec<usize>,
    n_rep: usize,
    mode: &str,
    seed: u64,
) -> PyResult<Vec<f64>> {
    let bd = dcgkit::dm::blocks(
        &m.inner,
        &parse_partition(row_assignment)?,
        &parse_partition(col_assignment)?,
    )
    .map_err(pyerr)?;
    Ok(
        dcgkit::mimic::mimic_ensemble(&m.inner, &bd, n_rep, parse_mode(mode)?, seed)
            .map_err(pyerr)?
            .values,
    )
}

// ---------------------------------------------------------------------------
// Alignment scoring.

/// `(raw, common_length, normalized)` score of one aligned pair.
#[pyfunction]
#[pyo3(name = "pair_score", signature = (s1, s2, gap_open=15.0, gap_extend=0.2))]
fn py_pair_score(s1: &str, s2: &str, gap_open: f64, gap_extend: f64) -> PyResult<(f64, usize, f64)> {
    let params = ScoringParams::new(gap_open, gap_extend).map_err(pyerr)?;
    let ps = dcgkit::seqscore::pair_score_raw(s1, s2, &params).map_err(pyerr)?;
    Ok((ps.raw, ps.common_length, ps.normalized))
}

/// Standardized pairwise similarity grid of an aligned sequence set.
#[pyfunction]
#[pyo3(name = "similarity_matrix", signature = (names, sequences, gap_open=15.0, gap_extend=0.2))]
fn py_similarity_matrix(
    names: Vec<String>,
    sequences: Vec<String>,
    gap_open: f64,
    gap_extend: f64,
) -> PyResult<Vec<Vec<f64>>> {
    let aln = AlignedSet::new(names, sequences).map_err(pyerr)?;
    let params = ScoringParams::new(gap_open, gap_extend).map_err(pyerr)?;
    let grid = dcgkit::seqscore::similarity_matrix(&aln, &params).map_err(pyerr)?;
    Ok((0..grid.n())
        .map(|i| (0..grid.n()).map(|j| grid.get(i, j)).collect())
        .collect())
}

// ---------------------------------------------------------------------------

#[pymodule]
fn dcgkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataMatrix>()?;
    m.add_class::<PyDistanceMatrix>()?;
    m.add_class::<PyClusterTree>()?;
    m.add_class::<PyDcgRun>()?;
    m.add_class::<PyCoupleResult>()?;
    m.add_function(wrap_pyfunction!(py_rank_normalize, m)?)?;
    m.add_function(wrap_pyfunction!(py_pairwise_euclidean, m)?)?;
    m.add_function(wrap_pyfunction!(py_is_ultrametric, m)?)?;
    m.add_function(wrap_pyfunction!(py_adjusted_rand_index, m)?)?;
    m.add_function(wrap_pyfunction!(py_zoo_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(py_log_grid, m)?)?;
    m.add_function(wrap_pyfunction!(py_default_grid, m)?)?;
    m.add_function(wrap_pyfunction!(py_dcg_run, m)?)?;
    m.add_function(wrap_pyfunction!(py_eigen_cluster_count, m)?)?;
    m.add_function(wrap_pyfunction!(py_hc_tree, m)?)?;
    m.add_function(wrap_pyfunction!(py_couple, m)?)?;
    m.add_function(wrap_pyfunction!(py_energy_density, m)?)?;
    m.add_function(wrap_pyfunction!(py_sample_binary, m)?)?;
    m.add_function(wrap_pyfunction!(py_mimic_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(py_mimic_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(py_pair_score, m)?)?;
    m.add_function(wrap_pyfunction!(py_similarity_matrix, m)?)?;
    Ok(())
}
