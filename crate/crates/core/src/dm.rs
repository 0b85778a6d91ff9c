//! Coupled row/column clustering of data matrices.
//!
//! [`couple`] alternates between the two axes of a matrix: the current
//! tree on one axis supplies a partition, every vector on the other
//! axis is extended with per-cluster means ([`extended_distance`]), and
//! that axis's tree is rebuilt on the extended geometry. After a few
//! rounds the two trees stabilize and jointly tile the matrix into
//! blocks ([`blocks`]); block homogeneity is scored by a
//! total-variation energy ([`energy_density`]).
//!
//! # Energy definition
//!
//! The energy is a reconstruction, declared here rather than imported
//! from elsewhere: for block `b` with `R_b` contributing rows and `C_b`
//! contributing columns, let `p_b` be the block's empirical category
//! distribution and `p_r`, `p_c` the per-row / per-column distributions
//! inside the block. Then
//!
//! ```text
//! H(b) = (1/R_b) Σ_r TV(p_r, p_b)  +  (1/C_b) Σ_c TV(p_c, p_b)
//! energy = Σ_b (cells_b / total cells) · H(b)
//! ```
//!
//! with `TV` the total-variation distance. The energy is symmetric in
//! rows and columns, non-negative, and zero exactly when every block
//! has category-identical rows and columns. Gap cells are excluded from
//! every distribution and from the cell weights.

use crate::dcg::{dcg_run, default_grid, mix_seed, DcgConfig};
use crate::error::{Error, Result};
use crate::hc::{dendrogram_to_tree, hc_build, Linkage};
use crate::matrix::pairwise_euclidean;
use crate::tree::Level;
use crate::{Axis, ClusterTree, DataMatrix, DistanceMatrix, MatrixKind, Partition};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Clustering engine used for one axis of the coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisAlgorithm {
    /// Average-linkage agglomeration.
    HcAverage,
    /// Complete-linkage agglomeration.
    HcComplete,
    /// The random-walk scale sweep of [`crate::dcg`].
    Dcg,
}

impl std::str::FromStr for AxisAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hc-average" => Ok(AxisAlgorithm::HcAverage),
            "hc-complete" => Ok(AxisAlgorithm::HcComplete),
            "dcg" => Ok(AxisAlgorithm::Dcg),
            other => Err(Error::InvalidInput(format!(
                "unknown axis algorithm {other:?} (expected hc-average, hc-complete, or dcg)"
            ))),
        }
    }
}

/// Pins the counterpart tree level used in one half-iteration, taking
/// precedence over the `sqrt(n)` default rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelOverride {
    /// 1-based coupling iteration the override applies to.
    pub iteration: usize,
    /// Which tree the level is taken from (`Rows` = the row tree).
    pub tree_axis: Axis,
    /// Level index within that tree (0 = coarsest).
    pub level_index: usize,
}

/// Knobs of the coupling loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    /// Upper bound on full iterations (default 3).
    pub max_iterations: usize,
    /// Engine for the row tree.
    pub row_algorithm: AxisAlgorithm,
    /// Engine for the column tree.
    pub col_algorithm: AxisAlgorithm,
    /// Settings for axes driven by the random-walk engine.
    pub dcg: DcgConfig,
    /// Grid resolution for the embedded scale sweep (default 30).
    pub dcg_grid_count: usize,
    /// Per-iteration level pins; everything else follows the default
    /// rule (level with cluster count closest to `round(sqrt(n))` of
    /// the tree's own axis, ties to the coarser level).
    pub level_overrides: Vec<LevelOverride>,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        CouplingConfig {
            max_iterations: 3,
            row_algorithm: AxisAlgorithm::HcAverage,
            col_algorithm: AxisAlgorithm::HcAverage,
            dcg: DcgConfig::default(),
            dcg_grid_count: 30,
            level_overrides: Vec::new(),
        }
    }
}

/// One half-iteration of the coupling, as logged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupleStep {
    /// 1-based iteration number.
    pub iteration: usize,
    /// The axis whose tree was rebuilt in this half-iteration.
    pub rebuilt_axis: Axis,
    /// Level index chosen in the counterpart tree.
    pub counterpart_level: usize,
    /// Cluster count of that level.
    pub counterpart_k: usize,
    /// The counterpart partition that shaped the extended distances.
    pub partition: Partition,
}

/// Full record of a coupling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupleLog {
    /// Every half-iteration, in execution order.
    pub steps: Vec<CoupleStep>,
    /// Full iterations executed.
    pub iterations: usize,
    /// True when the bottom partitions of both trees repeated exactly
    /// and the loop stopped early.
    pub stable: bool,
}

/// The joint tiling of a matrix by a row and a column partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDecomposition {
    row_partition: Partition,
    col_partition: Partition,
    row_clusters: Vec<Vec<usize>>,
    col_clusters: Vec<Vec<usize>>,
}

impl BlockDecomposition {
    /// Row-axis partition.
    pub fn row_partition(&self) -> &Partition {
        &self.row_partition
    }

    /// Column-axis partition.
    pub fn col_partition(&self) -> &Partition {
        &self.col_partition
    }

    /// Number of row clusters.
    pub fn n_row_clusters(&self) -> usize {
        self.row_partition.k()
    }

    /// Number of column clusters.
    pub fn n_col_clusters(&self) -> usize {
        self.col_partition.k()
    }

    /// Total number of blocks.
    pub fn n_blocks(&self) -> usize {
        self.n_row_clusters() * self.n_col_clusters()
    }

    /// Row indices of row cluster `r`.
    pub fn row_members(&self, r: usize) -> &[usize] {
        &self.row_clusters[r]
    }

    /// Column indices of column cluster `c`.
    pub fn col_members(&self, c: usize) -> &[usize] {
        &self.col_clusters[c]
    }

    /// Setup label such as `"3x2"`.
    pub fn setup_label(&self) -> String {
        format!("{}x{}", self.n_row_clusters(), self.n_col_clusters())
    }
}

/// Builds the `k_r x k_c` tiling of `m` by cluster cross-products.
///
/// # Errors
/// The partitions must match the matrix axes in length.
pub fn blocks(m: &DataMatrix, rp: &Partition, cp: &Partition) -> Result<BlockDecomposition> {
    if rp.len() != m.n_rows() {
        return Err(Error::InvalidInput(format!(
            "row partition covers {} rows but the matrix has {}",
            rp.len(),
            m.n_rows()
        )));
    }
    if cp.len() != m.n_cols() {
        return Err(Error::InvalidInput(format!(
            "column partition covers {} columns but the matrix has {}",
            cp.len(),
            m.n_cols()
        )));
    }
    Ok(BlockDecomposition {
        row_clusters: rp.clusters(),
        col_clusters: cp.clusters(),
        row_partition: rp.clone(),
        col_partition: cp.clone(),
    })
}

/// Coarsens a decomposition to `target_rows x target_cols` by grouping
/// consecutive cluster ids. Cluster ids split as evenly as possible,
/// smaller groups first: 3 clusters into 2 groups gives `{0} {1,2}`.
///
/// # Errors
/// Targets must lie in `[1, current cluster count]`.
pub fn merge_blocks(
    bd: &BlockDecomposition,
    target_rows: usize,
    target_cols: usize,
) -> Result<BlockDecomposition> {
    let row_partition = merge_partition(&bd.row_partition, target_rows)?;
    let col_partition = merge_partition(&bd.col_partition, target_cols)?;
    Ok(BlockDecomposition {
        row_clusters: row_partition.clusters(),
        col_clusters: col_partition.clusters(),
        row_partition,
        col_partition,
    })
}

fn merge_partition(p: &Partition, target: usize) -> Result<Partition> {
    let k = p.k();
    if target < 1 || target > k {
        return Err(Error::InvalidInput(format!(
            "cannot merge {k} clusters into {target} groups"
        )));
    }
    let base = k / target;
    let rem = k % target;
    // First (target - rem) groups take `base` ids, the rest base + 1.
    let mut group_of = vec![0usize; k];
    let mut id = 0;
    for g in 0..target {
        let size = if g < target - rem { base } else { base + 1 };
        for _ in 0..size {
            group_of[id] = g;
            id += 1;
        }
    }
    let assignment: Vec<usize> = (0..p.len()).map(|i| group_of[p.cluster_of(i)]).collect();
    Partition::from_labels(&assignment)
}

/// Distances along `axis` in the cluster-extended geometry: each vector
/// keeps its original coordinates and gains one extra coordinate per
/// counterpart cluster — the mean of its entries over that cluster.
///
/// # Errors
/// `counterpart` must partition the opposite axis; gap cells are not
/// supported.
pub fn extended_distance(
    m: &DataMatrix,
    counterpart: &Partition,
    axis: Axis,
) -> Result<DistanceMatrix> {
    if counterpart.len() != m.axis_len(axis.other()) {
        return Err(Error::InvalidInput(format!(
            "counterpart partition covers {} items but the {} axis has {}",
            counterpart.len(),
            axis.other(),
            m.axis_len(axis.other())
        )));
    }
    if m.has_gaps() {
        return Err(Error::InvalidInput(
            "matrix has gap cells; extended distances need fully observed data".into(),
        ));
    }
    let n = m.axis_len(axis);
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 vectors along {axis}, found {n}"
        )));
    }
    let clusters = counterpart.clusters();
    let vectors: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let base: Vec<f64> = m
                .axis_cells(axis, i)
                .into_iter()
                .map(|c| c.unwrap())
                .collect();
            let mut v = base.clone();
            for members in &clusters {
                let mean = members.iter().map(|&j| base[j]).sum::<f64>() / members.len() as f64;
                v.push(mean);
            }
            v
        })
        .collect();
    DistanceMatrix::from_fn(m.axis_labels(axis).to_vec(), |i, j| {
        crate::matrix::euclidean(&vectors[i], &vectors[j])
    })
}

/// Builds one axis tree on a distance matrix with the chosen engine.
/// Hierarchies carry every achievable cut; degenerate geometry (all
/// distances zero under the walk engine) falls back to a flat tree.
fn build_axis_tree(
    d: &DistanceMatrix,
    alg: AxisAlgorithm,
    cfg: &CouplingConfig,
    seed: u64,
) -> Result<ClusterTree> {
    match alg {
        AxisAlgorithm::HcAverage | AxisAlgorithm::HcComplete => {
            let link = if alg == AxisAlgorithm::HcAverage {
                Linkage::Average
            } else {
                Linkage::Complete
            };
            let dg = hc_build(d, link)?;
            dendrogram_to_tree(&dg, &dg.achievable_k())
        }
        AxisAlgorithm::Dcg => match default_grid(d, cfg.dcg_grid_count) {
            Ok(grid) => Ok(dcg_run(d, &grid, &cfg.dcg, seed)?.tree),
            Err(Error::Degenerate(_)) => ClusterTree::new(
                d.labels().to_vec(),
                vec![Level {
                    height: 0.0,
                    partition: Partition::single_cluster(d.n())?,
                }],
            ),
            Err(e) => Err(e),
        },
    }
}

/// Level whose cluster count is closest to `target`; ties go to the
/// coarser (earlier) level.
fn choose_level(tree: &ClusterTree, target: usize) -> usize {
    let mut best = 0;
    let mut best_diff = usize::MAX;
    for (i, level) in tree.levels().iter().enumerate() {
        let diff = level.partition.k().abs_diff(target);
        if diff < best_diff {
            best = i;
            best_diff = diff;
        }
    }
    best
}

fn override_for(cfg: &CouplingConfig, iteration: usize, tree_axis: Axis) -> Option<usize> {
    cfg.level_overrides
        .iter()
        .find(|o| o.iteration == iteration && o.tree_axis == tree_axis)
        .map(|o| o.level_index)
}

/// Runs the coupling loop.
///
/// The initial row tree comes from plain Euclidean distances between
/// rows. Each iteration then (1) picks a row-tree level, extends the
/// column geometry with its cluster means, and rebuilds the column
/// tree; (2) does the same for rows using the new column tree. The loop
/// stops early once the bottom partitions of both trees repeat exactly
/// between consecutive iterations, and in any case after
/// `max_iterations` rounds.
///
/// # Errors
/// Needs a fully observed matrix with at least 2 rows and 2 columns;
/// clustering-engine errors propagate.
pub fn couple(
    m: &DataMatrix,
    cfg: &CouplingConfig,
    seed: u64,
) -> Result<(ClusterTree, ClusterTree, CoupleLog)> {
    if cfg.max_iterations == 0 {
        return Err(Error::InvalidInput("max_iterations must be >= 1".into()));
    }
    if m.has_gaps() {
        return Err(Error::InvalidInput(
            "coupling needs a fully observed matrix".into(),
        ));
    }
    if m.n_rows() < 2 || m.n_cols() < 2 {
        return Err(Error::InvalidInput(format!(
            "coupling needs at least a 2x2 matrix, got {}x{}",
            m.n_rows(),
            m.n_cols()
        )));
    }
    let row_target = (m.n_rows() as f64).sqrt().round() as usize;
    let col_target = (m.n_cols() as f64).sqrt().round() as usize;
    let d0 = pairwise_euclidean(m, Axis::Rows)?;
    let mut row_tree = build_axis_tree(&d0, cfg.row_algorithm, cfg, mix_seed(seed, 0))?;
    let mut col_tree: Option<ClusterTree> = None;
    let mut steps = Vec::new();
    let mut prev_bottoms: Option<(Partition, Partition)> = None;
    let mut iterations = 0;
    let mut stable = false;
    for it in 1..=cfg.max_iterations {
        iterations = it;
        // Half-iteration 1: rebuild columns from a row-tree level.
        let level_r =
            override_for(cfg, it, Axis::Rows).unwrap_or_else(|| choose_level(&row_tree, row_target));
        let rp = row_tree
            .levels()
            .get(level_r)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "level override {level_r} out of range for the row tree"
                ))
            })?
            .partition
            .clone();
        steps.push(CoupleStep {
            iteration: it,
            rebuilt_axis: Axis::Cols,
            counterpart_level: level_r,
            counterpart_k: rp.k(),
            partition: rp.clone(),
        });
        let dc = extended_distance(m, &rp, Axis::Cols)?;
        let new_col = build_axis_tree(&dc, cfg.col_algorithm, cfg, mix_seed(seed, 2 * it as u64))?;
        // Half-iteration 2: rebuild rows from the new column tree.
        let level_c = override_for(cfg, it, Axis::Cols)
            .unwrap_or_else(|| choose_level(&new_col, col_target));
        let cp = new_col
            .levels()
            .get(level_c)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "level override {level_c} out of range for the column tree"
                ))
            })?
            .partition
            .clone();
        steps.push(CoupleStep {
            iteration: it,
            rebuilt_axis: Axis::Rows,
            counterpart_level: level_c,
            counterpart_k: cp.k(),
            partition: cp.clone(),
        });
        let dr = extended_distance(m, &cp, Axis::Rows)?;
        row_tree = build_axis_tree(&dr, cfg.row_algorithm, cfg, mix_seed(seed, 2 * it as u64 + 1))?;
        col_tree = Some(new_col);
        let bottoms = (
            row_tree.finest().partition.clone(),
            col_tree.as_ref().unwrap().finest().partition.clone(),
        );
        if prev_bottoms.as_ref() == Some(&bottoms) {
            stable = true;
            break;
        }
        prev_bottoms = Some(bottoms);
    }
    Ok((
        row_tree,
        col_tree.expect("at least one iteration ran"),
        CoupleLog {
            steps,
            iterations,
            stable,
        },
    ))
}

/// Readies a matrix for [`energy_density`]: categorical kinds pass
/// through, real matrices are recoded into 8 equal-frequency bins.
pub fn prepare_energy_matrix(m: &DataMatrix) -> Result<DataMatrix> {
    match m.kind() {
        MatrixKind::Real => crate::matrix::discretize_equal_frequency(m, 8),
        _ => Ok(m.clone()),
    }
}

/// Total-variation energy density of `m` under `bd` (module docs give
/// the formula). Lower is more homogeneous; 0 means every block has
/// category-identical rows and columns.
///
/// # Errors
/// `m` must be categorical (see [`prepare_energy_matrix`]) and `bd`
/// must tile it.
pub fn energy_density(m: &DataMatrix, bd: &BlockDecomposition) -> Result<f64> {
    if m.kind() == MatrixKind::Real {
        return Err(Error::InvalidInput(
            "energy needs a categorical matrix; discretize real data first".into(),
        ));
    }
    if bd.row_partition.len() != m.n_rows() || bd.col_partition.len() != m.n_cols() {
        return Err(Error::InvalidInput(format!(
            "decomposition is {}x{} but the matrix is {}x{}",
            bd.row_partition.len(),
            bd.col_partition.len(),
            m.n_rows(),
            m.n_cols()
        )));
    }
    let codes = m.codes();
    let code_index = |v: f64| -> usize {
        codes
            .iter()
            .position(|&c| c as f64 == v)
            .expect("constructed matrices only hold declared codes")
    };
    let pairs: Vec<(usize, usize)> = (0..bd.n_row_clusters())
        .flat_map(|r| (0..bd.n_col_clusters()).map(move |c| (r, c)))
        .collect();
    // (weighted H numerator, observed cells) per block; the final sum
    // runs sequentially in block order so results are schedule-free.
    let terms: Vec<(f64, usize)> = pairs
        .par_iter()
        .map(|&(r, c)| {
            let rows = bd.row_members(r);
            let cols = bd.col_members(c);
            let nc = codes.len();
            let mut block = vec![0usize; nc];
            let mut by_row = vec![vec![0usize; nc]; rows.len()];
            let mut by_col = vec![vec![0usize; nc]; cols.len()];
            let mut observed = 0usize;
            for (ri, &row) in rows.iter().enumerate() {
                for (ci, &col) in cols.iter().enumerate() {
                    if let Some(v) = m.get(row, col) {
                        let k = code_index(v);
                        block[k] += 1;
                        by_row[ri][k] += 1;
                        by_col[ci][k] += 1;
                        observed += 1;
                    }
                }
            }
            if observed == 0 {
                return (0.0, 0);
            }
            let tv = |counts: &[usize], total: usize| -> f64 {
                0.5 * counts
                    .iter()
                    .zip(&block)
                    .map(|(&a, &b)| {
                        (a as f64 / total as f64 - b as f64 / observed as f64).abs()
                    })
                    .sum::<f64>()
            };
            let mean_tv = |groups: &[Vec<usize>]| -> f64 {
                let contributing: Vec<&Vec<usize>> = groups
                    .iter()
                    .filter(|g| g.iter().sum::<usize>() > 0)
                    .collect();
                if contributing.is_empty() {
                    return 0.0;
                }
                contributing
                    .iter()
                    .map(|g| tv(g, g.iter().sum()))
                    .sum::<f64>()
                    / contributing.len() as f64
            };
            let h = mean_tv(&by_row) + mean_tv(&by_col);
            (h * observed as f64, observed)
        })
        .collect();
    let total: usize = terms.iter().map(|(_, o)| o).sum();
    if total == 0 {
        return Err(Error::InvalidInput("matrix is all gaps".into()));
    }
    Ok(terms.iter().map(|(h, _)| h).sum::<f64>() / total as f64)
}
