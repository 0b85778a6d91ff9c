//! Constrained matrix mimicking.
//!
//! A mimicked matrix is a resample of an observed 0/1 or sequence-coded
//! matrix that keeps the observed row and column margins exactly. For a
//! binary matrix the margins are the row and column sums; for a sequence
//! matrix over the letter codes `A=1, G=2, C=5, T=6` they are the per-row
//! and per-column counts of each letter. Comparing the energy of the
//! observed matrix with the energy distribution of its mimics tells
//! whether a block structure captures more than its margins force.
//!
//! The sampler is a two-stage construction:
//!
//! 1. a deterministic feasible fill — greedy largest-remaining-capacity
//!    placement on full grids, max-flow placement on masked grids — and
//! 2. `swap_factor × #ones` random checkerboard swap attempts. A swap
//!    picks two rows and two columns and, when the four corner cells form
//!    a `[[1,0],[0,1]]` or `[[0,1],[1,0]]` pattern, toggles all four.
//!    Swaps preserve every margin, so the exact-margin guarantee holds by
//!    construction while the chain mixes over the feasible set.
//!
//! Sequence blocks are mimicked by one of two strategies:
//!
//! * [`mimic_block_fixed`] freezes the `{A,G}`-vs-`{C,T}` cell classes in
//!   place and reshuffles letters within each class under the per-class
//!   letter margins;
//! * [`mimic_block_resampled`] first redraws the `{A,G}`/`{C,T}` class
//!   placement itself under the class-count margins, then places `G` into
//!   the new `{A,G}` cells and `C` into the new `{C,T}` cells under the
//!   original letter margins, retrying with derived seeds when an inner
//!   placement is infeasible.
//!
//! Gap cells are frozen in place and excluded from every margin.
//! [`mimic_ensemble`] assembles per-block mimics into whole-matrix
//! replicates and scores each with [`crate::dm::energy_density`].

use crate::dcg::mix_seed;
use crate::dm::{energy_density, BlockDecomposition};
use crate::error::{Error, Result};
use crate::matrix::{Cell, DataMatrix, MatrixKind};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

/// Default number of checkerboard swap attempts per placed one.
pub const DEFAULT_SWAP_FACTOR: usize = 10;

/// Resampling attempts before a resampled-class mimic reports infeasibility.
const MAX_RESAMPLE_ATTEMPTS: usize = 20;

const CODE_A: f64 = 1.0;
const CODE_G: f64 = 2.0;
const CODE_C: f64 = 5.0;
const CODE_T: f64 = 6.0;

/// Exact row and column sums requested from a 0/1 sample.
///
/// Construction validates the margins completely, so every [`MarginSpec`]
/// value is feasible and [`sample_binary`] cannot fail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginSpec {
    row_sums: Vec<usize>,
    col_sums: Vec<usize>,
}

impl MarginSpec {
    /// Validates and wraps the requested margins.
    ///
    /// # Errors
    /// Rejects empty axes, a row sum above the column count (or vice
    /// versa), mismatched totals, and margins that fail the Gale-Ryser
    /// feasibility test; the error names the first violated inequality.
    pub fn new(row_sums: Vec<usize>, col_sums: Vec<usize>) -> Result<Self> {
        let (m, n) = (row_sums.len(), col_sums.len());
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput(
                "margins need at least one row and one column".into(),
            ));
        }
        for (i, &r) in row_sums.iter().enumerate() {
            if r > n {
                return Err(Error::InvalidInput(format!(
                    "row {i} requests {r} ones but there are only {n} columns"
                )));
            }
        }
        for (j, &c) in col_sums.iter().enumerate() {
            if c > m {
                return Err(Error::InvalidInput(format!(
                    "column {j} requests {c} ones but there are only {m} rows"
                )));
            }
        }
        let row_total: usize = row_sums.iter().sum();
        let col_total: usize = col_sums.iter().sum();
        if row_total != col_total {
            return Err(Error::Infeasible(format!(
                "row sums total {row_total} but column sums total {col_total}"
            )));
        }
        // Gale-Ryser: for every k, the k largest row sums must fit into
        // the columns with each column contributing at most k cells.
        let mut desc = row_sums.clone();
        desc.sort_unstable_by(|a, b| b.cmp(a));
        let mut prefix = 0usize;
        for (k, &d) in desc.iter().enumerate() {
            let k = k + 1;
            prefix += d;
            let absorbable: usize = col_sums.iter().map(|&c| c.min(k)).sum();
            if prefix > absorbable {
                return Err(Error::Infeasible(format!(
                    "Gale-Ryser inequality fails at k={k}: the {k} largest row \
                     sums total {prefix} but the columns can absorb only {absorbable}"
                )));
            }
        }
        Ok(MarginSpec { row_sums, col_sums })
    }

    /// Requested row sums.
    pub fn row_sums(&self) -> &[usize] {
        &self.row_sums
    }

    /// Requested column sums.
    pub fn col_sums(&self) -> &[usize] {
        &self.col_sums
    }

    /// Number of rows.
    pub fn n_rows(&self) -> usize {
        self.row_sums.len()
    }

    /// Number of columns.
    pub fn n_cols(&self) -> usize {
        self.col_sums.len()
    }

    /// Total number of ones.
    pub fn total_ones(&self) -> usize {
        self.row_sums.iter().sum()
    }
}

/// One 0/1 indicator layer of a coded matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryLayer {
    /// The category code this layer indicates.
    pub code: i64,
    /// `grid[i][j] == 1` exactly when the source cell holds `code`.
    pub grid: Vec<Vec<u8>>,
}

/// Which block-mimicking strategy to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MimicMode {
    /// Freeze the `{A,G}`/`{C,T}` cell classes, reshuffle within them.
    Fixed,
    /// Redraw the cell classes too, then refill letters within them.
    Resampled,
}

impl FromStr for MimicMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(MimicMode::Fixed),
            "resampled" => Ok(MimicMode::Resampled),
            other => Err(Error::InvalidInput(format!(
                "unknown mimic mode {other:?}; expected \"fixed\" or \"resampled\""
            ))),
        }
    }
}

impl fmt::Display for MimicMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MimicMode::Fixed => "fixed",
            MimicMode::Resampled => "resampled",
        })
    }
}

/// Energy densities of a mimicked ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySamples {
    /// One energy density per replicate, in replicate order.
    pub values: Vec<f64>,
    /// Label of the mimicked block setup, such as `"3x2"`.
    pub setup: String,
}

impl EnergySamples {
    /// Mean of the sampled energies (0 for an empty sample).
    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Sample standard deviation (0 for fewer than two samples).
    ///
    /// Computed with Welford's recurrence, so a constant sample reports
    /// exactly zero.
    pub fn std_dev(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let delta = v - mean;
            mean += delta / (i + 1) as f64;
            m2 += delta * (v - mean);
        }
        (m2 / (n - 1) as f64).sqrt()
    }
}

// ---------------------------------------------------------------------------
// Flat-grid plumbing shared by the samplers.

/// Deterministic feasible fill: rows by descending sum (ties by index),
/// each row's ones into the columns with most remaining capacity (ties by
/// index). Succeeds for every validated [`MarginSpec`].
fn greedy_fill(ms: &MarginSpec) -> Vec<u8> {
    let (m, n) = (ms.n_rows(), ms.n_cols());
    let mut grid = vec![0u8; m * n];
    let mut remaining = ms.col_sums.clone();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(ms.row_sums[i]), i));
    for &i in &order {
        let need = ms.row_sums[i];
        if need == 0 {
            continue;
        }
        let mut cols: Vec<usize> = (0..n).collect();
        cols.sort_by_key(|&j| (std::cmp::Reverse(remaining[j]), j));
        for &j in cols.iter().take(need) {
            debug_assert!(remaining[j] > 0, "greedy fill exhausted a column");
            grid[i * n + j] = 1;
            remaining[j] -= 1;
        }
    }
    debug_assert!(remaining.iter().all(|&r| r == 0));
    grid
}

#[cfg(debug_assertions)]
fn line_sums(grid: &[u8], n_cols: usize, rows: [usize; 2], cols: [usize; 2]) -> [usize; 4] {
    let n_rows = grid.len() / n_cols;
    let row_sum = |r: usize| (0..n_cols).map(|j| grid[r * n_cols + j] as usize).sum();
    let col_sum = |c: usize| (0..n_rows).map(|i| grid[i * n_cols + c] as usize).sum();
    [row_sum(rows[0]), row_sum(rows[1]), col_sum(cols[0]), col_sum(cols[1])]
}

/// Runs `attempts` checkerboard swap attempts on `grid`, touching only
/// cells where `mask` is true. Each attempt draws two rows then two
/// columns (uniform, with replacement) and toggles the four corners when
/// they form an off-diagonal pattern inside the mask.
fn checkerboard_swaps(
    grid: &mut [u8],
    mask: &[bool],
    n_rows: usize,
    n_cols: usize,
    attempts: usize,
    rng: &mut ChaCha8Rng,
) {
    if n_rows < 2 || n_cols < 2 {
        return;
    }
    for _ in 0..attempts {
        let r1 = rng.random_range(0..n_rows);
        let r2 = rng.random_range(0..n_rows);
        let c1 = rng.random_range(0..n_cols);
        let c2 = rng.random_range(0..n_cols);
        if r1 == r2 || c1 == c2 {
            continue;
        }
        let (a, b, c, d) = (
            r1 * n_cols + c1,
            r1 * n_cols + c2,
            r2 * n_cols + c1,
            r2 * n_cols + c2,
        );
        if !(mask[a] && mask[b] && mask[c] && mask[d]) {
            continue;
        }
        if grid[a] == grid[d] && grid[b] == grid[c] && grid[a] != grid[b] {
            #[cfg(debug_assertions)]
            let before = line_sums(grid, n_cols, [r1, r2], [c1, c2]);
            grid[a] ^= 1;
            grid[b] ^= 1;
            grid[c] ^= 1;
            grid[d] ^= 1;
            #[cfg(debug_assertions)]
            debug_assert_eq!(
                before,
                line_sums(grid, n_cols, [r1, r2], [c1, c2]),
                "checkerboard swap changed a margin"
            );
        }
    }
}

/// Dinic max-flow network over unit-capacity cell edges.
struct FlowNet {
    to: Vec<usize>,
    cap: Vec<u32>,
    adj: Vec<Vec<usize>>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        FlowNet {
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: u32) -> usize {
        let id = self.to.len();
        self.to.push(v);
        self.cap.push(c);
        self.adj[u].push(id);
        self.to.push(u);
        self.cap.push(0);
        self.adj[v].push(id + 1);
        id
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let n = self.adj.len();
        let mut total = 0u64;
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let v = self.to[e];
                    if self.cap[e] > 0 && level[v] == usize::MAX {
                        level[v] = level[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            let mut iter = vec![0usize; n];
            loop {
                let pushed = self.augment(s, t, u32::MAX, &level, &mut iter);
                if pushed == 0 {
                    break;
                }
                total += u64::from(pushed);
            }
        }
    }

    fn augment(&mut self, u: usize, t: usize, pushed: u32, level: &[usize], iter: &mut [usize]) -> u32 {
        if u == t {
            return pushed;
        }
        while iter[u] < self.adj[u].len() {
            let e = self.adj[u][iter[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && level[v] == level[u] + 1 {
                let d = self.augment(v, t, pushed.min(self.cap[e]), level, iter);
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            iter[u] += 1;
        }
        0
    }
}

/// Finds any 0/1 placement on the masked grid matching the margins, or
/// `None` when no placement exists. Deterministic (fixed scan order).
fn flow_fill(
    mask: &[bool],
    n_rows: usize,
    n_cols: usize,
    row_ones: &[usize],
    col_ones: &[usize],
) -> Option<Vec<u8>> {
    let total: usize = row_ones.iter().sum();
    if total != col_ones.iter().sum::<usize>() {
        return None;
    }
    let (s, t) = (0, n_rows + n_cols + 1);
    let mut net = FlowNet::new(n_rows + n_cols + 2);
    for (i, &r) in row_ones.iter().enumerate() {
        net.add_edge(s, 1 + i, r as u32);
    }
    for (j, &c) in col_ones.iter().enumerate() {
        net.add_edge(1 + n_rows + j, t, c as u32);
    }
    let mut cell_edges = Vec::new();
    for i in 0..n_rows {
        for j in 0..n_cols {
            if mask[i * n_cols + j] {
                cell_edges.push((i, j, net.add_edge(1 + i, 1 + n_rows + j, 1)));
            }
        }
    }
    if net.max_flow(s, t) != total as u64 {
        return None;
    }
    let mut grid = vec![0u8; n_rows * n_cols];
    for (i, j, e) in cell_edges {
        if net.cap[e] == 0 {
            grid[i * n_cols + j] = 1;
        }
    }
    Some(grid)
}

/// Starting placement for a masked resample.
enum Init<'a> {
    /// Start from this placement (already feasible by construction).
    Keep(&'a [u8]),
    /// Build a fresh feasible placement first.
    Fresh,
}

/// Draws a 0/1 placement on the masked grid with the given margins:
/// feasible start per `init`, then `swap_factor × #ones` checkerboard
/// swap attempts confined to the mask.
///
/// # Errors
/// `Infeasible` when `init` is `Fresh` and no placement exists.
fn masked_resample(
    mask: &[bool],
    n_rows: usize,
    n_cols: usize,
    row_ones: &[usize],
    col_ones: &[usize],
    init: Init<'_>,
    rng: &mut ChaCha8Rng,
    swap_factor: usize,
) -> Result<Vec<u8>> {
    let mut grid = match init {
        Init::Keep(g) => {
            debug_assert_eq!(g.len(), n_rows * n_cols);
            g.to_vec()
        }
        Init::Fresh => {
            if mask.iter().all(|&b| b) {
                greedy_fill(&MarginSpec::new(row_ones.to_vec(), col_ones.to_vec())?)
            } else {
                flow_fill(mask, n_rows, n_cols, row_ones, col_ones).ok_or_else(|| {
                    Error::Infeasible(
                        "no 0/1 placement satisfies the margins on the masked grid".into(),
                    )
                })?
            }
        }
    };
    let ones: usize = grid.iter().map(|&v| usize::from(v)).sum();
    checkerboard_swaps(&mut grid, mask, n_rows, n_cols, swap_factor * ones, rng);
    Ok(grid)
}

// ---------------------------------------------------------------------------
// Public samplers.

/// Draws a 0/1 matrix with exactly the requested margins, using the
/// default swap factor of [`DEFAULT_SWAP_FACTOR`].
pub fn sample_binary(ms: &MarginSpec, seed: u64) -> Vec<Vec<u8>> {
    sample_binary_with(ms, seed, DEFAULT_SWAP_FACTOR)
}

/// [`sample_binary`] with an explicit swap factor; `swap_factor ×
/// total_ones` swap attempts follow the deterministic greedy fill.
pub fn sample_binary_with(ms: &MarginSpec, seed: u64, swap_factor: usize) -> Vec<Vec<u8>> {
    let (m, n) = (ms.n_rows(), ms.n_cols());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = greedy_fill(ms);
    let mask = vec![true; m * n];
    checkerboard_swaps(
        &mut grid,
        &mask,
        m,
        n,
        swap_factor * ms.total_ones(),
        &mut rng,
    );
    grid.chunks(n).map(<[u8]>::to_vec).collect()
}

/// Slices a coded matrix into one indicator layer per category code.
/// Gap cells are 0 in every layer; over the observed cells the layers
/// are disjoint and `Σ code·layer` reproduces the matrix.
///
/// # Errors
/// The matrix must be coded-categorical.
pub fn slice_digits(m: &DataMatrix) -> Result<Vec<BinaryLayer>> {
    if m.kind() != MatrixKind::Coded {
        return Err(Error::InvalidInput(format!(
            "binary slicing needs a coded matrix, got {:?}",
            m.kind()
        )));
    }
    Ok(m.codes()
        .iter()
        .map(|&code| BinaryLayer {
            code,
            grid: (0..m.n_rows())
                .map(|i| {
                    (0..m.n_cols())
                        .map(|j| u8::from(m.get(i, j) == Some(code as f64)))
                        .collect()
                })
                .collect(),
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Letter-block mimicking.

/// Checks that every observed cell holds one of the four letter codes.
fn check_letter_cells(b: &DataMatrix) -> Result<()> {
    if b.kind() != MatrixKind::Coded {
        return Err(Error::InvalidInput(format!(
            "sequence mimicking needs a coded matrix, got {:?}",
            b.kind()
        )));
    }
    for i in 0..b.n_rows() {
        for j in 0..b.n_cols() {
            if let Some(v) = b.get(i, j) {
                if v != CODE_A && v != CODE_G && v != CODE_C && v != CODE_T {
                    return Err(Error::InvalidInput(format!(
                        "cell {v} at row {i}, col {j} is not one of the sequence codes 1, 2, 5, 6"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Flat per-cell facts about a letter block, plus the letter margins.
struct LetterFacts {
    n_rows: usize,
    n_cols: usize,
    /// True where the cell is observed (not a gap).
    observed: Vec<bool>,
    /// True where the observed cell is C or T.
    class_ct: Vec<bool>,
    g_grid: Vec<u8>,
    c_grid: Vec<u8>,
    g_rows: Vec<usize>,
    g_cols: Vec<usize>,
    c_rows: Vec<usize>,
    c_cols: Vec<usize>,
    ct_rows: Vec<usize>,
    ct_cols: Vec<usize>,
}

fn letter_facts(b: &DataMatrix) -> LetterFacts {
    let (m, n) = (b.n_rows(), b.n_cols());
    let mut f = LetterFacts {
        n_rows: m,
        n_cols: n,
        observed: vec![false; m * n],
        class_ct: vec![false; m * n],
        g_grid: vec![0; m * n],
        c_grid: vec![0; m * n],
        g_rows: vec![0; m],
        g_cols: vec![0; n],
        c_rows: vec![0; m],
        c_cols: vec![0; n],
        ct_rows: vec![0; m],
        ct_cols: vec![0; n],
    };
    for i in 0..m {
        for j in 0..n {
            let Some(v) = b.get(i, j) else { continue };
            let idx = i * n + j;
            f.observed[idx] = true;
            if v == CODE_C || v == CODE_T {
                f.class_ct[idx] = true;
                f.ct_rows[i] += 1;
                f.ct_cols[j] += 1;
                if v == CODE_C {
                    f.c_grid[idx] = 1;
                    f.c_rows[i] += 1;
                    f.c_cols[j] += 1;
                }
            } else if v == CODE_G {
                f.g_grid[idx] = 1;
                f.g_rows[i] += 1;
                f.g_cols[j] += 1;
            }
        }
    }
    f
}

/// Rebuilds a letter matrix from the class layout and the two letter
/// placements: observed cells become G/A inside the `{A,G}` class and
/// C/T inside the `{C,T}` class; gaps stay gaps.
fn assemble_letters(
    b: &DataMatrix,
    observed: &[bool],
    class_ct: &[bool],
    g_grid: &[u8],
    c_grid: &[u8],
) -> Result<DataMatrix> {
    let (m, n) = (b.n_rows(), b.n_cols());
    let rows: Vec<Vec<Cell>> = (0..m)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let idx = i * n + j;
                    if !observed[idx] {
                        None
                    } else if class_ct[idx] {
                        Some(if c_grid[idx] == 1 { CODE_C } else { CODE_T })
                    } else {
                        Some(if g_grid[idx] == 1 { CODE_G } else { CODE_A })
                    }
                })
                .collect()
        })
        .collect();
    DataMatrix::coded(
        b.row_labels().to_vec(),
        b.col_labels().to_vec(),
        rows,
        b.codes(),
    )
}

/// Mimics a letter block keeping the `{A,G}`/`{C,T}` cell classes fixed:
/// G placements are reshuffled within the `{A,G}` cells under the G
/// margins, C placements within the `{C,T}` cells under the C margins.
/// Per-row and per-column counts of all four letters are preserved
/// exactly; gaps stay in place.
///
/// # Errors
/// The block must be coded over the letter codes `{1,2,5,6}`.
pub fn mimic_block_fixed(b: &DataMatrix, seed: u64) -> Result<DataMatrix> {
    mimic_block_fixed_with(b, seed, DEFAULT_SWAP_FACTOR)
}

/// [`mimic_block_fixed`] with an explicit swap factor.
pub fn mimic_block_fixed_with(b: &DataMatrix, seed: u64, swap_factor: usize) -> Result<DataMatrix> {
    check_letter_cells(b)?;
    let f = letter_facts(b);
    let ag_mask: Vec<bool> = f
        .observed
        .iter()
        .zip(&f.class_ct)
        .map(|(&obs, &ct)| obs && !ct)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g_new = masked_resample(
        &ag_mask,
        f.n_rows,
        f.n_cols,
        &f.g_rows,
        &f.g_cols,
        Init::Keep(&f.g_grid),
        &mut rng,
        swap_factor,
    )?;
    let c_new = masked_resample(
        &f.class_ct,
        f.n_rows,
        f.n_cols,
        &f.c_rows,
        &f.c_cols,
        Init::Keep(&f.c_grid),
        &mut rng,
        swap_factor,
    )?;
    assemble_letters(b, &f.observed, &f.class_ct, &g_new, &c_new)
}

/// Mimics a letter block resampling the cell classes too: the
/// `{C,T}`-class placement is redrawn under the class-count margins,
/// then G is placed into the new `{A,G}` cells under the G margins and C
/// into the new `{C,T}` cells under the C margins. When an inner
/// placement is infeasible under the redrawn classes, the whole draw
/// retries with a derived seed. Letter margins and gaps are preserved
/// exactly, as with [`mimic_block_fixed`].
///
/// # Errors
/// Letter-code validation as in [`mimic_block_fixed`]; `Infeasible` when
/// no retry admits the inner placements.
pub fn mimic_block_resampled(b: &DataMatrix, seed: u64) -> Result<DataMatrix> {
    mimic_block_resampled_with(b, seed, DEFAULT_SWAP_FACTOR)
}

/// [`mimic_block_resampled`] with an explicit swap factor.
pub fn mimic_block_resampled_with(
    b: &DataMatrix,
    seed: u64,
    swap_factor: usize,
) -> Result<DataMatrix> {
    check_letter_cells(b)?;
    let f = letter_facts(b);
    for attempt in 0..MAX_RESAMPLE_ATTEMPTS {
        let attempt_seed = if attempt == 0 {
            seed
        } else {
            mix_seed(seed, attempt as u64)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(attempt_seed);
        let outer = masked_resample(
            &f.observed,
            f.n_rows,
            f.n_cols,
            &f.ct_rows,
            &f.ct_cols,
            Init::Fresh,
            &mut rng,
            swap_factor,
        )?;
        let ct_mask: Vec<bool> = f
            .observed
            .iter()
            .zip(&outer)
            .map(|(&obs, &o)| obs && o == 1)
            .collect();
        let ag_mask: Vec<bool> = f
            .observed
            .iter()
            .zip(&outer)
            .map(|(&obs, &o)| obs && o == 0)
            .collect();
        let g_new = match masked_resample(
            &ag_mask,
            f.n_rows,
            f.n_cols,
            &f.g_rows,
            &f.g_cols,
            Init::Fresh,
            &mut rng,
            swap_factor,
        ) {
            Ok(g) => g,
            Err(Error::Infeasible(_)) => continue,
            Err(e) => return Err(e),
        };
        let c_new = match masked_resample(
            &ct_mask,
            f.n_rows,
            f.n_cols,
            &f.c_rows,
            &f.c_cols,
            Init::Fresh,
            &mut rng,
            swap_factor,
        ) {
            Ok(c) => c,
            Err(Error::Infeasible(_)) => continue,
            Err(e) => return Err(e),
        };
        return assemble_letters(b, &f.observed, &ct_mask, &g_new, &c_new);
    }
    Err(Error::Infeasible(format!(
        "no letter placement fit the resampled cell classes after \
         {MAX_RESAMPLE_ATTEMPTS} attempts"
    )))
}

/// Mimics one block of a 0/1 matrix: the placement of ones is resampled
/// within the observed cells under the row/column sum margins. `Fixed`
/// starts the swap chain from the observed placement, `Resampled` from a
/// fresh feasible fill.
fn mimic_binary_block(
    b: &DataMatrix,
    mode: MimicMode,
    seed: u64,
    swap_factor: usize,
) -> Result<DataMatrix> {
    let (m, n) = (b.n_rows(), b.n_cols());
    let mut observed = vec![false; m * n];
    let mut ones = vec![0u8; m * n];
    let mut row_ones = vec![0usize; m];
    let mut col_ones = vec![0usize; n];
    for i in 0..m {
        for j in 0..n {
            if let Some(v) = b.get(i, j) {
                observed[i * n + j] = true;
                if v == 1.0 {
                    ones[i * n + j] = 1;
                    row_ones[i] += 1;
                    col_ones[j] += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = match mode {
        MimicMode::Fixed => Init::Keep(&ones),
        MimicMode::Resampled => Init::Fresh,
    };
    let new = masked_resample(&observed, m, n, &row_ones, &col_ones, init, &mut rng, swap_factor)?;
    let rows: Vec<Vec<Cell>> = (0..m)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let idx = i * n + j;
                    observed[idx].then(|| f64::from(new[idx]))
                })
                .collect()
        })
        .collect();
    DataMatrix::binary(b.row_labels().to_vec(), b.col_labels().to_vec(), rows)
}

// ---------------------------------------------------------------------------
// Whole-matrix replicates and ensembles.

fn check_tiling(m: &DataMatrix, bd: &BlockDecomposition, what: &str) -> Result<()> {
    if bd.row_partition().len() != m.n_rows() || bd.col_partition().len() != m.n_cols() {
        return Err(Error::InvalidInput(format!(
            "{what} covers {}x{} but the matrix is {}x{}",
            bd.row_partition().len(),
            bd.col_partition().len(),
            m.n_rows(),
            m.n_cols()
        )));
    }
    Ok(())
}

/// One whole-matrix mimic: every block of `bd` is mimicked independently
/// and the results are reassembled in place. Block `(r, c)` (id
/// `r × k_c + c`) derives its seed as `seed ⊕ block_id`, so any
/// execution order yields the same replicate.
///
/// # Errors
/// The matrix must be binary or letter-coded and `bd` must tile it.
pub fn mimic_matrix(m: &DataMatrix, bd: &BlockDecomposition, mode: MimicMode, seed: u64) -> Result<DataMatrix> {
    mimic_matrix_with(m, bd, mode, seed, DEFAULT_SWAP_FACTOR)
}

/// [`mimic_matrix`] with an explicit swap factor.
pub fn mimic_matrix_with(
    m: &DataMatrix,
    bd: &BlockDecomposition,
    mode: MimicMode,
    seed: u64,
    swap_factor: usize,
) -> Result<DataMatrix> {
    check_tiling(m, bd, "block decomposition")?;
    match m.kind() {
        MatrixKind::Binary => {}
        MatrixKind::Coded => check_letter_cells(m)?,
        MatrixKind::Real => {
            return Err(Error::InvalidInput(
                "mimicking supports binary and sequence-coded matrices, not real ones".into(),
            ))
        }
    }
    let k_c = bd.n_col_clusters();
    let mut rows: Vec<Vec<Cell>> = (0..m.n_rows())
        .map(|i| (0..m.n_cols()).map(|j| m.get(i, j)).collect())
        .collect();
    for r in 0..bd.n_row_clusters() {
        for c in 0..k_c {
            let block_id = (r * k_c + c) as u64;
            let block_seed = seed ^ block_id;
            let rmem = bd.row_members(r);
            let cmem = bd.col_members(c);
            let block_rows: Vec<Vec<Cell>> = rmem
                .iter()
                .map(|&i| cmem.iter().map(|&j| m.get(i, j)).collect())
                .collect();
            let pick = |labels: &[String], members: &[usize]| -> Vec<String> {
                members.iter().map(|&i| labels[i].clone()).collect()
            };
            let block = match m.kind() {
                MatrixKind::Binary => DataMatrix::binary(
                    pick(m.row_labels(), rmem),
                    pick(m.col_labels(), cmem),
                    block_rows,
                )?,
                _ => DataMatrix::coded(
                    pick(m.row_labels(), rmem),
                    pick(m.col_labels(), cmem),
                    block_rows,
                    m.codes(),
                )?,
            };
            let mimicked = match (m.kind(), mode) {
                (MatrixKind::Binary, _) => mimic_binary_block(&block, mode, block_seed, swap_factor)?,
                (_, MimicMode::Fixed) => mimic_block_fixed_with(&block, block_seed, swap_factor)?,
                (_, MimicMode::Resampled) => {
                    mimic_block_resampled_with(&block, block_seed, swap_factor)?
                }
            };
            for (a, &i) in rmem.iter().enumerate() {
                for (b, &j) in cmem.iter().enumerate() {
                    rows[i][j] = mimicked.get(a, b);
                }
            }
        }
    }
    match m.kind() {
        MatrixKind::Binary => {
            DataMatrix::binary(m.row_labels().to_vec(), m.col_labels().to_vec(), rows)
        }
        _ => DataMatrix::coded(
            m.row_labels().to_vec(),
            m.col_labels().to_vec(),
            rows,
            m.codes(),
        ),
    }
}

/// Mimics `bd`'s blocks `n_rep` times and scores every replicate with
/// [`energy_density`] against the same decomposition. Replicate `rep`
/// uses base seed `seed ⊕ rep`, so replicates are independent of
/// execution order and may run in parallel.
///
/// Because each block's letter margins are preserved exactly, scoring a
/// replicate against the decomposition it was mimicked at reproduces the
/// observed energy exactly; score against a finer decomposition (see
/// [`mimic_ensemble_against`]) to expose structure beyond the margins.
///
/// # Errors
/// As for [`mimic_matrix`]; `n_rep` must be at least 1.
pub fn mimic_ensemble(
    m: &DataMatrix,
    bd: &BlockDecomposition,
    n_rep: usize,
    mode: MimicMode,
    seed: u64,
) -> Result<EnergySamples> {
    mimic_ensemble_against_with(m, bd, bd, n_rep, mode, seed, DEFAULT_SWAP_FACTOR)
}

/// [`mimic_ensemble`] with an explicit swap factor.
pub fn mimic_ensemble_with(
    m: &DataMatrix,
    bd: &BlockDecomposition,
    n_rep: usize,
    mode: MimicMode,
    seed: u64,
    swap_factor: usize,
) -> Result<EnergySamples> {
    mimic_ensemble_against_with(m, bd, bd, n_rep, mode, seed, swap_factor)
}

/// Mimics at `mimic_bd` but scores every replicate against `energy_bd`
/// (typically the finest decomposition). Coarser mimicked setups scatter
/// letters across the finer blocks, so their energy distributions sit
/// above the observed fine-scale energy when real block structure was
/// merged away.
///
/// # Errors
/// As for [`mimic_ensemble`]; both decompositions must tile the matrix.
pub fn mimic_ensemble_against(
    m: &DataMatrix,
    mimic_bd: &BlockDecomposition,
    energy_bd: &BlockDecomposition,
    n_rep: usize,
    mode: MimicMode,
    seed: u64,
) -> Result<EnergySamples> {
    mimic_ensemble_against_with(m, mimic_bd, energy_bd, n_rep, mode, seed, DEFAULT_SWAP_FACTOR)
}

/// [`mimic_ensemble_against`] with an explicit swap factor.
pub fn mimic_ensemble_against_with(
    m: &DataMatrix,
    mimic_bd: &BlockDecomposition,
    energy_bd: &BlockDecomposition,
    n_rep: usize,
    mode: MimicMode,
    seed: u64,
    swap_factor: usize,
) -> Result<EnergySamples> {
    if n_rep < 1 {
        return Err(Error::InvalidInput("need at least one replicate".into()));
    }
    check_tiling(m, mimic_bd, "mimic decomposition")?;
    check_tiling(m, energy_bd, "energy decomposition")?;
    let values = (0..n_rep)
        .into_par_iter()
        .map(|rep| {
            let replicate = mimic_matrix_with(m, mimic_bd, mode, seed ^ rep as u64, swap_factor)?;
            energy_density(&replicate, energy_bd)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EnergySamples {
        values,
        setup: mimic_bd.setup_label(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dm::{blocks, merge_blocks};
    use crate::partition::Partition;
    use proptest::prelude::*;

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn coded_from(rows: &[&[i64]], codes: &[i64]) -> DataMatrix {
        let cells: Vec<Vec<Cell>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Some(v as f64)).collect())
            .collect();
        DataMatrix::coded(
            labels("r", rows.len()),
            labels("c", rows[0].len()),
            cells,
            codes,
        )
        .unwrap()
    }

    /// Per-row and per-column counts of each code, gaps skipped.
    fn letter_margins(m: &DataMatrix) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let codes = [CODE_A, CODE_G, CODE_C, CODE_T];
        let mut rows = vec![vec![0usize; 4]; m.n_rows()];
        let mut cols = vec![vec![0usize; 4]; m.n_cols()];
        for i in 0..m.n_rows() {
            for j in 0..m.n_cols() {
                if let Some(v) = m.get(i, j) {
                    let k = codes.iter().position(|&c| c == v).unwrap();
                    rows[i][k] += 1;
                    cols[j][k] += 1;
                }
            }
        }
        (rows, cols)
    }

    fn grid_margins(grid: &[Vec<u8>]) -> (Vec<usize>, Vec<usize>) {
        let rows: Vec<usize> = grid
            .iter()
            .map(|r| r.iter().map(|&v| usize::from(v)).sum())
            .collect();
        let cols: Vec<usize> = (0..grid[0].len())
            .map(|j| grid.iter().map(|r| usize::from(r[j])).sum())
            .collect();
        (rows, cols)
    }

    #[test]
    fn margin_spec_rejects_total_mismatch() {
        let err = MarginSpec::new(vec![2, 2], vec![1, 1]).unwrap_err();
        assert!(err.to_string().contains("total"), "{err}");
    }

    #[test]
    fn margin_spec_names_violated_inequality() {
        // Sorted row sums [2,2,0]; at k=2 they total 4 but the columns
        // can absorb only min(3,2)+min(1,2)+min(0,2) = 3.
        let err = MarginSpec::new(vec![2, 2, 0], vec![3, 1, 0]).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        assert!(err.to_string().contains("k=2"), "{err}");
    }

    #[test]
    fn margin_spec_rejects_oversize_line_sums() {
        assert!(MarginSpec::new(vec![3], vec![1, 1]).is_err());
        assert!(MarginSpec::new(vec![1, 1, 1], vec![3]).is_ok());
        assert!(MarginSpec::new(vec![1, 1], vec![3]).is_err());
    }

    #[test]
    fn sample_binary_forced_margins() {
        let ms = MarginSpec::new(vec![2, 0], vec![1, 1]).unwrap();
        for seed in 0..10 {
            assert_eq!(sample_binary(&ms, seed), vec![vec![1, 1], vec![0, 0]]);
        }
        let zero = MarginSpec::new(vec![0, 0], vec![0, 0]).unwrap();
        assert_eq!(sample_binary(&zero, 3), vec![vec![0, 0], vec![0, 0]]);
    }

    #[test]
    fn sample_binary_two_by_two_parity() {
        // The feasible set is {identity, anti-identity}; over many seeds
        // both should appear with frequency 0.5 +- 0.05.
        let ms = MarginSpec::new(vec![1, 1], vec![1, 1]).unwrap();
        let identity = vec![vec![1, 0], vec![0, 1]];
        let anti = vec![vec![0, 1], vec![1, 0]];
        let mut identity_count = 0usize;
        for seed in 0..10_000u64 {
            let draw = sample_binary(&ms, seed);
            assert!(draw == identity || draw == anti);
            if draw == identity {
                identity_count += 1;
            }
        }
        assert!(
            (4500..=5500).contains(&identity_count),
            "identity drawn {identity_count} times out of 10000"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn sample_binary_margins_always_exact(
            cells in proptest::collection::vec(proptest::bool::ANY, 1..=36),
            n_cols in 1usize..=6,
            seed in 0u64..1000,
        ) {
            let n_cols = n_cols.min(cells.len());
            let n_rows = cells.len() / n_cols;
            prop_assume!(n_rows >= 1);
            let grid: Vec<Vec<u8>> = (0..n_rows)
                .map(|i| (0..n_cols).map(|j| u8::from(cells[i * n_cols + j])).collect())
                .collect();
            let (rows, cols) = grid_margins(&grid);
            let ms = MarginSpec::new(rows.clone(), cols.clone()).unwrap();
            let draw = sample_binary(&ms, seed);
            prop_assert_eq!(grid_margins(&draw), (rows, cols));
        }

        #[test]
        fn slice_reconstruction_holds(
            vals in proptest::collection::vec(proptest::option::of(0usize..4), 1..=30),
            n_cols in 1usize..=5,
        ) {
            let n_cols = n_cols.min(vals.len());
            let n_rows = vals.len() / n_cols;
            prop_assume!(n_rows >= 1);
            let codes = [1i64, 2, 5, 6];
            let rows: Vec<Vec<Cell>> = (0..n_rows)
                .map(|i| {
                    (0..n_cols)
                        .map(|j| vals[i * n_cols + j].map(|k| codes[k] as f64))
                        .collect()
                })
                .collect();
            let m = DataMatrix::coded(labels("r", n_rows), labels("c", n_cols), rows, &codes).unwrap();
            let layers = slice_digits(&m).unwrap();
            prop_assert_eq!(layers.len(), 4);
            for i in 0..n_rows {
                for j in 0..n_cols {
                    let hits: u32 = layers.iter().map(|l| u32::from(l.grid[i][j])).sum();
                    let sum: f64 = layers
                        .iter()
                        .map(|l| l.code as f64 * f64::from(l.grid[i][j]))
                        .sum();
                    match m.get(i, j) {
                        Some(v) => {
                            prop_assert_eq!(hits, 1);
                            prop_assert_eq!(sum, v);
                        }
                        None => prop_assert_eq!(hits, 0),
                    }
                }
            }
        }
    }

    #[test]
    fn slice_one_indicator_per_cell() {
        let m = coded_from(&[&[1, 6], &[5, 2]], &[1, 2, 5, 6]);
        let layers = slice_digits(&m).unwrap();
        assert_eq!(layers.len(), 4);
        assert_eq!(layers.iter().map(|l| l.code).collect::<Vec<_>>(), vec![1, 2, 5, 6]);
        for layer in &layers {
            let total: u32 = layer.grid.iter().flatten().map(|&v| u32::from(v)).sum();
            assert_eq!(total, 1, "layer {} should hold exactly one 1", layer.code);
        }
    }

    #[test]
    fn slice_constant_matrix() {
        let m = coded_from(&[&[5, 5], &[5, 5]], &[1, 2, 5, 6]);
        let layers = slice_digits(&m).unwrap();
        for layer in layers {
            let total: u32 = layer.grid.iter().flatten().map(|&v| u32::from(v)).sum();
            assert_eq!(total, if layer.code == 5 { 4 } else { 0 });
        }
    }

    #[test]
    fn slice_rejects_real() {
        let m = DataMatrix::real(
            labels("r", 2),
            labels("c", 2),
            vec![vec![Some(0.5), Some(1.0)], vec![Some(2.0), Some(3.0)]],
        )
        .unwrap();
        assert!(slice_digits(&m).is_err());
    }

    #[test]
    fn fixed_single_row_is_forced() {
        // One row: column margins pin every letter in place.
        let b = coded_from(&[&[1, 2, 5, 6]], &[1, 2, 5, 6]);
        for seed in 0..20 {
            let out = mimic_block_fixed(&b, seed).unwrap();
            for j in 0..4 {
                assert_eq!(out.get(0, j), b.get(0, j));
            }
        }
    }

    #[test]
    fn fixed_constant_block_unchanged() {
        let b = coded_from(&[&[1, 1, 1], &[1, 1, 1]], &[1, 2, 5, 6]);
        let out = mimic_block_fixed(&b, 9).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(out.get(i, j), Some(CODE_A));
            }
        }
    }

    #[test]
    fn fixed_keeps_classes_in_place() {
        let b = coded_from(&[&[1, 2, 5, 6], &[2, 1, 6, 5], &[1, 2, 5, 6]], &[1, 2, 5, 6]);
        for seed in 0..30 {
            let out = mimic_block_fixed(&b, seed).unwrap();
            for i in 0..3 {
                for j in 0..4 {
                    let orig_ct = matches!(b.get(i, j), Some(v) if v == CODE_C || v == CODE_T);
                    let out_ct = matches!(out.get(i, j), Some(v) if v == CODE_C || v == CODE_T);
                    assert_eq!(orig_ct, out_ct, "class moved at ({i},{j}) seed {seed}");
                }
            }
        }
    }

    fn random_letter_block(n_rows: usize, n_cols: usize, seed: u64) -> DataMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let codes = [CODE_A, CODE_G, CODE_C, CODE_T];
        let rows: Vec<Vec<Cell>> = (0..n_rows)
            .map(|_| {
                (0..n_cols)
                    .map(|_| Some(codes[rng.random_range(0..4)]))
                    .collect()
            })
            .collect();
        DataMatrix::coded(labels("r", n_rows), labels("c", n_cols), rows, &[1, 2, 5, 6]).unwrap()
    }

    #[test]
    fn fixed_preserves_letter_margins() {
        let b = random_letter_block(12, 18, 41);
        let before = letter_margins(&b);
        for seed in 0..30 {
            let out = mimic_block_fixed(&b, seed).unwrap();
            assert_eq!(letter_margins(&out), before, "margins broken at seed {seed}");
        }
    }

    #[test]
    fn resampled_preserves_letter_margins() {
        let b = random_letter_block(12, 18, 42);
        let before = letter_margins(&b);
        for seed in 0..30 {
            let out = mimic_block_resampled(&b, seed).unwrap();
            assert_eq!(letter_margins(&out), before, "margins broken at seed {seed}");
        }
    }

    #[test]
    fn resampled_single_row_is_forced() {
        let b = coded_from(&[&[1, 5]], &[1, 2, 5, 6]);
        for seed in 0..20 {
            let out = mimic_block_resampled(&b, seed).unwrap();
            assert_eq!(out.get(0, 0), Some(CODE_A));
            assert_eq!(out.get(0, 1), Some(CODE_C));
        }
    }

    #[test]
    fn resampled_constant_block_unchanged() {
        let b = coded_from(&[&[2, 2], &[2, 2]], &[1, 2, 5, 6]);
        let out = mimic_block_resampled(&b, 5).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(out.get(i, j), Some(CODE_G));
            }
        }
    }

    #[test]
    fn resampled_reaches_both_class_placements() {
        // [[A,C],[C,A]]: the {C,T} class mask is a 2x2 permutation
        // matrix, so exactly two outputs are feasible.
        let b = coded_from(&[&[1, 5], &[5, 1]], &[1, 2, 5, 6]);
        let original = [[Some(CODE_A), Some(CODE_C)], [Some(CODE_C), Some(CODE_A)]];
        let flipped = [[Some(CODE_C), Some(CODE_A)], [Some(CODE_A), Some(CODE_C)]];
        let mut seen = [0usize; 2];
        for seed in 0..200 {
            let out = mimic_block_resampled(&b, seed).unwrap();
            let got = [
                [out.get(0, 0), out.get(0, 1)],
                [out.get(1, 0), out.get(1, 1)],
            ];
            if got == original {
                seen[0] += 1;
            } else if got == flipped {
                seen[1] += 1;
            } else {
                panic!("unexpected output {got:?}");
            }
        }
        assert!(seen[0] >= 60 && seen[1] >= 60, "placement counts {seen:?}");
    }

    #[test]
    fn gaps_stay_frozen_in_both_modes() {
        let rows = vec![
            vec![Some(1.0), None, Some(5.0), Some(6.0), Some(2.0)],
            vec![Some(2.0), Some(1.0), None, Some(5.0), Some(6.0)],
            vec![Some(5.0), Some(6.0), Some(1.0), Some(2.0), None],
            vec![Some(6.0), Some(5.0), Some(2.0), Some(1.0), Some(1.0)],
        ];
        let b =
            DataMatrix::coded(labels("r", 4), labels("c", 5), rows, &[1, 2, 5, 6]).unwrap();
        let before = letter_margins(&b);
        for seed in 0..20 {
            for out in [
                mimic_block_fixed(&b, seed).unwrap(),
                mimic_block_resampled(&b, seed).unwrap(),
            ] {
                for i in 0..4 {
                    for j in 0..5 {
                        assert_eq!(b.get(i, j).is_none(), out.get(i, j).is_none());
                    }
                }
                assert_eq!(letter_margins(&out), before);
            }
        }
    }

    /// Planted 9-block letter matrix: tile (r, c) concentrates on letter
    /// (r + c) mod 4 with its own concentration, so all nine block
    /// distributions are pairwise distinct.
    fn planted_nine_block(rows_per: usize, cols_per: usize, seed: u64) -> DataMatrix {
        let codes = [CODE_A, CODE_G, CODE_C, CODE_T];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<Cell>> = (0..3 * rows_per)
            .map(|i| {
                (0..3 * cols_per)
                    .map(|j| {
                        let (r, c) = (i / rows_per, j / cols_per);
                        let dominant = (r + c) % 4;
                        let p = 0.55 + 0.05 * (3 * r + c) as f64;
                        let draw = rng.random::<f64>();
                        let k = if draw < p {
                            dominant
                        } else {
                            let others = [0usize, 1, 2, 3];
                            let rest: Vec<usize> =
                                others.into_iter().filter(|&k| k != dominant).collect();
                            rest[rng.random_range(0..3)]
                        };
                        Some(codes[k])
                    })
                    .collect()
            })
            .collect();
        DataMatrix::coded(
            labels("r", 3 * rows_per),
            labels("c", 3 * cols_per),
            rows,
            &[1, 2, 5, 6],
        )
        .unwrap()
    }

    fn third_partition(n: usize) -> Partition {
        let ids: Vec<usize> = (0..n).map(|i| i / (n / 3)).collect();
        Partition::from_labels(&ids).unwrap()
    }

    #[test]
    fn ensemble_constant_blocks_have_zero_energy() {
        let b = coded_from(
            &[&[1, 1, 6, 6], &[1, 1, 6, 6], &[5, 5, 2, 2], &[5, 5, 2, 2]],
            &[1, 2, 5, 6],
        );
        let bd = blocks(
            &b,
            &Partition::from_labels(&[0, 0, 1, 1]).unwrap(),
            &Partition::from_labels(&[0, 0, 1, 1]).unwrap(),
        )
        .unwrap();
        for mode in [MimicMode::Fixed, MimicMode::Resampled] {
            let samples = mimic_ensemble(&b, &bd, 5, mode, 11).unwrap();
            assert!(samples.values.iter().all(|&v| v == 0.0), "{:?}", samples.values);
        }
    }

    #[test]
    fn ensemble_at_own_blocks_reproduces_observed_energy() {
        // Within-block margins fully determine every energy term, so
        // each replicate scores exactly the observed energy.
        let m = planted_nine_block(6, 6, 2024);
        let bd = blocks(&m, &third_partition(18), &third_partition(18)).unwrap();
        let observed = energy_density(&m, &bd).unwrap();
        for mode in [MimicMode::Fixed, MimicMode::Resampled] {
            let samples = mimic_ensemble(&m, &bd, 8, mode, 5).unwrap();
            assert_eq!(samples.setup, "3x3");
            for v in &samples.values {
                assert_eq!(*v, observed);
            }
        }
    }

    #[test]
    fn ensemble_against_finer_blocks_orders_merged_setups() {
        let m = planted_nine_block(10, 10, 77);
        let fine = blocks(&m, &third_partition(30), &third_partition(30)).unwrap();
        let by2 = merge_blocks(&fine, 3, 2).unwrap();
        let by1 = merge_blocks(&fine, 3, 1).unwrap();
        let e3 = mimic_ensemble_against(&m, &fine, &fine, 20, MimicMode::Fixed, 9).unwrap();
        let e2 = mimic_ensemble_against(&m, &by2, &fine, 20, MimicMode::Fixed, 9).unwrap();
        let e1 = mimic_ensemble_against(&m, &by1, &fine, 20, MimicMode::Fixed, 9).unwrap();
        assert_eq!((e3.setup.as_str(), e2.setup.as_str(), e1.setup.as_str()), ("3x3", "3x2", "3x1"));
        assert!(
            e1.mean() > e2.mean() && e2.mean() > e3.mean(),
            "means {} / {} / {}",
            e1.mean(),
            e2.mean(),
            e3.mean()
        );
        assert!(e1.std_dev() > 0.0 && e2.std_dev() > 0.0);
        assert_eq!(e3.std_dev(), 0.0);
    }

    #[test]
    fn ensemble_is_deterministic() {
        let m = planted_nine_block(8, 8, 3);
        let fine = blocks(&m, &third_partition(24), &third_partition(24)).unwrap();
        let by1 = merge_blocks(&fine, 3, 1).unwrap();
        let a = mimic_ensemble_against(&m, &by1, &fine, 6, MimicMode::Fixed, 21).unwrap();
        let b = mimic_ensemble_against(&m, &by1, &fine, 6, MimicMode::Fixed, 21).unwrap();
        let c = mimic_ensemble_against(&m, &by1, &fine, 6, MimicMode::Fixed, 22).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn block_mimics_are_deterministic_per_seed() {
        let b = random_letter_block(12, 18, 43);
        for seed in [0u64, 17, 991] {
            assert_eq!(
                mimic_block_fixed(&b, seed).unwrap().to_csv(),
                mimic_block_fixed(&b, seed).unwrap().to_csv()
            );
            assert_eq!(
                mimic_block_resampled(&b, seed).unwrap().to_csv(),
                mimic_block_resampled(&b, seed).unwrap().to_csv()
            );
        }
    }

    #[test]
    fn ensemble_rejects_real_matrices() {
        let m = DataMatrix::real(
            labels("r", 2),
            labels("c", 2),
            vec![vec![Some(0.1), Some(0.2)], vec![Some(0.3), Some(0.4)]],
        )
        .unwrap();
        let bd = blocks(
            &m,
            &Partition::singletons(2).unwrap(),
            &Partition::singletons(2).unwrap(),
        )
        .unwrap();
        assert!(mimic_ensemble(&m, &bd, 3, MimicMode::Fixed, 0).is_err());
    }

    #[test]
    fn mode_parsing_round_trips() {
        assert_eq!("fixed".parse::<MimicMode>().unwrap(), MimicMode::Fixed);
        assert_eq!(
            "resampled".parse::<MimicMode>().unwrap(),
            MimicMode::Resampled
        );
        assert!("shuffled".parse::<MimicMode>().is_err());
        assert_eq!(MimicMode::Resampled.to_string(), "resampled");
    }
}
