//! Temperature-indexed random-walk clustering.
//!
//! A distance cloud is explored at a range of scales. At scale `T` the
//! pairwise distances become similarities `s_ij = exp(-d_ij / T)`, the
//! similarities become a row-stochastic transition matrix, and an
//! ensemble of regulated random walks summarizes the matrix as
//! cluster-sharing frequencies `q_ij` (the fraction of walks in which
//! `i` and `j` landed in the same cluster). The number of significant
//! eigenvalues of the sharing matrix gives a cluster count `N(T)`;
//! plateaus of `N(T)` across the scale grid pick out the scales that
//! become the levels of the final multi-scale tree.
//!
//! # The regulated walk
//!
//! [`walk_partition`] simulates a random walk that removes a node once
//! its visit count exceeds `visit_threshold`, then renormalizes the
//! transition matrix over the surviving nodes. Each move jumps to a
//! node different from the current one, chosen with probability
//! proportional to the current row of the (masked) transition matrix;
//! every arrival — including the start and any restart — counts as a
//! visit. When the current row carries almost no mass toward surviving
//! nodes (below `1e-12`) the walk restarts at a uniformly random
//! surviving node.
//!
//! Removal times form a recurrence series. A long gap between two
//! consecutive removals means the walk had to travel far to find fresh
//! nodes, i.e. it crossed into a new region: from the third removal on,
//! a gap is a *spike* when it exceeds `spike_factor` times the median of
//! the earlier inter-removal gaps and also exceeds `visit_threshold`
//! steps outright (the absolute floor suppresses spurious spikes while
//! the gap history is still short). Nodes removed between consecutive
//! spikes share a cluster.

use crate::eigen::symmetric_eigenvalues;
use crate::error::{Error, Result};
use crate::hc::{hc_build, Linkage};
use crate::tree::Level;
use crate::{ClusterTree, DistanceMatrix, Partition};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A positive, finite scale parameter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Temperature(f64);

impl Temperature {
    /// Wraps a value after checking it is finite and strictly positive.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "temperature must be positive and finite, got {value}"
            )));
        }
        Ok(Temperature(value))
    }

    /// The underlying value.
    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Temperature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Pairwise similarities `exp(-d_ij / T)` at a fixed temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    labels: Vec<String>,
    temperature: Temperature,
    s: Vec<f64>,
}

impl SimilarityMatrix {
    /// Number of points.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Point labels.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// The generating temperature.
    pub fn temperature(&self) -> Temperature {
        self.temperature
    }

    /// Similarity between points `i` and `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.s[i * self.n() + j]
    }
}

/// Row-stochastic transition matrix derived from a [`SimilarityMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    labels: Vec<String>,
    p: Vec<f64>,
}

impl TransitionMatrix {
    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Node labels.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Transition probability from `i` to `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.n() + j]
    }
}

/// Knobs of the regulated walk and its spike detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    /// A node is removed once its visit count exceeds this (default 5).
    pub visit_threshold: usize,
    /// A gap is a spike when it exceeds this multiple of the median
    /// earlier gap (default 5).
    pub spike_factor: f64,
    /// Safety cap on total walk steps (default 1,000,000). Every step
    /// adds a visit to some surviving node, so any walk finishes within
    /// `n * (visit_threshold + 1)` steps; the cap only bites when set
    /// deliberately low.
    pub max_steps: usize,
}

impl Default for WalkParams {
    fn default() -> Self {
        WalkParams {
            visit_threshold: 5,
            spike_factor: 5.0,
            max_steps: 1_000_000,
        }
    }
}

impl WalkParams {
    fn validate(&self) -> Result<()> {
        if self.visit_threshold == 0 {
            return Err(Error::InvalidInput("visit_threshold must be >= 1".into()));
        }
        if !(self.spike_factor > 0.0) || !self.spike_factor.is_finite() {
            return Err(Error::InvalidInput(format!(
                "spike_factor must be positive and finite, got {}",
                self.spike_factor
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidInput("max_steps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Cluster-sharing frequencies over an ensemble of walks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharingMatrix {
    labels: Vec<String>,
    q: Vec<f64>,
    /// Requested ensemble size.
    m_traj: usize,
    /// Trajectories that actually completed (failed ones are retried
    /// once, then dropped from the denominator).
    completed: usize,
}

impl SharingMatrix {
    /// Builds a sharing matrix from raw entries, checking symmetry
    /// (within `1e-9`), unit diagonal, and the `[0, 1]` range.
    pub fn from_raw(labels: Vec<String>, q: Vec<f64>, m_traj: usize) -> Result<Self> {
        let n = labels.len();
        if q.len() != n * n || n == 0 {
            return Err(Error::InvalidInput(format!(
                "expected {n}x{n} sharing entries, got {}",
                q.len()
            )));
        }
        for i in 0..n {
            let d = q[i * n + i];
            if d != 1.0 {
                return Err(Error::InvalidInput(format!(
                    "sharing diagonal must be 1, got {d} at index {i}"
                )));
            }
            for j in 0..n {
                let v = q[i * n + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidInput(format!(
                        "sharing entry ({i}, {j}) = {v} outside [0, 1]"
                    )));
                }
                if (v - q[j * n + i]).abs() > 1e-9 {
                    return Err(Error::InvalidInput(format!(
                        "sharing matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(SharingMatrix {
            labels,
            q,
            m_traj,
            completed: m_traj,
        })
    }

    /// Number of points.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Point labels.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Requested ensemble size.
    pub fn m_traj(&self) -> usize {
        self.m_traj
    }

    /// Trajectories that contributed to the frequencies.
    pub fn completed(&self) -> usize {
        self.completed
    }

    /// Sharing frequency between points `i` and `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n() + j]
    }

    /// The derived distance `1 - q` as a [`DistanceMatrix`].
    pub fn to_distance(&self) -> Result<DistanceMatrix> {
        let n = self.n();
        DistanceMatrix::from_fn(self.labels.clone(), |i, j| 1.0 - self.q[i * n + j])
    }

    /// Ultrametricity diagnostic of the derived distance `1 - q`:
    /// `(violating triples, total triples)` at tolerance `1e-9`. The
    /// derived distance is usually close to ultrametric but not exactly
    /// so; this quantifies how close.
    pub fn ultrametric_diagnostic(&self) -> Result<(usize, usize)> {
        let n = self.n();
        if n < 3 {
            return Ok((0, 0));
        }
        let d = self.to_distance()?;
        let (_, violations) = crate::is_ultrametric(&d, 1e-9)?;
        Ok((violations, n * (n - 1) * (n - 2) / 6))
    }
}

/// Computes `s_ij = exp(-d_ij / T)` elementwise.
pub fn similarity(d: &DistanceMatrix, t: Temperature) -> SimilarityMatrix {
    let n = d.n();
    let mut s = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            s[i * n + j] = (-d.get(i, j) / t.value()).exp();
        }
    }
    SimilarityMatrix {
        labels: d.labels().to_vec(),
        temperature: t,
        s,
    }
}

/// Normalizes each similarity row by its sum, yielding a row-stochastic
/// matrix. Row sums are strictly positive because the diagonal is 1.
pub fn transition(s: &SimilarityMatrix) -> TransitionMatrix {
    let n = s.n();
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        let row_sum: f64 = (0..n).map(|j| s.get(i, j)).sum();
        for j in 0..n {
            p[i * n + j] = s.get(i, j) / row_sum;
        }
        debug_assert!(((0..n).map(|j| p[i * n + j]).sum::<f64>() - 1.0).abs() <= 1e-12);
    }
    TransitionMatrix {
        labels: s.labels().to_vec(),
        p,
    }
}

/// Median of a non-empty slice (mean of the two middles on even length).
fn median_of(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// SplitMix-style avalanche used to derive independent sub-seeds.
pub(crate) fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs one regulated walk and segments the removal sequence into
/// clusters at its spikes (see the module docs for the walk rules).
///
/// Returns the partition of all nodes plus the removal recurrence
/// series as `(step, node)` pairs, where `step` counts arrivals from 1.
///
/// # Errors
/// Fails when `params` are out of range or the walk exceeds
/// `params.max_steps` before removing every node; the budget error
/// carries the partial removal sequence.
pub fn walk_partition(
    p: &TransitionMatrix,
    params: &WalkParams,
    seed: u64,
) -> Result<(Partition, Vec<(usize, usize)>)> {
    params.validate()?;
    let n = p.n();
    if n == 1 {
        return Ok((Partition::single_cluster(1)?, Vec::new()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut active = vec![true; n];
    let mut n_active = n;
    let mut visits = vec![0usize; n];
    let mut removals: Vec<(usize, usize)> = Vec::with_capacity(n);
    let mut step = 0usize;
    let mut cur = rng.random_range(0..n);
    while n_active > 0 {
        if step == params.max_steps {
            return Err(Error::WalkBudget {
                max_steps: params.max_steps,
                total: n,
                removals,
            });
        }
        step += 1;
        visits[cur] += 1;
        if visits[cur] > params.visit_threshold {
            removals.push((step, cur));
            active[cur] = false;
            n_active -= 1;
            if n_active == 0 {
                break;
            }
        }
        // Jump off the current node using its (masked) transition row.
        let mass: f64 = (0..n)
            .filter(|&j| active[j] && j != cur)
            .map(|j| p.get(cur, j))
            .sum();
        if mass < 1e-12 {
            // Stuck: restart at a uniformly random surviving node.
            let pick = rng.random_range(0..n_active);
            cur = (0..n).filter(|&j| active[j]).nth(pick).unwrap();
        } else {
            let target = rng.random::<f64>() * mass;
            let mut acc = 0.0;
            let mut next = usize::MAX;
            for j in 0..n {
                if !active[j] || j == cur {
                    continue;
                }
                acc += p.get(cur, j);
                if target < acc {
                    next = j;
                    break;
                }
            }
            if next == usize::MAX {
                // Rounding pushed the target past the last slot.
                next = (0..n).rev().find(|&j| active[j] && j != cur).unwrap();
            }
            cur = next;
        }
    }

    // Segment removals at spikes: long gaps mark entry into new regions.
    let mut assignment = vec![0usize; n];
    let mut cluster = 0usize;
    let mut gaps: Vec<f64> = Vec::with_capacity(n);
    for i in 0..removals.len() {
        if i > 0 {
            let gap = (removals[i].0 - removals[i - 1].0) as f64;
            if i >= 2 {
                let med = median_of(&gaps);
                if gap > params.spike_factor * med && gap > params.visit_threshold as f64 {
                    cluster += 1;
                }
            }
            gaps.push(gap);
        }
        assignment[removals[i].1] = cluster;
    }
    Ok((Partition::from_labels(&assignment)?, removals))
}

/// Runs `m_traj` independent walks at temperature `t` and reports, for
/// every pair, the fraction of walks in which the pair shared a cluster.
///
/// Trajectory `t_i` uses seed `seed ^ t_i`; a failed trajectory is
/// retried once with a derived seed and dropped from the denominator if
/// it fails again. Trajectories are independent and may run in
/// parallel; the merge is a commutative integer sum, so results do not
/// depend on scheduling.
///
/// # Errors
/// Needs `m_traj >= 1` and at least one completed trajectory.
pub fn sharing_ensemble(
    d: &DistanceMatrix,
    t: Temperature,
    m_traj: usize,
    params: &WalkParams,
    seed: u64,
) -> Result<SharingMatrix> {
    if m_traj == 0 {
        return Err(Error::InvalidInput("m_traj must be >= 1".into()));
    }
    params.validate()?;
    let p = transition(&similarity(d, t));
    let n = d.n();
    let parts: Vec<Option<Partition>> = (0..m_traj)
        .into_par_iter()
        .map(|ti| {
            let traj_seed = seed ^ ti as u64;
            walk_partition(&p, params, traj_seed)
                .or_else(|_| walk_partition(&p, params, mix_seed(traj_seed, 0x52_45_54_52_59)))
                .ok()
                .map(|(part, _)| part)
        })
        .collect();
    let mut counts = vec![0u32; n * n];
    let mut completed = 0usize;
    for part in parts.into_iter().flatten() {
        completed += 1;
        for i in 0..n {
            for j in (i + 1)..n {
                if part.same_cluster(i, j) {
                    counts[i * n + j] += 1;
                }
            }
        }
    }
    if completed == 0 {
        return Err(Error::Degenerate(
            "no walk trajectory completed within the step budget".into(),
        ));
    }
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let v = counts[i * n + j] as f64 / completed as f64;
            q[i * n + j] = v;
            q[j * n + i] = v;
        }
    }
    Ok(SharingMatrix {
        labels: d.labels().to_vec(),
        q,
        m_traj,
        completed,
    })
}

/// Counts the significantly non-zero eigenvalues of a sharing matrix:
/// those exceeding `rel_tol` times the largest eigenvalue.
///
/// # Errors
/// `rel_tol` must lie in `(0, 1)`; the eigensolver rejects asymmetric
/// input.
pub fn eigen_cluster_count(q: &SharingMatrix, rel_tol: f64) -> Result<usize> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidInput(format!(
            "rel_tol must lie in (0, 1), got {rel_tol}"
        )));
    }
    let eig = symmetric_eigenvalues(&q.q, q.n())?;
    let lambda1 = eig[0];
    Ok(eig.iter().filter(|&&l| l > rel_tol * lambda1).count())
}

/// Clusters the derived distance `1 - q` with complete-linkage
/// agglomeration cut at exactly `n_clusters` groups.
pub fn composition(q: &SharingMatrix, n_clusters: usize) -> Result<Partition> {
    let d = q.to_distance()?;
    let dg = hc_build(&d, Linkage::Complete)?;
    dg.cut(n_clusters)
}

/// Everything computed per grid temperature by [`profile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureProfile {
    labels: Vec<String>,
    grid: Vec<Temperature>,
    counts: Vec<usize>,
    partitions: Vec<Partition>,
    sharing: Vec<SharingMatrix>,
    /// Per grid point: (ultrametric-violating triples of `1 - q`, total triples).
    diagnostics: Vec<(usize, usize)>,
}

impl TemperatureProfile {
    /// Point labels.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// The scale grid, strictly increasing.
    pub fn grid(&self) -> &[Temperature] {
        &self.grid
    }

    /// Cluster count `N(T)` per grid point.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Composition partition (at `N(T)` clusters) per grid point.
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// Sharing matrix per grid point.
    pub fn sharing(&self) -> &[SharingMatrix] {
        &self.sharing
    }

    /// Ultrametricity diagnostics of `1 - q` per grid point.
    pub fn diagnostics(&self) -> &[(usize, usize)] {
        &self.diagnostics
    }

    /// Grid indices of the selected scales, ordered by decreasing
    /// temperature (coarse to fine).
    ///
    /// The grid is split into maximal runs of constant `N(T)`. A run
    /// qualifies when it spans at least `min_run` grid points and has
    /// `N(T) > 1`; it contributes the middle grid point (lower middle on
    /// even length). When several runs share one `N`, only the run with
    /// the largest temperatures survives.
    pub fn select_indices(&self, min_run: usize) -> Vec<usize> {
        select_run_middles(&self.counts, min_run)
    }
}

/// Run-selection core shared by [`TemperatureProfile::select_indices`]
/// and the tests; see that method for the rule.
fn select_run_middles(counts: &[usize], min_run: usize) -> Vec<usize> {
    let min_run = min_run.max(1);
    // Maximal constant runs as (start, len, value).
    let mut runs: Vec<(usize, usize, usize)> = Vec::new();
    for (i, &c) in counts.iter().enumerate() {
        match runs.last_mut() {
            Some((_, len, value)) if *value == c => *len += 1,
            _ => runs.push((i, 1, c)),
        }
    }
    // Scan from the hot end so duplicate N values keep the largest-T run.
    let mut seen = std::collections::HashSet::new();
    let mut picked: Vec<usize> = Vec::new();
    for &(start, len, value) in runs.iter().rev() {
        if len >= min_run && value > 1 && seen.insert(value) {
            picked.push(start + (len - 1) / 2);
        }
    }
    picked.sort_unstable_by(|a, b| b.cmp(a));
    picked
}

/// Sweeps the scale grid: at each temperature runs a sharing ensemble,
/// counts clusters via eigenvalues, and stores the composition at that
/// count. Grid point `i` derives its ensemble seed from `(seed, i)`.
///
/// # Errors
/// The grid must be strictly increasing with at least 3 points.
pub fn profile(
    d: &DistanceMatrix,
    grid: &[Temperature],
    m_traj: usize,
    params: &WalkParams,
    seed: u64,
) -> Result<TemperatureProfile> {
    let cfg = DcgConfig {
        m_traj,
        walk: params.clone(),
        ..DcgConfig::default()
    };
    profile_with(d, grid, &cfg, seed)
}

/// [`profile`] with every knob exposed through [`DcgConfig`].
pub fn profile_with(
    d: &DistanceMatrix,
    grid: &[Temperature],
    cfg: &DcgConfig,
    seed: u64,
) -> Result<TemperatureProfile> {
    if grid.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "temperature grid needs at least 3 points, got {}",
            grid.len()
        )));
    }
    for w in grid.windows(2) {
        if w[1].value() <= w[0].value() {
            return Err(Error::InvalidInput(format!(
                "temperature grid must be strictly increasing, saw {} then {}",
                w[0], w[1]
            )));
        }
    }
    let mut counts = Vec::with_capacity(grid.len());
    let mut partitions = Vec::with_capacity(grid.len());
    let mut sharing = Vec::with_capacity(grid.len());
    let mut diagnostics = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        let q = sharing_ensemble(d, t, cfg.m_traj, &cfg.walk, mix_seed(seed, i as u64))?;
        let n_t = eigen_cluster_count(&q, cfg.eigen_rel_tol)?;
        counts.push(n_t);
        partitions.push(composition(&q, n_t)?);
        diagnostics.push(q.ultrametric_diagnostic()?);
        sharing.push(q);
    }
    Ok(TemperatureProfile {
        labels: d.labels().to_vec(),
        grid: grid.to_vec(),
        counts,
        partitions,
        sharing,
        diagnostics,
    })
}

/// Selected scales of a profile, ordered coarse to fine (decreasing
/// temperature); see [`TemperatureProfile::select_indices`] for the rule.
pub fn select_temperatures(prof: &TemperatureProfile, min_run: usize) -> Vec<Temperature> {
    prof.select_indices(min_run)
        .into_iter()
        .map(|i| prof.grid()[i])
        .collect()
}

/// All knobs of a full run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcgConfig {
    /// Ensemble size per grid point (default 100).
    pub m_traj: usize,
    /// Walk and spike parameters.
    pub walk: WalkParams,
    /// Relative eigenvalue cutoff for `N(T)` (default 0.05).
    pub eigen_rel_tol: f64,
    /// Minimum plateau length for scale selection (default 3).
    pub min_run: usize,
}

impl Default for DcgConfig {
    fn default() -> Self {
        DcgConfig {
            m_traj: 100,
            walk: WalkParams::default(),
            eigen_rel_tol: 0.05,
            min_run: 3,
        }
    }
}

/// One selected scale with its (pre-nesting) composition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedLevel {
    /// Index into the profile grid.
    pub grid_index: usize,
    /// The selected temperature.
    pub temperature: Temperature,
    /// Cluster count `N(T)` at that temperature.
    pub cluster_count: usize,
    /// Composition partition as computed at that temperature, before
    /// nesting enforcement.
    pub partition: Partition,
}

/// Output of [`dcg_run`]: the tree plus everything needed for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcgRun {
    /// The multi-scale tree.
    pub tree: ClusterTree,
    /// The full scale sweep.
    pub profile: TemperatureProfile,
    /// Selected scales, coarse to fine.
    pub selected: Vec<SelectedLevel>,
    /// True when no scale qualified and the tree fell back to a single
    /// flat root cluster.
    pub degenerate_selection: bool,
}

/// Runs the full pipeline: profile, scale selection, nesting
/// enforcement, tree assembly. Level heights are the selected
/// temperature values.
///
/// Nesting is enforced bottom-up. The finest selected composition is
/// kept verbatim; at each coarser scale, every finer cluster is moved
/// wholesale into the coarser cluster containing the plurality of its
/// members (ties go to the lower coarser cluster id), so finer clusters
/// are never split. Consecutive levels that collapse to the same
/// grouping keep only the coarsest (largest-T) copy.
///
/// When no scale qualifies the tree degenerates to a single root
/// cluster at height 0 and `degenerate_selection` is set.
pub fn dcg_run(
    d: &DistanceMatrix,
    grid: &[Temperature],
    cfg: &DcgConfig,
    seed: u64,
) -> Result<DcgRun> {
    let prof = profile_with(d, grid, cfg, seed)?;
    let sel = prof.select_indices(cfg.min_run);
    let selected: Vec<SelectedLevel> = sel
        .iter()
        .map(|&i| SelectedLevel {
            grid_index: i,
            temperature: prof.grid()[i],
            cluster_count: prof.counts()[i],
            partition: prof.partitions()[i].clone(),
        })
        .collect();
    if selected.is_empty() {
        let tree = ClusterTree::new(
            d.labels().to_vec(),
            vec![Level {
                height: 0.0,
                partition: Partition::single_cluster(d.n())?,
            }],
        )?;
        return Ok(DcgRun {
            tree,
            profile: prof,
            selected,
            degenerate_selection: true,
        });
    }
    // Bottom-up nesting enforcement over the raw compositions.
    let raw: Vec<&Partition> = selected.iter().map(|s| &s.partition).collect();
    let mut enforced: Vec<Partition> = vec![raw.last().unwrap().to_owned().clone()];
    for l in (0..raw.len() - 1).rev() {
        let finer = enforced.last().unwrap();
        let coarse_raw = raw[l];
        // Plurality parent for each finer cluster.
        let mut parent = vec![0usize; finer.k()];
        for (c, members) in finer.clusters().iter().enumerate() {
            let mut votes = vec![0usize; coarse_raw.k()];
            for &m in members {
                votes[coarse_raw.cluster_of(m)] += 1;
            }
            let best = votes
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                .map(|(id, _)| id)
                .unwrap();
            parent[c] = best;
        }
        let assignment: Vec<usize> = (0..finer.len())
            .map(|i| parent[finer.cluster_of(i)])
            .collect();
        enforced.push(Partition::from_labels(&assignment)?);
    }
    enforced.reverse(); // now coarse -> fine, aligned with `selected`
    let mut levels: Vec<Level> = Vec::new();
    for (s, part) in selected.iter().zip(enforced) {
        match levels.last() {
            // Identical groupings keep only the coarsest copy.
            Some(prev) if prev.partition == part => continue,
            _ => levels.push(Level {
                height: s.temperature.value(),
                partition: part,
            }),
        }
    }
    let tree = ClusterTree::new(d.labels().to_vec(), levels)?;
    Ok(DcgRun {
        tree,
        profile: prof,
        selected,
        degenerate_selection: false,
    })
}

/// Convenience wrapper over [`dcg_run`] with default eigenvalue cutoff
/// and plateau length; returns just the tree.
pub fn dcg_tree(
    d: &DistanceMatrix,
    grid: &[Temperature],
    m_traj: usize,
    params: &WalkParams,
    seed: u64,
) -> Result<ClusterTree> {
    let cfg = DcgConfig {
        m_traj,
        walk: params.clone(),
        ..DcgConfig::default()
    };
    Ok(dcg_run(d, grid, &cfg, seed)?.tree)
}

/// Default scale grid: `count` log-spaced points from `median(d)/10` up
/// to `10 * max(d)` (when the median off-diagonal distance is 0, the
/// low end falls back to `max(d)/1000`).
///
/// # Errors
/// Needs `count >= 3` and at least one strictly positive distance.
pub fn default_grid(d: &DistanceMatrix, count: usize) -> Result<Vec<Temperature>> {
    if count < 3 {
        return Err(Error::InvalidInput(format!(
            "grid needs at least 3 points, got {count}"
        )));
    }
    let max = d.max();
    if max <= 0.0 {
        return Err(Error::Degenerate(
            "all pairwise distances are zero; no scale grid exists".into(),
        ));
    }
    let med = d.median_off_diagonal();
    let lo = if med > 0.0 { med / 10.0 } else { max / 1000.0 };
    let hi = 10.0 * max;
    log_grid(lo, hi, count)
}

/// `count` log-spaced temperatures from `lo` to `hi` inclusive.
///
/// # Errors
/// Needs `0 < lo < hi` and `count >= 3`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<Temperature>> {
    if count < 3 {
        return Err(Error::InvalidInput(format!(
            "grid needs at least 3 points, got {count}"
        )));
    }
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(Error::InvalidInput(format!(
            "grid bounds must satisfy 0 < lo < hi, got lo={lo}, hi={hi}"
        )));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let grid: Vec<Temperature> = (0..count)
        .map(|i| {
            let f = i as f64 / (count - 1) as f64;
            Temperature::new((llo + f * (lhi - llo)).exp())
        })
        .collect::<Result<_>>()?;
    for w in grid.windows(2) {
        if w[1].value() <= w[0].value() {
            return Err(Error::Degenerate(format!(
                "grid bounds {lo}..{hi} too tight for {count} distinct points"
            )));
        }
    }
    Ok(grid)
}
