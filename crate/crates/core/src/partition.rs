//! Flat partitions of a leaf set.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A partition of leaves `0..n` into clusters `0..k`, stored in canonical
/// form: cluster ids are assigned by first appearance, so two partitions
/// are equal iff they group the leaves identically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Builds a partition from arbitrary per-leaf cluster labels,
    /// renumbering clusters by first appearance.
    ///
    /// # Errors
    /// Rejects an empty leaf set.
    pub fn from_labels(raw: &[usize]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidInput("partition over zero leaves".into()));
        }
        let mut remap: Vec<Option<usize>> = Vec::new();
        let mut assignment = Vec::with_capacity(raw.len());
        let mut k = 0;
        for &label in raw {
            if label >= remap.len() {
                remap.resize(label + 1, None);
            }
            let id = *remap[label].get_or_insert_with(|| {
                let id = k;
                k += 1;
                id
            });
            assignment.push(id);
        }
        Ok(Partition { assignment, k })
    }

    /// The single-cluster partition over `n` leaves.
    pub fn single_cluster(n: usize) -> Result<Self> {
        Self::from_labels(&vec![0; n])
    }

    /// The all-singletons partition over `n` leaves.
    pub fn singletons(n: usize) -> Result<Self> {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    /// Number of leaves.
    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    /// True when there are no leaves (never for constructed partitions).
    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Number of clusters.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Cluster id of a leaf.
    pub fn cluster_of(&self, leaf: usize) -> usize {
        self.assignment[leaf]
    }

    /// Per-leaf cluster ids.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// True if two leaves share a cluster.
    pub fn same_cluster(&self, a: usize, b: usize) -> bool {
        self.assignment[a] == self.assignment[b]
    }

    /// Members of every cluster, indexed by cluster id; members ascend.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (leaf, &c) in self.assignment.iter().enumerate() {
            out[c].push(leaf);
        }
        out
    }

    /// True if every cluster of `self` is contained in one cluster of
    /// `coarser` (i.e. `self` refines `coarser`).
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.len() != coarser.len() {
            return false;
        }
        let mut image: Vec<Option<usize>> = vec![None; self.k];
        for (leaf, &c) in self.assignment.iter().enumerate() {
            match image[c] {
                None => image[c] = Some(coarser.cluster_of(leaf)),
                Some(target) if target != coarser.cluster_of(leaf) => return false,
                _ => {}
            }
        }
        true
    }
}

/// Adjusted Rand index between two partitions of the same leaf set:
/// 1 for identical groupings, near 0 for independent ones.
///
/// # Errors
/// Requires equal leaf counts.
pub fn adjusted_rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "partitions cover {} and {} leaves",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    let mut table = vec![0usize; a.k() * b.k()];
    for leaf in 0..n {
        table[a.cluster_of(leaf) * b.k() + b.cluster_of(leaf)] += 1;
    }
    let choose2 = |x: usize| (x * x.saturating_sub(1)) as f64 / 2.0;
    let sum_cells: f64 = table.iter().map(|&c| choose2(c)).sum();
    let sum_a: f64 = a.clusters().iter().map(|c| choose2(c.len())).sum();
    let sum_b: f64 = b.clusters().iter().map(|c| choose2(c.len())).sum();
    let total = choose2(n);
    let expected = sum_a * sum_b / total;
    let max_index = (sum_a + sum_b) / 2.0;
    if (max_index - expected).abs() < f64::EPSILON {
        // Both partitions degenerate (e.g. both single-cluster): identical
        // groupings get 1 by convention.
        return Ok(if a == b { 1.0 } else { 0.0 });
    }
    Ok((sum_cells - expected) / (max_index - expected))
}
