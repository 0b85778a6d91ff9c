//! Agglomerative hierarchical clustering.
//!
//! [`hc_build`] grows a binary merge tree bottom-up: start from singleton
//! clusters, repeatedly join the closest pair under the chosen linkage,
//! and update distances with the Lance-Williams recurrences. Ties are
//! broken by the lexicographically smallest pair of current cluster ids,
//! so results are fully deterministic.
//!
//! Node numbering follows the usual convention: leaves are `0..n`, and the
//! cluster created by merge step `t` is node `n + t`.

use crate::error::{Error, Result};
use crate::matrix::check_labels;
use crate::tree::Level;
use crate::{ClusterTree, DistanceMatrix, Partition};
use serde::{Deserialize, Serialize};

/// Linkage rule used to measure cluster-to-cluster distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    /// Minimum over cross pairs.
    Single,
    /// Maximum over cross pairs.
    Complete,
    /// Unweighted mean over cross pairs (UPGMA).
    Average,
}

impl std::str::FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(Error::InvalidInput(format!(
                "unknown linkage {other:?} (expected single, complete, or average)"
            ))),
        }
    }
}

/// One agglomeration step: nodes `left < right` joined at `height`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    /// Smaller of the two joined node ids.
    pub left: usize,
    /// Larger of the two joined node ids.
    pub right: usize,
    /// Linkage distance at which the join happened.
    pub height: f64,
}

/// A full binary merge history over `n` labeled leaves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    labels: Vec<String>,
    merges: Vec<Merge>,
}

impl Dendrogram {
    /// Number of leaves.
    pub fn n_leaves(&self) -> usize {
        self.labels.len()
    }

    /// Leaf labels, in index order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// The `n - 1` merges in execution order.
    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Height at which the `k`-cluster partition forms: the height of
    /// merge `n - k`, or 0 for `k = n`.
    pub fn formation_height(&self, k: usize) -> f64 {
        let n = self.n_leaves();
        if k == n {
            0.0
        } else {
            self.merges[n - k - 1].height
        }
    }

    /// Cuts the merge history after `n - k` steps, yielding exactly `k`
    /// clusters.
    ///
    /// # Errors
    /// `k` must lie in `[1, n]`.
    pub fn cut(&self, k: usize) -> Result<Partition> {
        let n = self.n_leaves();
        if k < 1 || k > n {
            return Err(Error::InvalidInput(format!(
                "cannot cut {n}-leaf dendrogram into {k} clusters"
            )));
        }
        // member_of[node] = current cluster root for every node formed so far.
        let mut member_of: Vec<usize> = (0..2 * n - 1).collect();
        for (t, m) in self.merges.iter().take(n - k).enumerate() {
            let new = n + t;
            member_of[m.left] = new;
            member_of[m.right] = new;
        }
        let resolve = |mut x: usize| {
            while member_of[x] != x {
                x = member_of[x];
            }
            x
        };
        let raw: Vec<usize> = (0..n).map(resolve).collect();
        Partition::from_labels(&raw)
    }

    /// True when the `k`-cluster partition exists at a strictly positive
    /// height interval, i.e. tied merges do not skip straight past it.
    pub fn is_achievable(&self, k: usize) -> bool {
        let n = self.n_leaves();
        if k < 1 || k > n {
            return false;
        }
        if k == 1 {
            return true;
        }
        // The k-partition lives between its formation height and the
        // height of the next merge; equal heights collapse the interval.
        self.formation_height(k) < self.formation_height(k - 1)
    }

    /// All achievable cluster counts, ascending.
    pub fn achievable_k(&self) -> Vec<usize> {
        (1..=self.n_leaves())
            .filter(|&k| self.is_achievable(k))
            .collect()
    }

    /// Newick serialization with branch lengths derived from merge
    /// heights (leaves sit at height 0).
    pub fn to_newick(&self) -> String {
        let n = self.n_leaves();
        fn write(dg: &Dendrogram, node: usize, parent_height: f64, out: &mut String) {
            let n = dg.n_leaves();
            if node < n {
                out.push_str(&dg.labels[node]);
                out.push_str(&format!(":{parent_height}"));
            } else {
                let m = dg.merges[node - n];
                out.push('(');
                write(dg, m.left, m.height, out);
                out.push(',');
                write(dg, m.right, m.height, out);
                out.push(')');
                out.push_str(&format!(":{}", parent_height - m.height));
            }
        }
        let mut out = String::new();
        if n == 1 {
            out.push_str(&self.labels[0]);
        } else {
            let root = 2 * n - 2;
            let m = self.merges[n - 2];
            out.push('(');
            write(self, m.left, m.height, &mut out);
            out.push(',');
            write(self, m.right, m.height, &mut out);
            out.push(')');
            let _ = root;
        }
        out.push(';');
        out
    }
}

/// Agglomerates `D` under the given linkage.
///
/// # Errors
/// Needs at least 2 points.
pub fn hc_build(d: &DistanceMatrix, link: Linkage) -> Result<Dendrogram> {
    let n = d.n();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "clustering needs at least 2 points, found {n}"
        )));
    }
    check_labels("leaf", d.labels())?;
    let total = 2 * n - 1;
    // Working distances between alive cluster ids, updated in place.
    let mut dist = vec![0.0f64; total * total];
    for i in 0..n {
        for j in 0..n {
            dist[i * total + j] = d.get(i, j);
        }
    }
    let mut alive = vec![false; total];
    let mut size = vec![0usize; total];
    for i in 0..n {
        alive[i] = true;
        size[i] = 1;
    }
    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        // Closest alive pair; the scan order makes ties resolve to the
        // lexicographically smallest (i, j).
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..total {
            if !alive[i] {
                continue;
            }
            for j in (i + 1)..total {
                if !alive[j] {
                    continue;
                }
                let v = dist[i * total + j];
                if best.map_or(true, |(_, _, b)| v < b) {
                    best = Some((i, j, v));
                }
            }
        }
        let (i, j, height) = best.expect("at least two alive clusters remain");
        debug_assert!(
            merges
                .last()
                .map_or(true, |m: &Merge| height >= m.height - 1e-12),
            "merge heights must be non-decreasing"
        );
        let new = n + step;
        for k in 0..total {
            if !alive[k] || k == i || k == j {
                continue;
            }
            let dik = dist[i * total + k];
            let djk = dist[j * total + k];
            let v = match link {
                Linkage::Single => dik.min(djk),
                Linkage::Complete => dik.max(djk),
                Linkage::Average => {
                    let (si, sj) = (size[i] as f64, size[j] as f64);
                    (si * dik + sj * djk) / (si + sj)
                }
            };
            dist[new * total + k] = v;
            dist[k * total + new] = v;
        }
        alive[i] = false;
        alive[j] = false;
        alive[new] = true;
        size[new] = size[i] + size[j];
        merges.push(Merge {
            left: i,
            right: j,
            height,
        });
    }
    Ok(Dendrogram {
        labels: d.labels().to_vec(),
        merges,
    })
}

/// Cuts a dendrogram at each requested cluster count and stacks the cuts
/// into a [`ClusterTree`] whose level heights are the formation heights.
///
/// # Errors
/// `k_list` must be strictly increasing within `[1, n]`, and every `k`
/// must be achievable; an unreachable `k` (tied merges collapse straight
/// past it) is reported together with the nearest achievable count.
pub fn dendrogram_to_tree(dg: &Dendrogram, k_list: &[usize]) -> Result<ClusterTree> {
    let n = dg.n_leaves();
    if k_list.is_empty() {
        return Err(Error::InvalidInput("k_list is empty".into()));
    }
    for w in k_list.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidInput(format!(
                "k_list must be strictly increasing, saw {} then {}",
                w[0], w[1]
            )));
        }
    }
    let mut levels = Vec::with_capacity(k_list.len());
    for &k in k_list {
        if k < 1 || k > n {
            return Err(Error::InvalidInput(format!(
                "requested cut k={k} outside [1, {n}]"
            )));
        }
        if !dg.is_achievable(k) {
            let nearest = dg
                .achievable_k()
                .into_iter()
                .min_by_key(|a| (a.abs_diff(k), *a))
                .expect("k=1 is always achievable");
            return Err(Error::InvalidInput(format!(
                "cut k={k} is unreachable (tied merges); nearest achievable k is {nearest}"
            )));
        }
        levels.push(Level {
            height: dg.formation_height(k),
            partition: dg.cut(k)?,
        });
    }
    ClusterTree::new(dg.labels().to_vec(), levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// 3-point fixture: d(0,1)=1, d(0,2)=2, d(1,2)=3.
    fn three_point() -> DistanceMatrix {
        DistanceMatrix::from_fn(
            vec!["a".into(), "b".into(), "c".into()],
            |i, j| match (i, j) {
                (0, 1) => 1.0,
                (0, 2) => 2.0,
                (1, 2) => 3.0,
                _ => unreachable!(),
            },
        )
        .unwrap()
    }

    #[test]
    fn single_linkage_three_points() {
        let dg = hc_build(&three_point(), Linkage::Single).unwrap();
        assert_eq!(dg.merges()[0], Merge { left: 0, right: 1, height: 1.0 });
        assert_eq!(dg.merges()[1].height, 2.0);
    }

    #[test]
    fn complete_linkage_three_points() {
        let dg = hc_build(&three_point(), Linkage::Complete).unwrap();
        assert_eq!(dg.merges()[1].height, 3.0);
    }

    #[test]
    fn average_linkage_three_points() {
        let dg = hc_build(&three_point(), Linkage::Average).unwrap();
        assert_relative_eq!(dg.merges()[1].height, 2.5);
    }

    /// Direct agglomeration oracle: cluster distances recomputed from the
    /// original pairwise matrix by the linkage definition at every step.
    fn oracle(d: &DistanceMatrix, link: Linkage) -> Vec<Merge> {
        let n = d.n();
        let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
        let cluster_dist = |a: &[usize], b: &[usize]| -> f64 {
            let cross: Vec<f64> = a
                .iter()
                .flat_map(|&x| b.iter().map(move |&y| d.get(x, y)))
                .collect();
            match link {
                Linkage::Single => cross.iter().cloned().fold(f64::INFINITY, f64::min),
                Linkage::Complete => cross.iter().cloned().fold(0.0, f64::max),
                Linkage::Average => cross.iter().sum::<f64>() / cross.len() as f64,
            }
        };
        let mut merges = Vec::new();
        for step in 0..n - 1 {
            let mut best: Option<(usize, usize, f64)> = None;
            for a in 0..clusters.len() {
                for b in (a + 1)..clusters.len() {
                    let (ia, ib) = (clusters[a].0, clusters[b].0);
                    let (lo, hi) = (ia.min(ib), ia.max(ib));
                    let v = cluster_dist(&clusters[a].1, &clusters[b].1);
                    let better = match best {
                        None => true,
                        Some((bl, bh, bv)) => {
                            v < bv || (v == bv && (lo, hi) < (bl, bh))
                        }
                    };
                    if better {
                        best = Some((lo, hi, v));
                    }
                }
            }
            let (lo, hi, height) = best.unwrap();
            let pa = clusters.iter().position(|c| c.0 == lo).unwrap();
            let pb = clusters.iter().position(|c| c.0 == hi).unwrap();
            let members_b = clusters[pb].1.clone();
            clusters[pa].1.extend(members_b);
            clusters[pa].0 = n + step;
            clusters.remove(pb);
            merges.push(Merge {
                left: lo,
                right: hi,
                height,
            });
        }
        merges
    }

    #[test]
    fn four_leaf_agreement_with_direct_oracle() {
        // Deterministic pseudo-random 4-point matrices.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let mut vals = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let v = 0.1 + next();
                    vals[i][j] = v;
                    vals[j][i] = v;
                }
            }
            let d = DistanceMatrix::from_fn(
                (0..4).map(|i| format!("p{i}")).collect(),
                |i, j| vals[i][j],
            )
            .unwrap();
            for link in [Linkage::Single, Linkage::Complete, Linkage::Average] {
                let dg = hc_build(&d, link).unwrap();
                let expect = oracle(&d, link);
                // Heights may differ in the last ulp: the incremental
                // average sums in a different order than the direct mean.
                for (got, want) in dg.merges().iter().zip(&expect) {
                    assert_eq!((got.left, got.right), (want.left, want.right));
                    assert_relative_eq!(got.height, want.height, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn tree_cuts_match_examples() {
        let dg = hc_build(&three_point(), Linkage::Single).unwrap();
        let tree = dendrogram_to_tree(&dg, &[2, 3]).unwrap();
        assert_eq!(tree.levels()[0].partition.assignment(), &[0, 0, 1]);
        assert_eq!(tree.levels()[0].height, 1.0);
        assert_eq!(tree.levels()[1].partition.k(), 3);
        assert_eq!(tree.levels()[1].height, 0.0);
        let root = dendrogram_to_tree(&dg, &[1]).unwrap();
        assert_eq!(root.levels()[0].partition.k(), 1);
    }

    #[test]
    fn tied_merges_report_nearest_achievable() {
        let d = DistanceMatrix::from_fn(
            (0..3).map(|i| format!("p{i}")).collect(),
            |_, _| 1.0,
        )
        .unwrap();
        let dg = hc_build(&d, Linkage::Single).unwrap();
        assert!(!dg.is_achievable(2));
        let err = dendrogram_to_tree(&dg, &[2]).unwrap_err();
        assert!(err.to_string().contains("nearest achievable"));
    }

    #[test]
    fn average_linkage_cophenetic_is_ultrametric() {
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut vals = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in (i + 1)..6 {
                let v = 0.5 + next();
                vals[i][j] = v;
                vals[j][i] = v;
            }
        }
        let d = DistanceMatrix::from_fn(
            (0..6).map(|i| format!("p{i}")).collect(),
            |i, j| vals[i][j],
        )
        .unwrap();
        let dg = hc_build(&d, Linkage::Average).unwrap();
        let tree = dendrogram_to_tree(&dg, &dg.achievable_k()).unwrap();
        let (ok, _) = crate::is_ultrametric(&tree.cophenetic().unwrap(), 1e-9).unwrap();
        assert!(ok);
    }

    #[test]
    fn newick_export_contains_all_leaves() {
        let dg = hc_build(&three_point(), Linkage::Average).unwrap();
        let nwk = dg.to_newick();
        for name in ["a", "b", "c"] {
            assert!(nwk.contains(name));
        }
        assert!(nwk.ends_with(';'));
    }
}
