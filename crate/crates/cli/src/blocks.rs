//! The `blocks.json` interchange file: `dm` writes it, `mimic` reads it.
//! It carries the block tiling (cluster assignments per axis), the
//! heatmap permutation with block boundaries, and run diagnostics.

use dcgkit::dm::{blocks, BlockDecomposition};
use dcgkit::{DataMatrix, Error, Partition, Result};
use serde::{Deserialize, Serialize};

/// Serialized block decomposition of one labeled matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlocksFile {
    /// Row labels in original matrix order.
    pub row_labels: Vec<String>,
    /// Column labels in original matrix order.
    pub col_labels: Vec<String>,
    /// Row cluster id per original row index.
    pub row_assignment: Vec<usize>,
    /// Column cluster id per original column index.
    pub col_assignment: Vec<usize>,
    pub n_row_clusters: usize,
    pub n_col_clusters: usize,
    /// Original row index per permuted (heatmap) position.
    pub row_order: Vec<usize>,
    /// Original column index per permuted position.
    pub col_order: Vec<usize>,
    /// Permuted row indices at which a new row cluster starts (0 omitted).
    pub row_boundaries: Vec<usize>,
    /// Permuted column indices at which a new column cluster starts.
    pub col_boundaries: Vec<usize>,
    /// Total-variation energy density of the matrix under this tiling.
    pub energy_density: f64,
    /// Coupling iterations executed.
    pub iterations: usize,
    /// Whether the coupling reached a fixed point before the cap.
    pub stable: bool,
}

impl BlocksFile {
    /// Reconstructs the decomposition against `m`, validating labels.
    pub fn to_decomposition(&self, m: &DataMatrix) -> Result<BlockDecomposition> {
        if self.row_labels != m.row_labels() || self.col_labels != m.col_labels() {
            return Err(Error::InvalidInput(
                "blocks file labels do not match the matrix".into(),
            ));
        }
        let rp = Partition::from_labels(&self.row_assignment)?;
        let cp = Partition::from_labels(&self.col_assignment)?;
        blocks(m, &rp, &cp)
    }
}

/// Positions (excluding 0) where the cluster id changes along an order.
pub fn boundaries(order: &[usize], assignment: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for (pos, w) in order.windows(2).enumerate() {
        if assignment[w[0]] != assignment[w[1]] {
            out.push(pos + 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundaries_follow_cluster_changes() {
        // Permuted order groups clusters 1,1,0,0,2.
        let order = vec![3, 4, 0, 1, 2];
        let assignment = vec![0, 0, 2, 1, 1];
        assert_eq!(boundaries(&order, &assignment), vec![2, 4]);
        assert_eq!(boundaries(&[0], &[0]), Vec::<usize>::new());
    }

    #[test]
    fn blocks_file_round_trips_through_json() {
        let bf = BlocksFile {
            row_labels: vec!["r0".into(), "r1".into()],
            col_labels: vec!["c0".into(), "c1".into()],
            row_assignment: vec![0, 1],
            col_assignment: vec![0, 0],
            n_row_clusters: 2,
            n_col_clusters: 1,
            row_order: vec![0, 1],
            col_order: vec![0, 1],
            row_boundaries: vec![1],
            col_boundaries: vec![],
            energy_density: 0.0,
            iterations: 1,
            stable: true,
        };
        let json = serde_json::to_string(&bf).unwrap();
        let back: BlocksFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, bf);
    }

    #[test]
    fn mismatched_labels_are_rejected() {
        let m = DataMatrix::binary(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
            vec![vec![Some(1.0), Some(0.0)], vec![Some(0.0), Some(1.0)]],
        )
        .unwrap();
        let bf = BlocksFile {
            row_labels: vec!["a".into(), "WRONG".into()],
            col_labels: vec!["x".into(), "y".into()],
            row_assignment: vec![0, 1],
            col_assignment: vec![0, 1],
            n_row_clusters: 2,
            n_col_clusters: 2,
            row_order: vec![0, 1],
            col_order: vec![0, 1],
            row_boundaries: vec![1],
            col_boundaries: vec![1],
            energy_density: 0.0,
            iterations: 1,
            stable: true,
        };
        assert!(bf.to_decomposition(&m).is_err());
    }
}
