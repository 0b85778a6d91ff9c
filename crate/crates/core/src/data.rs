//! Bundled example data.

use crate::error::Result;
use crate::matrix::DataMatrix;

/// The zoo matrix as labeled CSV text: 100 animals by 20 binary
/// features — 15 yes/no attributes plus the leg count expanded into
/// one indicator column per observed count (0, 2, 4, 6, 8 legs; the
/// five-armed starfish matches none of them).
pub const ZOO_CSV: &str = include_str!("../data/zoo.csv");

/// Parses [`ZOO_CSV`] into a binary [`DataMatrix`] with animals as rows
/// and features as columns.
///
/// # Errors
/// Never fails on the bundled text; the `Result` only mirrors the
/// parsing interface.
pub fn zoo_matrix() -> Result<DataMatrix> {
    DataMatrix::from_csv(ZOO_CSV)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::MatrixKind;

    #[test]
    fn zoo_has_expected_shape() {
        let zoo = zoo_matrix().unwrap();
        assert_eq!(zoo.n_rows(), 100);
        assert_eq!(zoo.n_cols(), 20);
        assert_eq!(zoo.kind(), MatrixKind::Binary);
        assert!(!zoo.has_gaps());
        assert_eq!(zoo.row_labels()[0], "aardvark");
        assert_eq!(zoo.row_labels()[99], "wren");
        assert_eq!(zoo.col_labels()[0], "hair");
        assert_eq!(zoo.col_labels()[19], "legs8");
    }

    #[test]
    fn zoo_legs_dummies_are_disjoint() {
        let zoo = zoo_matrix().unwrap();
        let starfish = zoo.row_labels().iter().position(|l| l == "starfish").unwrap();
        for (i, label) in zoo.row_labels().iter().enumerate() {
            let legs: f64 = (15..20).map(|j| zoo.get(i, j).unwrap()).sum();
            if i == starfish {
                assert_eq!(legs, 0.0, "starfish has five legs, no dummy");
            } else {
                assert_eq!(legs, 1.0, "{label} should match exactly one leg count");
            }
        }
    }

    #[test]
    fn zoo_spot_checks() {
        let zoo = zoo_matrix().unwrap();
        let row = |name: &str| zoo.row_labels().iter().position(|l| l == name).unwrap();
        let col = |name: &str| zoo.col_labels().iter().position(|l| l == name).unwrap();
        // The platypus lays eggs and gives milk.
        assert_eq!(zoo.get(row("platypus"), col("eggs")), Some(1.0));
        assert_eq!(zoo.get(row("platypus"), col("milk")), Some(1.0));
        // Mammal count via the milk column.
        let milk: f64 = (0..100).map(|i| zoo.get(i, col("milk")).unwrap()).sum();
        assert_eq!(milk, 41.0);
        // Bird count via feathers.
        let feathers: f64 = (0..100).map(|i| zoo.get(i, col("feathers")).unwrap()).sum();
        assert_eq!(feathers, 20.0);
    }
}
