//! Multi-level ultrametric cluster trees.
//!
//! A [`ClusterTree`] is an ordered stack of flat partitions, coarse to
//! fine, each carrying a height. Heights strictly decrease and branch
//! counts strictly increase downward, and every finer cluster nests inside
//! exactly one coarser cluster, so the induced cophenetic distance is an
//! exact ultrametric by construction.
//!
//! Trees serialize to Newick with one labeled internal node per (level,
//! cluster) pair. The label encodes the level index, cluster id, and exact
//! height (`L2C0_h0.75`), which makes parsing bit-exact: branch lengths
//! are emitted for external tools but ignored on re-read.

use crate::error::{Error, Result};
use crate::matrix::check_labels;
use crate::{DistanceMatrix, Partition};
use serde::{Deserialize, Serialize};

/// One level of a cluster tree: a partition at a height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// Scale at which this partition holds (a temperature or merge height).
    pub height: f64,
    /// The flat clustering at this level.
    pub partition: Partition,
}

/// An immutable multi-level tree over a named leaf set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterTree {
    leaves: Vec<String>,
    /// Ordered coarse -> fine.
    levels: Vec<Level>,
}

impl ClusterTree {
    /// Validates and builds a tree.
    ///
    /// # Errors
    /// Rejects empty inputs, partition/leaf size mismatches, heights that
    /// are not finite, negative, or not strictly decreasing, branch counts
    /// that are not strictly increasing, and any nesting violation.
    pub fn new(leaves: Vec<String>, levels: Vec<Level>) -> Result<Self> {
        check_labels("leaf", &leaves)?;
        if levels.is_empty() {
            return Err(Error::InvalidInput("tree needs at least one level".into()));
        }
        for (i, level) in levels.iter().enumerate() {
            if level.partition.len() != leaves.len() {
                return Err(Error::InvalidInput(format!(
                    "level {i} partitions {} leaves, tree has {}",
                    level.partition.len(),
                    leaves.len()
                )));
            }
            if !level.height.is_finite() || level.height < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "level {i} height {} must be finite and >= 0",
                    level.height
                )));
            }
        }
        for i in 1..levels.len() {
            if !(levels[i].height < levels[i - 1].height) {
                return Err(Error::InvalidInput(format!(
                    "heights must strictly decrease: level {} has {}, level {} has {}",
                    i - 1,
                    levels[i - 1].height,
                    i,
                    levels[i].height
                )));
            }
            if levels[i].partition.k() <= levels[i - 1].partition.k() {
                return Err(Error::InvalidInput(format!(
                    "branch counts must strictly increase: level {} has {}, level {} has {}",
                    i - 1,
                    levels[i - 1].partition.k(),
                    i,
                    levels[i].partition.k()
                )));
            }
            if !levels[i].partition.refines(&levels[i - 1].partition) {
                return Err(Error::InvalidInput(format!(
                    "level {i} is not nested inside level {}",
                    i - 1
                )));
            }
        }
        Ok(ClusterTree { leaves, levels })
    }

    /// Leaf names, in index order.
    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    /// Number of leaves.
    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    /// All levels, coarse to fine.
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// The coarsest level.
    pub fn coarsest(&self) -> &Level {
        &self.levels[0]
    }

    /// The finest level.
    pub fn finest(&self) -> &Level {
        self.levels.last().unwrap()
    }

    /// Height of the implicit join above the coarsest level, used when
    /// that level has more than one cluster (cophenetic top and Newick
    /// root). Any constant above the coarsest height preserves exact
    /// ultrametricity; we use twice the coarsest height (or 1 if it is 0).
    pub fn top_height(&self) -> f64 {
        let h = self.levels[0].height;
        if h > 0.0 {
            2.0 * h
        } else {
            1.0
        }
    }

    /// Cophenetic distance: `u(x,y)` is the height of the finest level
    /// where `x` and `y` share a cluster, or [`ClusterTree::top_height`]
    /// when they are separated even at the coarsest level.
    ///
    /// # Errors
    /// Never fails for a constructed tree.
    pub fn cophenetic(&self) -> Result<DistanceMatrix> {
        DistanceMatrix::from_fn(self.leaves.clone(), |i, j| {
            for level in self.levels.iter().rev() {
                if level.partition.same_cluster(i, j) {
                    return level.height;
                }
            }
            self.top_height()
        })
    }

    /// Permutation of leaf indices that groups leaves cluster-by-cluster
    /// at every level (sort key: cluster ids coarse to fine, then index).
    /// Used to order heatmap rows/columns.
    pub fn grouped_leaf_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n_leaves()).collect();
        order.sort_by_key(|&leaf| {
            let mut key: Vec<usize> = self
                .levels
                .iter()
                .map(|l| l.partition.cluster_of(leaf))
                .collect();
            key.push(leaf);
            key
        });
        order
    }

    /// Rewrites the tree over a new leaf ordering (same names, permuted).
    ///
    /// # Errors
    /// The new order must be a permutation of the existing leaf names.
    pub fn with_leaf_order(&self, order: &[String]) -> Result<ClusterTree> {
        if order.len() != self.leaves.len() {
            return Err(Error::InvalidInput(format!(
                "leaf order has {} names, tree has {}",
                order.len(),
                self.leaves.len()
            )));
        }
        let index_of = |name: &str| -> Result<usize> {
            self.leaves
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown leaf {name:?}")))
        };
        let perm: Vec<usize> = order
            .iter()
            .map(|n| index_of(n))
            .collect::<Result<Vec<_>>>()?;
        let levels = self
            .levels
            .iter()
            .map(|level| {
                let raw: Vec<usize> = perm
                    .iter()
                    .map(|&old| level.partition.cluster_of(old))
                    .collect();
                Ok(Level {
                    height: level.height,
                    partition: Partition::from_labels(&raw)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ClusterTree::new(order.to_vec(), levels)
    }

    /// Serializes to Newick (see module docs for the labeling scheme).
    pub fn to_newick(&self) -> String {
        let nl = self.levels.len();
        let mut out = String::new();
        // children_of[l][c] = cluster ids at level l+1 nested in (l, c).
        let mut children_of: Vec<Vec<Vec<usize>>> = Vec::new();
        for l in 0..nl.saturating_sub(1) {
            let coarse = &self.levels[l].partition;
            let fine = &self.levels[l + 1].partition;
            let mut kids = vec![Vec::new(); coarse.k()];
            for (child, members) in fine.clusters().iter().enumerate() {
                kids[coarse.cluster_of(members[0])].push(child);
            }
            children_of.push(kids);
        }
        fn write_node(
            tree: &ClusterTree,
            children_of: &[Vec<Vec<usize>>],
            level: usize,
            cluster: usize,
            parent_height: f64,
            out: &mut String,
        ) {
            let height = tree.levels[level].height;
            out.push('(');
            if level + 1 < tree.levels.len() {
                for (i, &child) in children_of[level][cluster].iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_node(tree, children_of, level + 1, child, height, out);
                }
            } else {
                let members = tree.levels[level].partition.clusters()[cluster].clone();
                for (i, leaf) in members.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&tree.leaves[*leaf]);
                    out.push_str(&format!(":{height}"));
                }
            }
            out.push(')');
            out.push_str(&format!("L{level}C{cluster}_h{height}"));
            out.push_str(&format!(":{}", parent_height - height));
        }
        let k0 = self.levels[0].partition.k();
        if k0 == 1 {
            // Single coarsest cluster doubles as the Newick root.
            let mut body = String::new();
            write_node(self, &children_of, 0, 0, self.levels[0].height, &mut body);
            // Drop the root's trailing ":0" branch length.
            let cut = body.rfind(':').unwrap();
            out.push_str(&body[..cut]);
        } else {
            let top = self.top_height();
            out.push('(');
            for c in 0..k0 {
                if c > 0 {
                    out.push(',');
                }
                write_node(self, &children_of, 0, c, top, &mut out);
            }
            out.push_str(&format!(")root_h{top}"));
        }
        out.push(';');
        out
    }

    /// Parses the Newick form produced by [`ClusterTree::to_newick`].
    /// Leaves come back in Newick traversal order; use
    /// [`ClusterTree::with_leaf_order`] to realign with an original
    /// ordering. Heights are read from node labels, so round-trips are
    /// bit-exact; branch lengths are ignored.
    ///
    /// # Errors
    /// Reports syntax errors, unlabeled internal nodes, level/height
    /// mismatches, and leaves missing from any level.
    pub fn from_newick(text: &str) -> Result<ClusterTree> {
        let tokens = tokenize(text)?;
        let mut pos = 0usize;
        let root = parse_node(&tokens, &mut pos)?;
        if pos < tokens.len() && tokens[pos] != Token::Semi {
            return Err(Error::Parse {
                line: 0,
                msg: "trailing content after tree".into(),
            });
        }
        let mut leaves: Vec<String> = Vec::new();
        collect_leaves(&root, &mut leaves);
        check_labels("leaf", &leaves)?;
        let leaf_index: std::collections::HashMap<&str, usize> = leaves
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        // (level, cluster-id, height, member leaf indices) per internal node.
        let mut records: Vec<(usize, usize, f64, Vec<usize>)> = Vec::new();
        collect_internal(&root, true, &leaf_index, &mut records)?;
        let n_levels = records.iter().map(|r| r.0 + 1).max().ok_or_else(|| {
            Error::Parse {
                line: 0,
                msg: "tree has no labeled levels".into(),
            }
        })?;
        let mut levels = Vec::with_capacity(n_levels);
        for l in 0..n_levels {
            let mut height: Option<f64> = None;
            let mut raw = vec![usize::MAX; leaves.len()];
            for (level, cluster, h, members) in records.iter().filter(|r| r.0 == l) {
                debug_assert_eq!(*level, l);
                match height {
                    None => height = Some(*h),
                    Some(existing) if existing != *h => {
                        return Err(Error::Parse {
                            line: 0,
                            msg: format!("level {l} carries two heights {existing} and {h}"),
                        })
                    }
                    _ => {}
                }
                for &m in members {
                    raw[m] = *cluster;
                }
            }
            if raw.contains(&usize::MAX) {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("level {l} does not cover every leaf"),
                });
            }
            levels.push(Level {
                height: height.unwrap(),
                partition: Partition::from_labels(&raw)?,
            });
        }
        ClusterTree::new(leaves, levels)
    }
}

/// Returns the stored partition of one tree level (coarse -> fine order).
///
/// # Errors
/// `level_index` must be within range.
pub fn cut_partition(tree: &ClusterTree, level_index: usize) -> Result<Partition> {
    tree.levels()
        .get(level_index)
        .map(|l| l.partition.clone())
        .ok_or_else(|| {
            Error::InvalidInput(format!(
                "level index {level_index} out of range (tree has {} levels)",
                tree.levels().len()
            ))
        })
}

// --- Newick plumbing -----------------------------------------------------

#[derive(Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Comma,
    Semi,
    Colon,
    Word(String),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' => {
                tokens.push(Token::Open);
                chars.next();
            }
            ')' => {
                tokens.push(Token::Close);
                chars.next();
            }
            ',' => {
                tokens.push(Token::Comma);
                chars.next();
            }
            ';' => {
                tokens.push(Token::Semi);
                chars.next();
            }
            ':' => {
                tokens.push(Token::Colon);
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ',' | ';' | ':') {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                tokens.push(Token::Word(word));
            }
        }
    }
    if tokens.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "empty Newick input".into(),
        });
    }
    Ok(tokens)
}

struct Node {
    label: Option<String>,
    children: Vec<Node>,
}

fn parse_node(tokens: &[Token], pos: &mut usize) -> Result<Node> {
    let syntax = |msg: &str| Error::Parse {
        line: 0,
        msg: msg.into(),
    };
    let mut node = Node {
        label: None,
        children: Vec::new(),
    };
    if matches!(tokens.get(*pos), Some(Token::Open)) {
        *pos += 1;
        loop {
            node.children.push(parse_node(tokens, pos)?);
            match tokens.get(*pos) {
                Some(Token::Comma) => *pos += 1,
                Some(Token::Close) => {
                    *pos += 1;
                    break;
                }
                _ => return Err(syntax("expected ',' or ')'")),
            }
        }
    }
    if let Some(Token::Word(w)) = tokens.get(*pos) {
        node.label = Some(w.clone());
        *pos += 1;
    }
    if matches!(tokens.get(*pos), Some(Token::Colon)) {
        *pos += 1;
        match tokens.get(*pos) {
            Some(Token::Word(w)) if w.parse::<f64>().is_ok() => *pos += 1,
            _ => return Err(syntax("expected a branch length after ':'")),
        }
    }
    if node.children.is_empty() && node.label.is_none() {
        return Err(syntax("leaf without a name"));
    }
    Ok(node)
}

fn collect_leaves(node: &Node, out: &mut Vec<String>) {
    if node.children.is_empty() {
        out.push(node.label.clone().unwrap());
    } else {
        for child in &node.children {
            collect_leaves(child, out);
        }
    }
}

/// Splits an internal label like `L2C0_h0.75` into (level, cluster, height).
fn parse_internal_label(label: &str) -> Result<(usize, usize, f64)> {
    let bad = || Error::Parse {
        line: 0,
        msg: format!("malformed internal node label {label:?}"),
    };
    let rest = label.strip_prefix('L').ok_or_else(bad)?;
    let (level, rest) = rest.split_once('C').ok_or_else(bad)?;
    let (cluster, height) = rest.split_once("_h").ok_or_else(bad)?;
    Ok((
        level.parse().map_err(|_| bad())?,
        cluster.parse().map_err(|_| bad())?,
        height.parse().map_err(|_| bad())?,
    ))
}

fn collect_internal(
    node: &Node,
    is_root: bool,
    leaf_index: &std::collections::HashMap<&str, usize>,
    records: &mut Vec<(usize, usize, f64, Vec<usize>)>,
) -> Result<()> {
    if node.children.is_empty() {
        return Ok(());
    }
    let label = node.label.as_deref().ok_or(Error::Parse {
        line: 0,
        msg: "unlabeled internal node".into(),
    })?;
    let is_virtual_root = label.starts_with("root");
    if is_virtual_root && !is_root {
        return Err(Error::Parse {
            line: 0,
            msg: "virtual root label below the root".into(),
        });
    }
    if !is_virtual_root {
        let (level, cluster, height) = parse_internal_label(label)?;
        let mut members = Vec::new();
        let mut names = Vec::new();
        collect_leaves(node, &mut names);
        for name in names {
            members.push(*leaf_index.get(name.as_str()).unwrap());
        }
        records.push((level, cluster, height, members));
    }
    for child in &node.children {
        collect_internal(child, false, leaf_index, records)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    fn two_level_tree() -> ClusterTree {
        ClusterTree::new(
            names(5),
            vec![
                Level {
                    height: 2.0,
                    partition: Partition::from_labels(&[0, 0, 0, 1, 1]).unwrap(),
                },
                Level {
                    height: 0.5,
                    partition: Partition::from_labels(&[0, 0, 1, 2, 3]).unwrap(),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_nested_levels() {
        let err = ClusterTree::new(
            names(4),
            vec![
                Level {
                    height: 2.0,
                    partition: Partition::from_labels(&[0, 0, 1, 1]).unwrap(),
                },
                Level {
                    height: 1.0,
                    partition: Partition::from_labels(&[0, 1, 1, 2]).unwrap(),
                },
            ],
        );
        assert!(err.is_err());
    }

    #[test]
    fn rejects_non_decreasing_heights() {
        let err = ClusterTree::new(
            names(3),
            vec![
                Level {
                    height: 1.0,
                    partition: Partition::from_labels(&[0, 0, 0]).unwrap(),
                },
                Level {
                    height: 1.0,
                    partition: Partition::from_labels(&[0, 1, 2]).unwrap(),
                },
            ],
        );
        assert!(err.is_err());
    }

    #[test]
    fn cophenetic_heights_and_join() {
        let t = two_level_tree();
        let d = t.cophenetic().unwrap();
        assert_eq!(d.get(0, 1), 0.5); // together at the finest level
        assert_eq!(d.get(0, 2), 2.0); // joined only at the coarse level
        assert_eq!(d.get(0, 3), 4.0); // implicit top join (2 * coarsest)
        let (flat, v) = crate::is_ultrametric(&d, 0.0).unwrap();
        assert!(flat, "{v} violating triples");
    }

    #[test]
    fn cut_partition_returns_levels() {
        let t = two_level_tree();
        assert_eq!(cut_partition(&t, 0).unwrap().k(), 2);
        assert_eq!(cut_partition(&t, 1).unwrap().k(), 4);
        assert!(cut_partition(&t, 2).is_err());
    }

    #[test]
    fn newick_round_trip_multi_root() {
        let t = two_level_tree();
        let text = t.to_newick();
        let back = ClusterTree::from_newick(&text)
            .unwrap()
            .with_leaf_order(&t.leaves().to_vec())
            .unwrap();
        assert_eq!(back, t);
        // Serialization is stable.
        assert_eq!(back.to_newick(), text);
    }

    #[test]
    fn newick_round_trip_single_root() {
        let t = ClusterTree::new(
            names(4),
            vec![
                Level {
                    height: 3.0,
                    partition: Partition::from_labels(&[0, 0, 0, 0]).unwrap(),
                },
                Level {
                    height: 1.5,
                    partition: Partition::from_labels(&[0, 0, 1, 1]).unwrap(),
                },
                Level {
                    height: 0.25,
                    partition: Partition::from_labels(&[0, 1, 2, 2]).unwrap(),
                },
            ],
        )
        .unwrap();
        let back = ClusterTree::from_newick(&t.to_newick())
            .unwrap()
            .with_leaf_order(&t.leaves().to_vec())
            .unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn grouped_leaf_order_clusters_are_contiguous() {
        let t = ClusterTree::new(
            names(4),
            vec![Level {
                height: 1.0,
                partition: Partition::from_labels(&[0, 1, 0, 1]).unwrap(),
            }],
        )
        .unwrap();
        assert_eq!(t.grouped_leaf_order(), vec![0, 2, 1, 3]);
    }
}
