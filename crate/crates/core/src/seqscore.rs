//! Pairwise scoring of pre-aligned nucleotide sequences.
//!
//! Input is a set of equal-length aligned strings over `{A,C,G,T,-}`
//! (aligned FASTA or CLUSTAL text). Each unordered pair is scored over
//! its *comparison window* — the columns where both sequences have
//! started and neither has ended, terminal gap overhangs excluded:
//!
//! * columns where both sequences hold `-` are invisible: they score
//!   nothing, count nothing, and do not interrupt a gap run;
//! * every matching character pair adds 1, mismatches add 0;
//! * every maximal one-sided gap run of visible length `L` costs
//!   `A + B·L` with gap-open `A` and gap-extend `B`;
//! * `raw` is matches minus total gap penalties, and `normalized` is
//!   `raw` divided by the number of visible window columns
//!   (`common_length`).
//!
//! [`similarity_matrix`] scores all pairs, then min-max standardizes the
//! off-diagonal scores to `[0,1]` — `(s − min)/(max − min)`, the shift
//! and rescale that lands the extremes exactly on 0 and 1 — and fixes
//! the diagonal at 1. Standardization is always relative to the scored
//! set, so re-scoring an extracted subgroup re-spreads its scores. The
//! grid converts to a distance matrix as `1 − s` for tree building.

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::matrix::check_labels;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Gap penalty parameters: a run of visible length `L` costs
/// `gap_open + gap_extend × L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoringParams {
    /// Opening penalty `A` charged once per gap run.
    pub gap_open: f64,
    /// Extension penalty `B` charged per visible gapped column.
    pub gap_extend: f64,
}

impl Default for ScoringParams {
    fn default() -> Self {
        ScoringParams {
            gap_open: 15.0,
            gap_extend: 0.2,
        }
    }
}

impl ScoringParams {
    /// Validates and wraps the penalties.
    ///
    /// # Errors
    /// Both penalties must be finite and non-negative.
    pub fn new(gap_open: f64, gap_extend: f64) -> Result<Self> {
        let p = ScoringParams {
            gap_open,
            gap_extend,
        };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if !(self.gap_open.is_finite() && self.gap_open >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "gap-open penalty must be finite and non-negative, got {}",
                self.gap_open
            )));
        }
        if !(self.gap_extend.is_finite() && self.gap_extend >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "gap-extend penalty must be finite and non-negative, got {}",
                self.gap_extend
            )));
        }
        Ok(())
    }
}

/// A set of equal-length aligned sequences over `{A,C,G,T,-}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedSet {
    names: Vec<String>,
    sequences: Vec<String>,
}

impl AlignedSet {
    /// Validates and wraps named aligned sequences. Letters are
    /// upper-cased on the way in.
    ///
    /// # Errors
    /// Needs at least two sequences, unique well-formed names, equal
    /// non-zero lengths, and symbols drawn from `{A,C,G,T,-}`.
    pub fn new(names: Vec<String>, sequences: Vec<String>) -> Result<Self> {
        if names.len() != sequences.len() {
            return Err(Error::InvalidInput(format!(
                "{} names for {} sequences",
                names.len(),
                sequences.len()
            )));
        }
        if names.len() < 2 {
            return Err(Error::InvalidInput(
                "an aligned set needs at least 2 sequences".into(),
            ));
        }
        check_labels("sequence", &names)?;
        let sequences: Vec<String> = sequences
            .into_iter()
            .map(|s| s.to_ascii_uppercase())
            .collect();
        let len = sequences[0].len();
        if len == 0 {
            return Err(Error::InvalidInput("sequences are empty".into()));
        }
        for (name, seq) in names.iter().zip(&sequences) {
            if seq.len() != len {
                return Err(Error::InvalidInput(format!(
                    "sequence {name:?} has aligned length {}, expected {len}",
                    seq.len()
                )));
            }
            if let Some(bad) = seq.chars().find(|c| !matches!(c, 'A' | 'C' | 'G' | 'T' | '-')) {
                return Err(Error::InvalidInput(format!(
                    "sequence {name:?} contains invalid symbol {bad:?}"
                )));
            }
        }
        Ok(AlignedSet { names, sequences })
    }

    /// Number of sequences.
    pub fn n_sequences(&self) -> usize {
        self.names.len()
    }

    /// Shared aligned length.
    pub fn aligned_len(&self) -> usize {
        self.sequences[0].len()
    }

    /// Sequence names, in input order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The `i`-th aligned sequence.
    pub fn sequence(&self, i: usize) -> &str {
        &self.sequences[i]
    }
}

/// Supported alignment text formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlignmentFormat {
    /// FASTA records whose sequences are already aligned (equal length).
    AlignedFasta,
    /// CLUSTAL interleaved block output.
    Clustal,
}

impl FromStr for AlignmentFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aligned-fasta" => Ok(AlignmentFormat::AlignedFasta),
            "clustal" => Ok(AlignmentFormat::Clustal),
            other => Err(Error::InvalidInput(format!(
                "unknown alignment format {other:?}; expected \"aligned-fasta\" or \"clustal\""
            ))),
        }
    }
}

impl fmt::Display for AlignmentFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlignmentFormat::AlignedFasta => "aligned-fasta",
            AlignmentFormat::Clustal => "clustal",
        })
    }
}

/// Parses alignment text in the given format.
///
/// # Errors
/// Malformed records, invalid symbols, duplicate names, and ragged
/// lengths are reported with 1-based line numbers.
pub fn parse_alignment(text: &str, format: AlignmentFormat) -> Result<AlignedSet> {
    match format {
        AlignmentFormat::AlignedFasta => parse_aligned_fasta(text),
        AlignmentFormat::Clustal => parse_clustal(text),
    }
}

fn check_symbols(chunk: &str, line: usize) -> Result<String> {
    let upper = chunk.to_ascii_uppercase();
    if let Some(bad) = upper
        .chars()
        .find(|c| !matches!(c, 'A' | 'C' | 'G' | 'T' | '-'))
    {
        return Err(Error::Parse {
            line,
            msg: format!("invalid symbol {bad:?}; expected A, C, G, T or -"),
        });
    }
    Ok(upper)
}

fn parse_aligned_fasta(text: &str) -> Result<AlignedSet> {
    // (header line, name, accumulated sequence)
    let mut records: Vec<(usize, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix('>') {
            let Some(name) = header.split_whitespace().next() else {
                return Err(Error::Parse {
                    line,
                    msg: "empty FASTA header".into(),
                });
            };
            if records.iter().any(|(_, n, _)| n == name) {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate sequence name {name:?}"),
                });
            }
            records.push((line, name.to_string(), String::new()));
        } else {
            let Some(last) = records.last_mut() else {
                return Err(Error::Parse {
                    line,
                    msg: "sequence data before the first '>' header".into(),
                });
            };
            let chunk: String = trimmed.split_whitespace().collect();
            last.2.push_str(&check_symbols(&chunk, line)?);
        }
    }
    if records.len() < 2 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("found {} FASTA records, need at least 2", records.len()),
        });
    }
    let want = records[0].2.len();
    for (line, name, seq) in &records {
        if seq.is_empty() {
            return Err(Error::Parse {
                line: *line,
                msg: format!("sequence {name:?} has no data"),
            });
        }
        if seq.len() != want {
            return Err(Error::Parse {
                line: *line,
                msg: format!(
                    "sequence {name:?} has aligned length {}, expected {want}",
                    seq.len()
                ),
            });
        }
    }
    let (names, seqs) = records.into_iter().map(|(_, n, s)| (n, s)).unzip();
    AlignedSet::new(names, seqs)
}

fn parse_clustal(text: &str) -> Result<AlignedSet> {
    // (first-seen line, name, accumulated sequence), in appearance order.
    let mut records: Vec<(usize, String, String)> = Vec::new();
    let mut saw_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        // Header banner ("CLUSTAL W (…) multiple sequence alignment").
        if !saw_content && raw.trim_start().to_ascii_uppercase().starts_with("CLUSTAL") {
            saw_content = true;
            continue;
        }
        saw_content = true;
        // Conservation rows are indented under the sequence chunks.
        if raw.starts_with([' ', '\t']) {
            continue;
        }
        let mut parts = raw.split_whitespace();
        let name = parts.next().expect("non-empty line has a first token");
        let Some(chunk) = parts.next() else {
            return Err(Error::Parse {
                line,
                msg: format!("sequence {name:?} has no chunk on this line"),
            });
        };
        // CLUSTAL optionally appends a cumulative residue count.
        if let Some(extra) = parts.next() {
            if !extra.chars().all(|c| c.is_ascii_digit()) || parts.next().is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("unexpected trailing field {extra:?}"),
                });
            }
        }
        let chunk = check_symbols(chunk, line)?;
        match records.iter_mut().find(|(_, n, _)| n == name) {
            Some((_, _, seq)) => seq.push_str(&chunk),
            None => records.push((line, name.to_string(), chunk)),
        }
    }
    if records.len() < 2 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("found {} CLUSTAL records, need at least 2", records.len()),
        });
    }
    let want = records[0].2.len();
    for (line, name, seq) in &records {
        if seq.len() != want {
            return Err(Error::Parse {
                line: *line,
                msg: format!(
                    "sequence {name:?} has aligned length {}, expected {want}",
                    seq.len()
                ),
            });
        }
    }
    let (names, seqs) = records.into_iter().map(|(_, n, s)| (n, s)).unzip();
    AlignedSet::new(names, seqs)
}

/// Scores of one aligned pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    /// Matches minus gap penalties over the comparison window.
    pub raw: f64,
    /// Visible window columns (both-gap columns and overhangs excluded).
    pub common_length: usize,
    /// `raw / common_length`.
    pub normalized: f64,
}

/// Scores one pair of equal-length aligned sequences.
///
/// The comparison window runs from the later first non-gap to the
/// earlier last non-gap, so terminal overhangs — stretches where one
/// sequence has not started or has already ended — are never compared
/// or penalized, and a gap run touching the window edge is absorbed
/// into the overhang. Within the window, both-gap columns are skipped
/// entirely (they do not even split a gap run), matches add 1, and each
/// maximal one-sided gap run of visible length `L` costs `A + B·L`.
///
/// # Errors
/// Lengths must match, penalties must be valid, and the window must
/// contain at least one visible column.
pub fn pair_score_raw(s1: &str, s2: &str, params: &ScoringParams) -> Result<PairScore> {
    params.check()?;
    let (a, b) = (s1.as_bytes(), s2.as_bytes());
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "aligned lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let span = |s: &[u8]| {
        let first = s.iter().position(|&c| c != b'-')?;
        let last = s.iter().rposition(|&c| c != b'-')?;
        Some((first, last))
    };
    let (Some((f1, l1)), Some((f2, l2))) = (span(a), span(b)) else {
        return Err(Error::InvalidInput(
            "a sequence consists entirely of gaps".into(),
        ));
    };
    let (start, end) = (f1.max(f2), l1.min(l2));
    if start > end {
        return Err(Error::InvalidInput(
            "the sequences share no comparable positions".into(),
        ));
    }

    // Which side an open one-sided gap run belongs to, and its length.
    let mut open_run: Option<(bool, usize)> = None;
    let mut matches = 0usize;
    let mut penalty = 0.0;
    let mut common_length = 0usize;
    let mut close = |run: &mut Option<(bool, usize)>| {
        if let Some((_, len)) = run.take() {
            penalty += params.gap_open + params.gap_extend * len as f64;
        }
    };
    for p in start..=end {
        let (g1, g2) = (a[p] == b'-', b[p] == b'-');
        if g1 && g2 {
            continue;
        }
        common_length += 1;
        if g1 || g2 {
            match open_run {
                Some((side, ref mut len)) if side == g1 => *len += 1,
                _ => {
                    close(&mut open_run);
                    open_run = Some((g1, 1));
                }
            }
        } else {
            close(&mut open_run);
            if a[p] == b[p] {
                matches += 1;
            }
        }
    }
    close(&mut open_run);
    let raw = matches as f64 - penalty;
    Ok(PairScore {
        raw,
        common_length,
        normalized: raw / common_length as f64,
    })
}

/// A symmetric similarity matrix with unit diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityGrid {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl SimilarityGrid {
    /// Number of sequences.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Sequence names, in input order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Similarity of pair `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    /// The complementary distance matrix `d = 1 − s`.
    pub fn to_distance(&self) -> Result<DistanceMatrix> {
        DistanceMatrix::from_fn(self.labels.clone(), |i, j| 1.0 - self.get(i, j))
    }

    /// Serializes as labeled CSV (same layout as a distance matrix).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push(',');
        out.push_str(&self.labels.join(","));
        out.push('\n');
        for i in 0..self.n() {
            out.push_str(&self.labels[i]);
            for j in 0..self.n() {
                out.push(',');
                out.push_str(&format!("{}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// Scores every unordered pair and min-max standardizes the normalized
/// scores so the weakest pair is 0 and the strongest 1; the diagonal is
/// fixed at 1. Pairs are scored independently (in parallel) and merged
/// in index order, so the result does not depend on scheduling.
///
/// # Errors
/// Needs at least 3 sequences (two pairs cannot spread), every pair
/// comparable, and spread in the scores — all-equal pair scores leave
/// the standardization undefined and produce [`Error::Degenerate`].
pub fn similarity_matrix(aln: &AlignedSet, params: &ScoringParams) -> Result<SimilarityGrid> {
    let n = aln.n_sequences();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "similarity standardization needs at least 3 sequences, got {n}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let scores = pairs
        .par_iter()
        .map(|&(i, j)| Ok(pair_score_raw(aln.sequence(i), aln.sequence(j), params)?.normalized))
        .collect::<Result<Vec<f64>>>()?;
    let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return Err(Error::Degenerate(format!(
            "all {} pair scores equal {min}; the similarity scale is undefined",
            scores.len()
        )));
    }
    let mut values = vec![1.0; n * n];
    for (&(i, j), &s) in pairs.iter().zip(&scores) {
        let std = (s - min) / (max - min);
        values[i * n + j] = std;
        values[j * n + i] = std;
    }
    Ok(SimilarityGrid {
        labels: aln.names().to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params() -> ScoringParams {
        ScoringParams::default()
    }

    #[test]
    fn worked_example_pair() {
        let s1 = "A---G----TTCA-----";
        let s2 = "A-TTC----TTCGATG--";
        let ps = pair_score_raw(s1, s2, &params()).unwrap();
        // 4 matches, one one-sided run of visible length 2; both-gap
        // columns and the trailing overhang are excluded.
        assert_eq!(ps.raw, 4.0 - (15.0 + 0.2 * 2.0));
        assert_relative_eq!(ps.raw, -11.4, max_relative = 1e-12);
        assert_eq!(ps.common_length, 8);
        assert_relative_eq!(ps.normalized, -1.425, max_relative = 1e-12);
    }

    #[test]
    fn identical_gap_free_sequences() {
        let ps = pair_score_raw("ACGTACGT", "ACGTACGT", &params()).unwrap();
        assert_eq!(ps.raw, 8.0);
        assert_eq!(ps.common_length, 8);
        assert_eq!(ps.normalized, 1.0);
    }

    #[test]
    fn all_mismatch_pair() {
        let ps = pair_score_raw("AC", "GT", &params()).unwrap();
        assert_eq!(ps.raw, 0.0);
        assert_eq!(ps.common_length, 2);
        assert_eq!(ps.normalized, 0.0);
    }

    #[test]
    fn terminal_runs_are_absorbed_into_overhangs() {
        // The trailing gap of the first sequence lies past its last
        // character, so it is overhang, not a penalized run.
        let ps = pair_score_raw("AA--", "AAAA", &params()).unwrap();
        assert_eq!(ps.raw, 2.0);
        assert_eq!(ps.common_length, 2);
        // A leading gap likewise.
        let ps = pair_score_raw("--GT", "ATGT", &params()).unwrap();
        assert_eq!(ps.raw, 2.0);
        assert_eq!(ps.common_length, 2);
    }

    #[test]
    fn run_reaching_window_edge_is_penalized() {
        // The second sequence resumes after the window closes, so its
        // gap at positions 1-2 is internal, not overhang.
        let ps = pair_score_raw("AAA-", "A--G", &params()).unwrap();
        assert_eq!(ps.raw, 1.0 - (15.0 + 0.2 * 2.0));
        assert_eq!(ps.common_length, 3);
    }

    #[test]
    fn both_gap_columns_do_not_split_a_run() {
        // One-sided columns at 1 and 4 straddle a both-gap stretch and
        // still form a single run of visible length 2.
        let ps = pair_score_raw("A----A", "AT--TA", &params()).unwrap();
        assert_eq!(ps.raw, 2.0 - (15.0 + 0.2 * 2.0));
        assert_eq!(ps.common_length, 4);
    }

    #[test]
    fn opposite_runs_are_charged_separately() {
        let ps = pair_score_raw("A--TTA", "ACC--A", &params()).unwrap();
        assert_eq!(ps.raw, 2.0 - 2.0 * (15.0 + 0.2 * 2.0));
        assert_eq!(ps.common_length, 6);
    }

    #[test]
    fn disjoint_sequences_error() {
        assert!(pair_score_raw("A---", "---A", &params()).is_err());
        assert!(pair_score_raw("----", "ACGT", &params()).is_err());
        assert!(pair_score_raw("AC", "ACG", &params()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn score_is_symmetric(
            pairs in proptest::collection::vec((0usize..5, 0usize..5), 2..30),
        ) {
            let alphabet = ['A', 'C', 'G', 'T', '-'];
            let s1: String = pairs.iter().map(|&(a, _)| alphabet[a]).collect();
            let s2: String = pairs.iter().map(|&(_, b)| alphabet[b]).collect();
            let forward = pair_score_raw(&s1, &s2, &params());
            let backward = pair_score_raw(&s2, &s1, &params());
            match (forward, backward) {
                (Ok(f), Ok(b)) => prop_assert_eq!(f, b),
                (Err(_), Err(_)) => {}
                (f, b) => prop_assert!(false, "asymmetric outcome: {f:?} vs {b:?}"),
            }
        }

        #[test]
        fn both_gap_column_insertion_is_invisible(
            pairs in proptest::collection::vec((0usize..5, 0usize..5), 2..30),
            at in 0usize..30,
        ) {
            let alphabet = ['A', 'C', 'G', 'T', '-'];
            let s1: String = pairs.iter().map(|&(a, _)| alphabet[a]).collect();
            let s2: String = pairs.iter().map(|&(_, b)| alphabet[b]).collect();
            let at = at.min(s1.len());
            let mut t1 = s1.clone();
            let mut t2 = s2.clone();
            t1.insert(at, '-');
            t2.insert(at, '-');
            if let Ok(before) = pair_score_raw(&s1, &s2, &params()) {
                let after = pair_score_raw(&t1, &t2, &params()).unwrap();
                prop_assert_eq!(before, after);
            }
        }
    }

    #[test]
    fn appended_matches_add_one_each() {
        let base = pair_score_raw("A-G", "AAG", &params()).unwrap();
        let extended = pair_score_raw("A-GTT", "AAGTT", &params()).unwrap();
        assert_eq!(extended.raw, base.raw + 2.0);
        assert_eq!(extended.common_length, base.common_length + 2);
    }

    #[test]
    fn fasta_round_trip() {
        let text = ">s1 first sequence\nACGT\nAC-T\n>s2\nACG TACG T\n";
        let aln = parse_alignment(text, AlignmentFormat::AlignedFasta).unwrap();
        assert_eq!(aln.n_sequences(), 2);
        assert_eq!(aln.names(), ["s1".to_string(), "s2".to_string()]);
        assert_eq!(aln.sequence(0), "ACGTAC-T");
        assert_eq!(aln.sequence(1), "ACGTACGT");
    }

    #[test]
    fn fasta_errors_carry_line_numbers() {
        let ragged = ">s1\nACGT\n>s2\nAC\n";
        match parse_alignment(ragged, AlignmentFormat::AlignedFasta) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("s2"), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad = ">s1\nACXT\n>s2\nACGT\n";
        match parse_alignment(bad, AlignmentFormat::AlignedFasta) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let dup = ">s1\nAC\n>s1\nGT\n";
        assert!(matches!(
            parse_alignment(dup, AlignmentFormat::AlignedFasta),
            Err(Error::Parse { line: 3, .. })
        ));
        let headless = "ACGT\n>s2\nACGT\n";
        assert!(matches!(
            parse_alignment(headless, AlignmentFormat::AlignedFasta),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn clustal_blocks_reassemble() {
        let text = "CLUSTAL W (1.83) multiple sequence alignment\n\n\
                    seq_a   ACGT-ACG 8\n\
                    seq_b   ACGTTACG 8\n        **** ***\n\n\
                    seq_a   TT-- 10\n\
                    seq_b   TTGG 12\n";
        let aln = parse_alignment(text, AlignmentFormat::Clustal).unwrap();
        assert_eq!(aln.n_sequences(), 2);
        assert_eq!(aln.sequence(0), "ACGT-ACGTT--");
        assert_eq!(aln.sequence(1), "ACGTTACGTTGG");
        let via_fasta = parse_alignment(
            ">seq_a\nACGT-ACGTT--\n>seq_b\nACGTTACGTTGG\n",
            AlignmentFormat::AlignedFasta,
        )
        .unwrap();
        assert_eq!(aln, via_fasta);
    }

    #[test]
    fn clustal_errors_carry_line_numbers() {
        let missing = "CLUSTAL\n\nseq_a\nseq_b ACGT\n";
        assert!(matches!(
            parse_alignment(missing, AlignmentFormat::Clustal),
            Err(Error::Parse { line: 3, .. })
        ));
        let trailing = "CLUSTAL\n\nseq_a ACGT 4 extra\nseq_b ACGT 4\n";
        assert!(matches!(
            parse_alignment(trailing, AlignmentFormat::Clustal),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    fn toy_alignment() -> AlignedSet {
        AlignedSet::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["AAAA".into(), "AAAT".into(), "TTTT".into()],
        )
        .unwrap()
    }

    #[test]
    fn similarity_standardizes_to_unit_interval() {
        // Normalized scores: (a,b)=0.75, (a,c)=0, (b,c)=0.25; min-max
        // standardization maps them to 1, 0 and 1/3.
        let grid = similarity_matrix(&toy_alignment(), &params()).unwrap();
        assert_eq!(grid.get(0, 1), 1.0);
        assert_eq!(grid.get(0, 2), 0.0);
        assert_relative_eq!(grid.get(1, 2), 1.0 / 3.0, max_relative = 1e-12);
        for i in 0..3 {
            assert_eq!(grid.get(i, i), 1.0);
            for j in 0..3 {
                assert_eq!(grid.get(i, j), grid.get(j, i));
                assert!((0.0..=1.0).contains(&grid.get(i, j)));
            }
        }
    }

    #[test]
    fn similarity_converts_to_distance() {
        let grid = similarity_matrix(&toy_alignment(), &params()).unwrap();
        let d = grid.to_distance().unwrap();
        assert_eq!(d.get(0, 1), 0.0);
        assert_eq!(d.get(0, 2), 1.0);
        assert_relative_eq!(d.get(1, 2), 2.0 / 3.0, max_relative = 1e-12);
        assert_eq!(d.get(1, 1), 0.0);
    }

    #[test]
    fn similarity_rejects_degenerate_sets() {
        let two = AlignedSet::new(
            vec!["a".into(), "b".into()],
            vec!["ACGT".into(), "ACGT".into()],
        )
        .unwrap();
        assert!(similarity_matrix(&two, &params()).is_err());
        let constant = AlignedSet::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["ACGT".into(), "ACGT".into(), "ACGT".into()],
        )
        .unwrap();
        assert!(matches!(
            similarity_matrix(&constant, &params()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn params_reject_negative_penalties() {
        assert!(ScoringParams::new(-1.0, 0.2).is_err());
        assert!(ScoringParams::new(15.0, f64::NAN).is_err());
        assert!(ScoringParams::new(0.0, 0.0).is_ok());
    }

    #[test]
    fn format_parsing_round_trips() {
        assert_eq!(
            "aligned-fasta".parse::<AlignmentFormat>().unwrap(),
            AlignmentFormat::AlignedFasta
        );
        assert_eq!(
            "clustal".parse::<AlignmentFormat>().unwrap(),
            AlignmentFormat::Clustal
        );
        assert!("phylip".parse::<AlignmentFormat>().is_err());
    }
}
