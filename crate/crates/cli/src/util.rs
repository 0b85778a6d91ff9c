//! Small helpers shared by the subcommands: hashing, seed derivation,
//! file reading with path context, and flag parsing.

use std::path::Path;

use dcgkit::dcg::{log_grid, Temperature};
use dcgkit::{Error, Result};
use sha2::{Digest, Sha256};

/// Hex-encoded SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// SplitMix64 finalizer; decorrelates seeds derived from a master seed.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Reads a whole file, folding the path into the error message.
pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

/// Parses a `lo:hi:count` grid argument into log-spaced scales.
pub fn parse_grid(spec: &str) -> Result<Vec<Temperature>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "grid must look like lo:hi:count, got {spec:?}"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad grid lower bound {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad grid upper bound {:?}", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad grid count {:?}", parts[2])))?;
    log_grid(lo, hi, count)
}

/// Parses a comma-separated list of cluster counts, e.g. `2,5,8`.
pub fn parse_levels(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad cluster count {tok:?}")))
        })
        .collect()
}

/// Parses a comma-separated list of `RxC` merge setups, e.g. `3x3,3x2,3x1`.
pub fn parse_merges(spec: &str) -> Result<Vec<(usize, usize)>> {
    spec.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let (r, c) = tok.split_once('x').ok_or_else(|| {
                Error::InvalidInput(format!("merge setup must look like RxC, got {tok:?}"))
            })?;
            let r: usize = r
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad row count in {tok:?}")))?;
            let c: usize = c
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad column count in {tok:?}")))?;
            Ok((r, c))
        })
        .collect()
}
