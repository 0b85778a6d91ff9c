//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Result`]. Variants are
//! grouped by failure class so callers (in particular the CLI) can map them
//! to user-facing diagnostics and exit codes without string matching.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated (shape mismatch, empty
    /// input, out-of-range parameter, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A text input (CSV matrix, alignment file, ...) could not be parsed.
    /// `line` is 1-based; 0 means the location is not line-specific.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Requested margins admit no binary matrix; carries the violated
    /// feasibility condition in human-readable form.
    #[error("infeasible margins: {0}")]
    Infeasible(String),

    /// A regulated random walk exceeded its step budget before removing
    /// every node. Carries the `(step, node)` removal sequence completed
    /// so far for diagnostics.
    #[error("random walk exceeded {max_steps} steps after {} of {total} removals", removals.len())]
    WalkBudget {
        max_steps: usize,
        total: usize,
        removals: Vec<(usize, usize)>,
    },

    /// The computation finished but produced a degenerate result (for
    /// example an empty temperature selection). The payload explains what
    /// was degenerate; callers may choose to continue with a fallback.
    #[error("degenerate result: {0}")]
    Degenerate(String),

    /// An underlying I/O failure while reading or writing files.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
