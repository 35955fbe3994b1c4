//! Crate-wide error type with stable machine-readable codes.

use thiserror::Error;

use crate::roots::AlgoId;

/// Errors produced by the library.
///
/// Each variant carries a stable code ([`Error::code`]) that scripts can
/// match against, and the CLI maps variants onto distinct exit statuses
/// ([`Error::exit_code`]).
#[derive(Debug, Error)]
pub enum Error {
    /// `c` has no r-th root in the field.
    #[error("c is not an r-th power residue")]
    NonResidue,
    /// The chosen algorithm does not support this `r`.
    #[error("algorithm `{algo}` is not applicable for r = {r} (requires an odd prime r)")]
    NotApplicable { algo: AlgoId, r: u64 },
    /// No admissible witness `b` was found within the trial budget.
    #[error("witness search failed after {trials} rejected candidates")]
    WitnessSearchFailed { trials: u64 },
    /// An internal invariant was violated; indicates a bug or an invalid
    /// forced witness.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    /// Inversion of zero or of a zero divisor.
    #[error("operand is not invertible")]
    NonInvertible,
    /// Prime search exhausted its candidate budget.
    #[error("prime search exhausted after {candidates} candidates")]
    PrimeSearchFailed { candidates: u64 },
    /// A computation ran past its wall-clock budget (benchmark cells only).
    #[error("time budget exceeded")]
    Interrupted,
    /// Invalid arguments or malformed input.
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonResidue => "NON_RESIDUE",
            Error::NotApplicable { .. } => "NOT_APPLICABLE",
            Error::WitnessSearchFailed { .. } => "WITNESS_SEARCH_FAILED",
            Error::InternalInconsistency(_) => "INTERNAL_INCONSISTENCY",
            Error::NonInvertible => "NON_INVERTIBLE",
            Error::PrimeSearchFailed { .. } => "PRIME_SEARCH_FAILED",
            Error::Interrupted => "INTERRUPTED",
            Error::Usage(_) => "USAGE",
        }
    }

    /// Process exit status used by the CLI for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonResidue => 2,
            Error::NotApplicable { .. } => 3,
            Error::WitnessSearchFailed { .. } => 4,
            Error::InternalInconsistency(_) => 5,
            Error::Usage(_) => 64,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
