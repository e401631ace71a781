//! Explicit constructions: Katětov towers, Z-families, the interleaved pair
//! whose meet collapses to rank 1, the collapsing limit, and the `{ω} × Fr`
//! example separating countable type from rank.

pub mod collapse;
pub mod interleave;
pub mod katetov;
pub mod omega_frechet;
pub mod zfamily;

use std::fmt;

use thiserror::Error;

use crate::domain::DomainError;
use crate::filter::FilterError;
use crate::rank::RankError;
use crate::set::SetError;

pub use collapse::{
    collapse_limit, collapse_limit_of, collapse_pair, selector_shadow, CertifiedFilter, CollapseLimit, CollapsePair,
    IndexSet, Query, SelectorShadow,
};
pub use interleave::{InterleavedPair, COMPLETION_PERIOD};
pub use katetov::katetov;
pub use omega_frechet::{omega_times_frechet, OmegaTimesFrechet};
pub use zfamily::{z_family, LineTrace, ZFamily};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("{what} must be between {min} and {max}, got {value}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Rank(#[from] RankError),
}

/// A three-valued membership verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl Answer {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Answer::Yes
        } else {
            Answer::No
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Answer::Yes => Some(true),
            Answer::No => Some(false),
            Answer::Unknown => None,
        }
    }

    /// Kleene conjunction.
    pub fn and(self, other: Answer) -> Answer {
        match (self, other) {
            (Answer::No, _) | (_, Answer::No) => Answer::No,
            (Answer::Yes, Answer::Yes) => Answer::Yes,
            _ => Answer::Unknown,
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unknown => "unknown",
        })
    }
}

pub(crate) fn check_range(what: &'static str, value: usize, min: usize, max: usize) -> Result<(), ConstructionError> {
    if value < min || value > max {
        return Err(ConstructionError::OutOfRange { what, value, min, max });
    }
    Ok(())
}
