//! Ordinal rank intervals, their certified derivation, and related invariants.

pub mod bounds;
pub mod certificate;
pub mod class;
pub mod ct;
pub mod engine;
pub mod ordinal;
pub mod rules;

use std::fmt::Write;

use thiserror::Error;

pub use bounds::{Hi, RankBounds};
pub use certificate::{RankCertificate, RuleApp};
pub use class::{borel_class_bound, limit_class, BorelClass, ClassBound, ClassKind};
pub use ct::{ct_bound, CtBound};
pub use engine::{certified_bounds, derive, rank_bounds, rank_bounds_with, QhHint, RankHints};
pub use ordinal::Ordinal;
pub use rules::Rule;

use crate::filter::{FilterError, FilterExpr};

#[derive(Debug, Error)]
pub enum RankError {
    #[error("inconsistent rank bounds {left} and {right}")]
    Inconsistent { left: RankBounds, right: RankBounds },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("rule {rule} does not apply: {detail}")]
    Premise { rule: &'static str, detail: String },
    #[error("certificate line {line}: {detail}")]
    Replay { line: usize, detail: String },
    #[error("witness rejected: {0}")]
    RejectedWitness(String),
    #[error("internal: {0}")]
    Internal(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// Bounds, countable-type bound, certificate, and the Baire-class reading of an exact rank.
pub fn render_report(bounds: &RankBounds, cert: &RankCertificate, ct: CtBound) -> String {
    let mut s = String::new();
    writeln!(s, "bounds {bounds}").unwrap();
    if let CtBound::Level(n) = ct {
        writeln!(s, "ct <= {n}").unwrap();
    }
    write!(s, "{cert}").unwrap();
    if let Some(n) = bounds.is_exact() {
        writeln!(
            s,
            "annotation: limits along this filter of sequences of continuous functions form Baire class B_{n}"
        )
        .unwrap();
    }
    s
}

pub fn rank_report(f: &FilterExpr) -> Result<String, RankError> {
    let (b, cert) = rank_bounds(f)?;
    Ok(render_report(&b, &cert, ct_bound(f)))
}
