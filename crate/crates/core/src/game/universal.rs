//! Universal families `Z_n = {Z_n^k}` and the Player II strategy built on them.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::GameError;
use crate::domain::{enumerate, enumeration_index, DomainError, DomainExpr, Point};
use crate::filter::FilterExpr;
use crate::set::SetExpr;

pub const DEFAULT_K_BOUND: u64 = 10_000;

type Generator = Arc<dyn Fn(u64, u64) -> BTreeSet<Point> + Send + Sync>;

/// Finite nonempty sets `Z_n^k` given by a rule.
#[derive(Clone)]
pub enum UniversalFamily {
    /// `Z_n^k = {e(k)}` for the canonical enumeration `e` of the domain.
    Singletons { domain: DomainExpr },
    /// `Z_n^k = {k} × [0, n]` on `ω × ω`.
    ColumnSegments,
    /// `Z_n^k = {k mod limit}`: every set stays inside `[0, limit)`.
    Bounded { limit: u64 },
    Custom {
        label: String,
        domain: DomainExpr,
        generator: Generator,
    },
}

impl fmt::Debug for UniversalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UniversalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UniversalFamily::Singletons { domain } => write!(f, "singletons over {domain}"),
            UniversalFamily::ColumnSegments => write!(f, "column segments"),
            UniversalFamily::Bounded { limit } => write!(f, "bounded below {limit}"),
            UniversalFamily::Custom { label, .. } => write!(f, "{label}"),
        }
    }
}

impl UniversalFamily {
    pub fn domain(&self) -> DomainExpr {
        match self {
            UniversalFamily::Singletons { domain } | UniversalFamily::Custom { domain, .. } => domain.clone(),
            UniversalFamily::ColumnSegments => DomainExpr::prod(DomainExpr::Nat),
            UniversalFamily::Bounded { .. } => DomainExpr::Nat,
        }
    }

    /// `Z_n^k`; `None` past the end of a finite domain.
    pub fn member(&self, n: u64, k: u64) -> Option<BTreeSet<Point>> {
        match self {
            UniversalFamily::Singletons { domain } => enumerate(domain, k).ok().map(|p| [p].into()),
            UniversalFamily::ColumnSegments => Some((0..=n).map(|j| Point::pair(k, Point::Nat(j))).collect()),
            UniversalFamily::Bounded { limit } => Some([Point::Nat(k % (*limit).max(1))].into()),
            UniversalFamily::Custom { generator, .. } => Some(generator(n, k)),
        }
    }
}

/// Answers `C_n` with the first `Z_n^k ⊆ C_n`.
pub struct UniversalPlayer {
    family: UniversalFamily,
    bound: u64,
}

pub fn strategy_ii_universal(u: UniversalFamily) -> UniversalPlayer {
    UniversalPlayer {
        family: u,
        bound: DEFAULT_K_BOUND,
    }
}

impl UniversalPlayer {
    pub fn with_bound(mut self, bound: u64) -> Self {
        self.bound = bound;
        self
    }

    pub fn answer(&self, round: usize, c: &SetExpr) -> Result<BTreeSet<Point>, GameError> {
        for k in 0..=self.bound {
            let Some(z) = self.family.member(round as u64, k) else {
                break;
            };
            let mut inside = true;
            for p in &z {
                if !c.contains(p)? {
                    inside = false;
                    break;
                }
            }
            if inside && !z.is_empty() {
                return Ok(z);
            }
        }
        Err(GameError::NoUniversalWitness {
            round,
            bound: self.bound,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleCheck {
    pub sample: SetExpr,
    /// Per family `n`: the least `k ≤ bound` with `Z_n^k ⊆ M`.
    pub witnesses: Vec<Option<u64>>,
    /// Some `(n, t)` with `Z_n^k ∩ M ≠ ∅` for every `k ≥ t`.
    pub diagonal: Option<(u64, u64)>,
    /// Whether `diagonal` was computed exactly rather than read off the search window.
    pub exact: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UniversalReport {
    pub checks: Vec<SampleCheck>,
}

impl UniversalReport {
    pub fn universal(&self) -> bool {
        self.checks.iter().all(|c| c.witnesses.iter().all(Option::is_some))
    }

    pub fn diagonalizes(&self) -> bool {
        self.checks.iter().all(|c| c.diagonal.is_some())
    }
}

impl fmt::Display for UniversalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let w: Vec<String> = c
                .witnesses
                .iter()
                .map(|k| k.map_or("none".into(), |k| k.to_string()))
                .collect();
            let d = match c.diagonal {
                Some((n, t)) => format!("n={n} from k={t}"),
                None => "none".into(),
            };
            writeln!(
                f,
                "M={} universal k=[{}] diagonal {d}{}",
                c.sample,
                w.join(","),
                if c.exact { "" } else { " (search window)" }
            )?;
        }
        Ok(())
    }
}

fn meets(z: &BTreeSet<Point>, m: &SetExpr) -> bool {
    z.iter().any(|p| m.contains(p).unwrap_or(false))
}

/// Least `t` with `Z_n^k ∩ M ≠ ∅` for all `k ≥ t`, exactly for the built-in families.
pub(crate) fn threshold(
    u: &UniversalFamily,
    n: u64,
    m: &SetExpr,
    k_bound: u64,
) -> Result<(Option<u64>, bool), GameError> {
    Ok(match u {
        UniversalFamily::Singletons { domain } => {
            let missing = m.complement();
            match missing.finite_points() {
                Some(pts) => {
                    let mut t = 0;
                    for p in pts {
                        let idx = enumeration_index(domain, &p)
                            .map_err(|e: DomainError| GameError::Precondition(e.to_string()))?;
                        t = t.max(idx + 1);
                    }
                    (Some(t), true)
                }
                None => (None, true),
            }
        }
        UniversalFamily::ColumnSegments => {
            let segment = SetExpr::from_points(&DomainExpr::Nat, (0..=n).map(Point::Nat))?;
            let hits = |col: &SetExpr| -> Result<bool, GameError> { Ok(!col.intersect(&segment)?.is_empty()) };
            let tail = m
                .tail_section()
                .ok_or_else(|| GameError::Precondition(format!("{m} is not a family of columns")))?;
            if !hits(tail)? {
                (None, true)
            } else {
                let mut t = 0;
                for k in m.exception_keys() {
                    if !hits(&m.section(k)?)? {
                        t = t.max(k + 1);
                    }
                }
                (Some(t), true)
            }
        }
        UniversalFamily::Bounded { limit } => {
            let all = (0..(*limit).max(1)).all(|r| m.contains(&Point::Nat(r)).unwrap_or(false));
            (all.then_some(0), true)
        }
        UniversalFamily::Custom { .. } => {
            let mut last_miss = None;
            for k in 0..=k_bound {
                if let Some(z) = u.member(n, k) {
                    if !meets(&z, m) {
                        last_miss = Some(k);
                    }
                }
            }
            let t = last_miss.map_or(0, |k| k + 1);
            // a miss in the upper half of the window is read as "infinitely often"
            ((t <= k_bound / 2).then_some(t), false)
        }
    })
}

/// Checks universality and diagonalization of `u` on member samples of `f`.
pub fn verify_universal_family(
    u: &UniversalFamily,
    f: &FilterExpr,
    samples: &[SetExpr],
    k_bound: u64,
    families: u64,
) -> Result<UniversalReport, GameError> {
    let mut report = UniversalReport::default();
    for m in samples {
        if !f.member(m)? {
            return Err(GameError::BadSample(m.to_string()));
        }
        let mut witnesses = Vec::new();
        for n in 0..families {
            let mut found = None;
            for k in 0..=k_bound {
                let Some(z) = u.member(n, k) else { break };
                if z.iter().all(|p| m.contains(p).unwrap_or(false)) {
                    found = Some(k);
                    break;
                }
            }
            witnesses.push(found);
        }
        let mut diagonal = None;
        let mut exact = true;
        for n in 0..families {
            let (t, ex) = threshold(u, n, m, k_bound)?;
            exact &= ex;
            if let Some(t) = t {
                diagonal = Some((n, t));
                break;
            }
        }
        report.checks.push(SampleCheck {
            sample: m.clone(),
            witnesses,
            diagonal,
            exact,
        });
    }
    Ok(report)
}
