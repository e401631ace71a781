//! Pairwise disjoint infinite lines `Z_i ⊆ dom(N_γ)` such that a set missing
//! infinitely much of every line is not in `N_γ`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{check_range, ConstructionError};
use crate::domain::{pairing, DomainExpr, Point, DEFAULT_MAX_DEPTH};
use crate::set::SetExpr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZFamily {
    gamma: usize,
}

/// `Z_i ∖ M`, computed exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineTrace {
    Finite(Vec<Point>),
    Infinite,
}

impl LineTrace {
    pub fn is_finite(&self) -> bool {
        matches!(self, LineTrace::Finite(_))
    }
}

/// For `γ ≥ 2` line `i` is `{s} × ω` for the `i`-th tuple `s ∈ ω^{γ-1}`; for
/// `γ = 1` it is the pairing class `{⟨i, k⟩ : k ∈ ω}`.
pub fn z_family(gamma: usize) -> Result<ZFamily, ConstructionError> {
    check_range("Z-family level", gamma, 1, DEFAULT_MAX_DEPTH)?;
    Ok(ZFamily { gamma })
}

impl ZFamily {
    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn domain(&self) -> DomainExpr {
        DomainExpr::katetov(self.gamma)
    }

    /// The `k`-th point of line `i`.
    pub fn point(&self, i: u64, k: u64) -> Result<Point, ConstructionError> {
        let coords = if self.gamma == 1 {
            vec![pairing::pair(i, k).ok_or(ConstructionError::Overflow("line point"))?]
        } else {
            let mut c = pairing::tuple(i, self.gamma - 1);
            c.push(k);
            c
        };
        Ok(Point::from_coords(&self.domain(), &coords)?)
    }

    /// `(i, k)` with `p` the `k`-th point of line `i`.
    pub fn locate(&self, p: &Point) -> Result<(u64, u64), ConstructionError> {
        let coords = p.coords();
        if coords.len() != self.gamma {
            return Err(ConstructionError::Precondition(format!(
                "{p} is not a point of {}",
                self.domain()
            )));
        }
        if self.gamma == 1 {
            return Ok(pairing::unpair(coords[0]));
        }
        let (last, head) = coords.split_last().expect("gamma >= 2");
        let i = pairing::untuple(head).ok_or(ConstructionError::Overflow("line index"))?;
        Ok((i, *last))
    }

    pub fn contains(&self, i: u64, p: &Point) -> bool {
        self.locate(p).is_ok_and(|(j, _)| j == i)
    }

    /// Line `i` as a symbolic set; only lines of `γ ≥ 2` are eventually uniform.
    pub fn line_set(&self, i: u64) -> Result<Option<SetExpr>, ConstructionError> {
        if self.gamma == 1 {
            return Ok(None);
        }
        let s = pairing::tuple(i, self.gamma - 1);
        let mut set = SetExpr::full(&DomainExpr::katetov(1));
        for (level, &si) in s.iter().enumerate().rev() {
            let d = DomainExpr::katetov(self.gamma - level);
            let inner = DomainExpr::katetov(self.gamma - level - 1);
            set = SetExpr::sections(d, BTreeMap::from([(si, set)]), SetExpr::empty(&inner))?;
        }
        Ok(Some(set))
    }

    /// `Z_i ∖ M` for a symbolic `M ⊆ dom(N_γ)`.
    pub fn line_difference(&self, i: u64, m: &SetExpr) -> Result<LineTrace, ConstructionError> {
        if *m.domain() != self.domain() {
            return Err(ConstructionError::Precondition(format!(
                "{m} is not a subset of {}",
                self.domain()
            )));
        }
        match self.line_set(i)? {
            Some(line) => Ok(match line.difference(m)?.finite_points() {
                Some(pts) => LineTrace::Finite(pts),
                None => LineTrace::Infinite,
            }),
            // over ω × {0} every symbolic set is finite or cofinite
            None => Ok(match m.complement().finite_points() {
                Some(pts) => LineTrace::Finite(pts.into_iter().filter(|p| self.contains(i, p)).collect()),
                None => LineTrace::Infinite,
            }),
        }
    }

    /// Least line index `≤ search` with `Z_i ∖ M` finite.
    pub fn witness_line(&self, m: &SetExpr, search: u64) -> Result<Option<(u64, Vec<Point>)>, ConstructionError> {
        for i in 0..=search {
            if let LineTrace::Finite(pts) = self.line_difference(i, m)? {
                return Ok(Some((i, pts)));
            }
        }
        Ok(None)
    }

    /// One text line per index listing the first `per_line` points.
    pub fn grid(&self, lines: u64, per_line: u64) -> Result<String, ConstructionError> {
        let mut out = String::new();
        for i in 0..lines {
            let pts = (0..per_line)
                .map(|k| self.point(i, k).map(|p| p.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            writeln!(out, "Z_{i}: {}", pts.join(" ")).expect("write to string");
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::enumerate;

    #[test]
    fn points_round_trip() {
        for gamma in 1..4 {
            let z = z_family(gamma).unwrap();
            for i in 0..20 {
                for k in 0..20 {
                    let p = z.point(i, k).unwrap();
                    assert_eq!(z.locate(&p).unwrap(), (i, k));
                }
            }
        }
    }

    #[test]
    fn lines_partition_an_enumeration_prefix() {
        for gamma in 1..4 {
            let z = z_family(gamma).unwrap();
            for n in 0..2000 {
                let p = enumerate(&z.domain(), n).unwrap();
                let (i, k) = z.locate(&p).unwrap();
                assert_eq!(z.point(i, k).unwrap(), p);
            }
        }
    }

    #[test]
    fn line_sets_agree_with_points() {
        let z = z_family(3).unwrap();
        for i in 0..10 {
            let line = z.line_set(i).unwrap().unwrap();
            for n in 0..500 {
                let p = enumerate(&z.domain(), n).unwrap();
                assert_eq!(line.contains(&p).unwrap(), z.contains(i, &p));
            }
        }
    }

    #[test]
    fn all_cofinite_sections_give_line_zero() {
        let z = z_family(2).unwrap();
        let inner = DomainExpr::katetov(1);
        let m = SetExpr::sections(
            z.domain(),
            BTreeMap::new(),
            SetExpr::from_points(&inner, [Point::pair(0, Point::Unit)])
                .unwrap()
                .complement(),
        )
        .unwrap();
        let (i, missing) = z.witness_line(&m, 10).unwrap().unwrap();
        assert_eq!(i, 0);
        assert_eq!(missing, vec![Point::pair(0, Point::pair(0, Point::Unit))]);
    }

    #[test]
    fn cofinite_sets_meet_every_pairing_class() {
        let z = z_family(1).unwrap();
        let m = SetExpr::from_points(&z.domain(), (0..30).map(|n| Point::pair(n, Point::Unit)))
            .unwrap()
            .complement();
        for i in 0..10 {
            assert!(z.line_difference(i, &m).unwrap().is_finite());
        }
        assert_eq!(z.line_difference(0, &m.complement()).unwrap(), LineTrace::Infinite);
    }
}
