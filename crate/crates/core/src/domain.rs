//! Structured countable index sets and their points.
//!
//! A [`DomainExpr`] describes a countable set built from a single point, the
//! naturals, products `ω × D` and disjoint sums `Σ_i D_i` whose components are
//! eventually constant. Every domain other than `Unit` is countably infinite and
//! carries a fixed canonical enumeration `ω → D` (see [`enumerate`]).

use std::fmt;

use thiserror::Error;

/// Default cap on domain nesting depth.
pub const DEFAULT_MAX_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("domain nesting depth {depth} exceeds the cap {cap}")]
    TooDeep { depth: usize, cap: usize },
    #[error("point {point} does not belong to domain {domain}")]
    ShapeMismatch { point: Point, domain: DomainExpr },
    #[error("domain {0} is finite and has no enumeration of ω")]
    Finite(DomainExpr),
    #[error("coordinate list {coords:?} does not fit domain {domain}")]
    BadCoordinates { coords: Vec<u64>, domain: DomainExpr },
    #[error("arithmetic overflow while enumerating {0}")]
    Overflow(DomainExpr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainExpr {
    /// The one-point set `{0}`.
    Unit,
    /// The naturals `ω`.
    Nat,
    /// `ω × inner`.
    Prod(Box<DomainExpr>),
    /// `Σ_{i∈ω} D_i` with `D_i = exceptions[i]` for listed indices and `tail` beyond.
    DSum {
        exceptions: Vec<DomainExpr>,
        tail: Box<DomainExpr>,
    },
}

impl DomainExpr {
    pub fn prod(inner: DomainExpr) -> Self {
        DomainExpr::Prod(Box::new(inner))
    }

    /// Builds a disjoint sum, trimming trailing exception components equal to the tail.
    pub fn dsum(mut exceptions: Vec<DomainExpr>, tail: DomainExpr) -> Self {
        while exceptions.last() == Some(&tail) {
            exceptions.pop();
        }
        DomainExpr::DSum {
            exceptions,
            tail: Box::new(tail),
        }
    }

    /// `dom(N_0) = Unit`, `dom(N_{n+1}) = ω × dom(N_n)`.
    pub fn katetov(n: usize) -> Self {
        (0..n).fold(DomainExpr::Unit, |d, _| DomainExpr::prod(d))
    }

    /// The `i`-th component of a product or sum.
    pub fn component(&self, i: u64) -> Option<&DomainExpr> {
        match self {
            DomainExpr::Prod(inner) => Some(inner),
            DomainExpr::DSum { exceptions, tail } => {
                Some(usize::try_from(i).ok().and_then(|i| exceptions.get(i)).unwrap_or(tail))
            }
            DomainExpr::Unit | DomainExpr::Nat => None,
        }
    }

    /// The component used for all indices beyond the exception list.
    pub fn tail_component(&self) -> Option<&DomainExpr> {
        match self {
            DomainExpr::Prod(inner) => Some(inner),
            DomainExpr::DSum { tail, .. } => Some(tail),
            _ => None,
        }
    }

    /// Number of listed exception components (zero for products).
    pub fn exception_len(&self) -> usize {
        match self {
            DomainExpr::DSum { exceptions, .. } => exceptions.len(),
            _ => 0,
        }
    }

    pub fn is_indexed(&self) -> bool {
        matches!(self, DomainExpr::Prod(_) | DomainExpr::DSum { .. })
    }

    pub fn depth(&self) -> usize {
        match self {
            DomainExpr::Unit | DomainExpr::Nat => 0,
            DomainExpr::Prod(inner) => 1 + inner.depth(),
            DomainExpr::DSum { exceptions, tail } => {
                1 + exceptions
                    .iter()
                    .map(DomainExpr::depth)
                    .chain(std::iter::once(tail.depth()))
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    /// Largest number of coordinates a point of this domain can carry.
    pub fn max_coords(&self) -> usize {
        match self {
            DomainExpr::Unit => 0,
            DomainExpr::Nat => 1,
            DomainExpr::Prod(inner) => 1 + inner.max_coords(),
            DomainExpr::DSum { exceptions, tail } => {
                1 + exceptions
                    .iter()
                    .map(DomainExpr::max_coords)
                    .chain(std::iter::once(tail.max_coords()))
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    pub fn is_infinite(&self) -> bool {
        !matches!(self, DomainExpr::Unit)
    }

    pub fn validate(&self, max_depth: usize) -> Result<(), DomainError> {
        let depth = self.depth();
        if depth > max_depth {
            return Err(DomainError::TooDeep { depth, cap: max_depth });
        }
        Ok(())
    }

    /// Indices `i` whose component differs from the tail component.
    pub fn irregular_indices(&self) -> Vec<u64> {
        match self {
            DomainExpr::DSum { exceptions, tail } => exceptions
                .iter()
                .enumerate()
                .filter(|(_, d)| *d != &**tail)
                .map(|(i, _)| i as u64)
                .collect(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for DomainExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainExpr::Unit => write!(f, "1"),
            DomainExpr::Nat => write!(f, "w"),
            DomainExpr::Prod(inner) => write!(f, "w*({inner})"),
            DomainExpr::DSum { exceptions, tail } => {
                write!(f, "sum[")?;
                for (i, d) in exceptions.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{d}")?;
                }
                write!(f, "; {tail}]")
            }
        }
    }
}

/// A point of a structured domain. The shape mirrors [`DomainExpr`].
///
/// The derived ordering is lexicographic on coordinate tuples for points of a
/// common domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Unit,
    Nat(u64),
    Pair(u64, Box<Point>),
    Sum(u64, Box<Point>),
}

impl Point {
    pub fn pair(i: u64, rest: Point) -> Self {
        Point::Pair(i, Box::new(rest))
    }

    pub fn sum(i: u64, rest: Point) -> Self {
        Point::Sum(i, Box::new(rest))
    }

    /// Leading index of a product or sum point.
    pub fn head(&self) -> Option<u64> {
        match self {
            Point::Pair(i, _) | Point::Sum(i, _) => Some(*i),
            _ => None,
        }
    }

    pub fn rest(&self) -> Option<&Point> {
        match self {
            Point::Pair(_, r) | Point::Sum(_, r) => Some(r),
            _ => None,
        }
    }

    pub fn coords(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.push_coords(&mut out);
        out
    }

    fn push_coords(&self, out: &mut Vec<u64>) {
        match self {
            Point::Unit => {}
            Point::Nat(n) => out.push(*n),
            Point::Pair(i, r) | Point::Sum(i, r) => {
                out.push(*i);
                r.push_coords(out);
            }
        }
    }

    /// Rebuilds a point of `domain` from its coordinate tuple.
    pub fn from_coords(domain: &DomainExpr, coords: &[u64]) -> Result<Point, DomainError> {
        let (p, used) = Self::take_coords(domain, coords).ok_or_else(|| DomainError::BadCoordinates {
            coords: coords.to_vec(),
            domain: domain.clone(),
        })?;
        if used != coords.len() {
            return Err(DomainError::BadCoordinates {
                coords: coords.to_vec(),
                domain: domain.clone(),
            });
        }
        Ok(p)
    }

    fn take_coords(domain: &DomainExpr, coords: &[u64]) -> Option<(Point, usize)> {
        match domain {
            DomainExpr::Unit => Some((Point::Unit, 0)),
            DomainExpr::Nat => coords.first().map(|&n| (Point::Nat(n), 1)),
            DomainExpr::Prod(inner) => {
                let (&i, rest) = coords.split_first()?;
                let (p, used) = Self::take_coords(inner, rest)?;
                Some((Point::pair(i, p), used + 1))
            }
            DomainExpr::DSum { .. } => {
                let (&i, rest) = coords.split_first()?;
                let (p, used) = Self::take_coords(domain.component(i)?, rest)?;
                Some((Point::sum(i, p), used + 1))
            }
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords = self.coords();
        if coords.len() == 1 {
            write!(f, "{}", coords[0])
        } else {
            write!(f, "(")?;
            for (i, c) in coords.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
    }
}

/// True iff the shape of `p` matches `d` recursively.
pub fn point_in_domain(p: &Point, d: &DomainExpr) -> bool {
    match (p, d) {
        (Point::Unit, DomainExpr::Unit) => true,
        (Point::Nat(_), DomainExpr::Nat) => true,
        (Point::Pair(_, rest), DomainExpr::Prod(inner)) => point_in_domain(rest, inner),
        (Point::Sum(i, rest), DomainExpr::DSum { .. }) => d.component(*i).is_some_and(|c| point_in_domain(rest, c)),
        _ => false,
    }
}

/// All points of `d` whose every coordinate lies in `values`, in canonical order.
///
/// `values` must be sorted ascending.
pub fn points_with_coords(d: &DomainExpr, values: &[u64]) -> Vec<Point> {
    match d {
        DomainExpr::Unit => vec![Point::Unit],
        DomainExpr::Nat => values.iter().map(|&n| Point::Nat(n)).collect(),
        DomainExpr::Prod(inner) => {
            let inner_pts = points_with_coords(inner, values);
            values
                .iter()
                .flat_map(|&i| inner_pts.iter().map(move |p| Point::pair(i, p.clone())))
                .collect()
        }
        DomainExpr::DSum { .. } => values
            .iter()
            .flat_map(|&i| {
                let comp = d.component(i).expect("sum domains have every component");
                points_with_coords(comp, values)
                    .into_iter()
                    .map(move |p| Point::sum(i, p))
            })
            .collect(),
    }
}

/// All points of `d` whose every coordinate is `< bound`, lexicographically.
pub fn truncated_points(d: &DomainExpr, bound: u64) -> Vec<Point> {
    let values: Vec<u64> = (0..bound).collect();
    points_with_coords(d, &values)
}

pub mod pairing {
    //! Cantor pairing on the naturals.

    /// `⟨a, b⟩ = (a+b)(a+b+1)/2 + b`.
    pub fn pair(a: u64, b: u64) -> Option<u64> {
        let s = a as u128 + b as u128;
        let v = s * (s + 1) / 2 + b as u128;
        u64::try_from(v).ok()
    }

    /// Inverse of [`pair`].
    pub fn unpair(n: u64) -> (u64, u64) {
        let n = n as u128;
        // largest w with w(w+1)/2 <= n
        let mut w = ((((8 * n + 1) as f64).sqrt() - 1.0) / 2.0) as u128;
        while w * (w + 1) / 2 > n {
            w -= 1;
        }
        while (w + 1) * (w + 2) / 2 <= n {
            w += 1;
        }
        let t = w * (w + 1) / 2;
        let b = n - t;
        let a = w - b;
        (a as u64, b as u64)
    }

    /// Canonical enumeration of `ω^k` for `k ≥ 1` by iterated pairing.
    pub fn tuple(n: u64, k: usize) -> Vec<u64> {
        match k {
            0 => Vec::new(),
            1 => vec![n],
            _ => {
                let (a, b) = unpair(n);
                let mut out = vec![a];
                out.extend(tuple(b, k - 1));
                out
            }
        }
    }

    /// Inverse of [`tuple`].
    pub fn untuple(t: &[u64]) -> Option<u64> {
        match t.len() {
            0 => Some(0),
            1 => Some(t[0]),
            _ => pair(t[0], untuple(&t[1..])?),
        }
    }
}

/// The `i`-th element (0-based) of `ω ∖ skip`; `skip` sorted ascending.
fn nth_outside(skip: &[u64], r: u64) -> u64 {
    let mut i = r;
    for &u in skip {
        if u <= i {
            i += 1;
        }
    }
    i
}

fn rank_outside(skip: &[u64], i: u64) -> u64 {
    i - skip.iter().filter(|&&u| u < i).count() as u64
}

fn sum_split(d: &DomainExpr) -> (Vec<u64>, Vec<u64>) {
    let DomainExpr::DSum { exceptions, .. } = d else {
        return (Vec::new(), Vec::new());
    };
    let mut units = Vec::new();
    let mut infinite = Vec::new();
    for (i, c) in exceptions.iter().enumerate() {
        if c.is_infinite() {
            infinite.push(i as u64);
        } else {
            units.push(i as u64);
        }
    }
    (units, infinite)
}

/// The canonical bijection `ω → d` (for infinite `d`); `Unit` admits only `n = 0`.
pub fn enumerate(d: &DomainExpr, n: u64) -> Result<Point, DomainError> {
    match d {
        DomainExpr::Unit => {
            if n == 0 {
                Ok(Point::Unit)
            } else {
                Err(DomainError::Finite(d.clone()))
            }
        }
        DomainExpr::Nat => Ok(Point::Nat(n)),
        DomainExpr::Prod(inner) => {
            if inner.is_infinite() {
                let (i, k) = pairing::unpair(n);
                Ok(Point::pair(i, enumerate(inner, k)?))
            } else {
                Ok(Point::pair(n, Point::Unit))
            }
        }
        DomainExpr::DSum { exceptions, tail } => {
            let (units, infinite) = sum_split(d);
            if tail.is_infinite() {
                let m = units.len() as u64;
                if n < m {
                    return Ok(Point::sum(units[n as usize], Point::Unit));
                }
                let (r, k) = pairing::unpair(n - m);
                let i = nth_outside(&units, r);
                Ok(Point::sum(i, enumerate(d.component(i).unwrap(), k)?))
            } else {
                let m = infinite.len() as u64;
                let r = n % (m + 1);
                let q = n / (m + 1);
                if r == 0 {
                    Ok(Point::sum(nth_outside(&infinite, q), Point::Unit))
                } else {
                    let i = infinite[(r - 1) as usize];
                    Ok(Point::sum(i, enumerate(&exceptions[i as usize], q)?))
                }
            }
        }
    }
}

/// Inverse of [`enumerate`].
pub fn enumeration_index(d: &DomainExpr, p: &Point) -> Result<u64, DomainError> {
    let mismatch = || DomainError::ShapeMismatch {
        point: p.clone(),
        domain: d.clone(),
    };
    let overflow = || DomainError::Overflow(d.clone());
    match (d, p) {
        (DomainExpr::Unit, Point::Unit) => Ok(0),
        (DomainExpr::Nat, Point::Nat(n)) => Ok(*n),
        (DomainExpr::Prod(inner), Point::Pair(i, rest)) => {
            if inner.is_infinite() {
                let k = enumeration_index(inner, rest)?;
                pairing::pair(*i, k).ok_or_else(overflow)
            } else if **rest == Point::Unit {
                Ok(*i)
            } else {
                Err(mismatch())
            }
        }
        (DomainExpr::DSum { tail, .. }, Point::Sum(i, rest)) => {
            let comp = d.component(*i).ok_or_else(mismatch)?;
            let (units, infinite) = sum_split(d);
            if tail.is_infinite() {
                if let Some(pos) = units.iter().position(|u| u == i) {
                    return Ok(pos as u64);
                }
                let r = rank_outside(&units, *i);
                let k = enumeration_index(comp, rest)?;
                let v = pairing::pair(r, k).ok_or_else(overflow)?;
                v.checked_add(units.len() as u64).ok_or_else(overflow)
            } else {
                let m = infinite.len() as u64;
                match infinite.iter().position(|v| v == i) {
                    Some(pos) => {
                        let q = enumeration_index(comp, rest)?;
                        q.checked_mul(m + 1)
                            .and_then(|v| v.checked_add(pos as u64 + 1))
                            .ok_or_else(overflow)
                    }
                    None => rank_outside(&infinite, *i).checked_mul(m + 1).ok_or_else(overflow),
                }
            }
        }
        _ => Err(mismatch()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_in_domain_examples() {
        assert!(point_in_domain(&Point::Unit, &DomainExpr::Unit));
        let omega2 = DomainExpr::prod(DomainExpr::Nat);
        assert!(point_in_domain(&Point::pair(3, Point::Nat(5)), &omega2));
        assert!(!point_in_domain(&Point::Nat(2), &omega2));
        let sum = DomainExpr::dsum(vec![DomainExpr::Unit], DomainExpr::Nat);
        assert!(point_in_domain(&Point::sum(0, Point::Unit), &sum));
        assert!(!point_in_domain(&Point::sum(0, Point::Nat(1)), &sum));
        assert!(point_in_domain(&Point::sum(4, Point::Nat(1)), &sum));
    }

    #[test]
    fn katetov_domains_nest() {
        assert_eq!(DomainExpr::katetov(0), DomainExpr::Unit);
        assert_eq!(
            DomainExpr::katetov(2),
            DomainExpr::prod(DomainExpr::prod(DomainExpr::Unit))
        );
        assert_eq!(DomainExpr::katetov(3).depth(), 3);
    }

    #[test]
    fn dsum_trims_trailing_tail_copies() {
        let d = DomainExpr::dsum(vec![DomainExpr::Unit, DomainExpr::Nat], DomainExpr::Nat);
        assert_eq!(d.exception_len(), 1);
        assert_eq!(d.irregular_indices(), vec![0]);
    }

    #[test]
    fn pairing_round_trips() {
        for n in 0..5000 {
            let (a, b) = pairing::unpair(n);
            assert_eq!(pairing::pair(a, b), Some(n));
        }
        assert_eq!(pairing::unpair(0), (0, 0));
        assert_eq!(pairing::unpair(1), (1, 0));
        assert_eq!(pairing::unpair(2), (0, 1));
        for n in 0..2000 {
            let t = pairing::tuple(n, 3);
            assert_eq!(pairing::untuple(&t), Some(n));
        }
    }

    #[test]
    fn enumeration_is_a_bijection_on_prefixes() {
        let domains = [
            DomainExpr::Nat,
            DomainExpr::katetov(1),
            DomainExpr::katetov(3),
            DomainExpr::prod(DomainExpr::Nat),
            DomainExpr::dsum(vec![DomainExpr::Unit, DomainExpr::Nat], DomainExpr::katetov(2)),
            DomainExpr::dsum(
                vec![DomainExpr::Nat, DomainExpr::Unit, DomainExpr::Nat],
                DomainExpr::Unit,
            ),
        ];
        for d in &domains {
            let mut seen = std::collections::HashSet::new();
            for n in 0..3000 {
                let p = enumerate(d, n).unwrap();
                assert!(point_in_domain(&p, d), "{p} not in {d}");
                assert_eq!(enumeration_index(d, &p).unwrap(), n);
                assert!(seen.insert(p));
            }
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let d = DomainExpr::dsum(vec![DomainExpr::Unit], DomainExpr::prod(DomainExpr::Nat));
        let p = Point::sum(3, Point::pair(1, Point::Nat(7)));
        assert_eq!(p.coords(), vec![3, 1, 7]);
        assert_eq!(Point::from_coords(&d, &[3, 1, 7]).unwrap(), p);
        assert_eq!(Point::from_coords(&d, &[0]).unwrap(), Point::sum(0, Point::Unit));
        assert!(Point::from_coords(&d, &[0, 1]).is_err());
        assert_eq!(p.to_string(), "(3,1,7)");
        assert_eq!(Point::Nat(4).to_string(), "4");
    }

    #[test]
    fn truncated_points_are_lexicographic() {
        let pts = truncated_points(&DomainExpr::prod(DomainExpr::Nat), 2);
        let coords: Vec<_> = pts.iter().map(Point::coords).collect();
        assert_eq!(coords, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }
}
