//! Deterministic strategies for both players, and a registry by name.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use super::universal::{strategy_ii_universal, UniversalFamily, UniversalPlayer};
use super::{GameError, GameState};
use crate::domain::{enumerate, truncated_points, DomainExpr, Point};
use crate::filter::witness::verify_embedding;
use crate::filter::{BijectionSpec, FilterExpr};
use crate::gen::{random_member, rng};
use crate::set::SetExpr;

/// Points of a set scanned in canonical enumeration order.
const SCAN_LIMIT: u64 = 1 << 14;

pub trait PlayerOne {
    fn name(&self) -> String;
    fn play(&mut self, st: &GameState, rng: &mut dyn RngCore) -> Result<SetExpr, GameError>;
}

pub trait PlayerTwo {
    fn name(&self) -> String;
    fn play(&mut self, st: &GameState, c: &SetExpr, rng: &mut dyn RngCore) -> Result<BTreeSet<Point>, GameError>;
}

pub const PLAYER_ONE_NAMES: [&str; 5] = ["full", "avoid", "shrinking", "random", "copy"];
pub const PLAYER_TWO_NAMES: [&str; 5] = ["universal", "fresh", "least", "random", "empty"];

/// The first `want` points of `c` in enumeration order.
pub(crate) fn first_points(c: &SetExpr, want: usize, skip: &BTreeSet<Point>) -> Vec<Point> {
    let mut out = Vec::new();
    for idx in 0..SCAN_LIMIT {
        let Ok(p) = enumerate(c.domain(), idx) else { break };
        if !skip.contains(&p) && c.contains(&p).unwrap_or(false) {
            out.push(p);
            if out.len() == want {
                break;
            }
        }
    }
    out
}

/// A member if the filter accepts it, otherwise the full set.
fn or_full(f: &FilterExpr, c: SetExpr) -> Result<SetExpr, GameError> {
    if f.member(&c)? {
        Ok(c)
    } else {
        Ok(SetExpr::full(&f.domain()?))
    }
}

struct Full;

impl PlayerOne for Full {
    fn name(&self) -> String {
        "full".into()
    }

    fn play(&mut self, st: &GameState, _: &mut dyn RngCore) -> Result<SetExpr, GameError> {
        Ok(SetExpr::full(&st.filter.domain()?))
    }
}

/// Removes everything Player II has played so far.
struct Avoid;

impl PlayerOne for Avoid {
    fn name(&self) -> String {
        "avoid".into()
    }

    fn play(&mut self, st: &GameState, _: &mut dyn RngCore) -> Result<SetExpr, GameError> {
        or_full(&st.filter, st.union_set()?.complement())
    }
}

/// Round `n` removes every point with all coordinates below `n`.
struct Shrinking;

impl PlayerOne for Shrinking {
    fn name(&self) -> String {
        "shrinking".into()
    }

    fn play(&mut self, st: &GameState, _: &mut dyn RngCore) -> Result<SetExpr, GameError> {
        let d = st.filter.domain()?;
        let drop = truncated_points(&d, st.round as u64);
        or_full(&st.filter, SetExpr::cofinite_points(&d, drop)?)
    }
}

struct RandomOne;

impl PlayerOne for RandomOne {
    fn name(&self) -> String {
        "random".into()
    }

    fn play(&mut self, st: &GameState, mut rng: &mut dyn RngCore) -> Result<SetExpr, GameError> {
        Ok(random_member(&mut rng, &st.filter))
    }
}

/// Plays the images of the `N_2` members `{(i,j) : i ≥ n}` under an embedding.
pub struct CopyPlayer {
    sigma: BijectionSpec,
}

fn tail_columns(n: usize) -> SetExpr {
    let nat = DomainExpr::Nat;
    SetExpr::sections(
        DomainExpr::prod(nat.clone()),
        (0..n as u64).map(|i| (i, SetExpr::empty(&nat))).collect(),
        SetExpr::full(&nat),
    )
    .expect("rows over Nat")
}

fn n2() -> FilterExpr {
    let fr = FilterExpr::Frechet(DomainExpr::Nat);
    FilterExpr::product(fr.clone(), fr).expect("N_2 is well formed")
}

/// Player I from an embedding of `N_2` into `f`, checked on basis and random samples.
pub fn strategy_i_from_copy(sigma: BijectionSpec, f: &FilterExpr) -> Result<CopyPlayer, GameError> {
    let src = n2();
    let mut samples: Vec<SetExpr> = (0..8).map(tail_columns).collect();
    let mut r = rng(0xc0b1);
    samples.extend((0..24).map(|_| random_member(&mut r, &src)));
    let report = verify_embedding(&sigma, &src, f, &samples)?;
    if !report.passed() {
        return Err(GameError::Precondition(format!(
            "{sigma} does not embed N_2 into {f}: {report}"
        )));
    }
    Ok(CopyPlayer { sigma })
}

impl PlayerOne for CopyPlayer {
    fn name(&self) -> String {
        "copy".into()
    }

    fn play(&mut self, st: &GameState, _: &mut dyn RngCore) -> Result<SetExpr, GameError> {
        Ok(self
            .sigma
            .image(&tail_columns(st.round))
            .map_err(crate::filter::FilterError::from)?)
    }
}

struct Fresh;

impl PlayerTwo for Fresh {
    fn name(&self) -> String {
        "fresh".into()
    }

    fn play(&mut self, st: &GameState, c: &SetExpr, _: &mut dyn RngCore) -> Result<BTreeSet<Point>, GameError> {
        Ok(first_points(c, 1, &st.union).into_iter().collect())
    }
}

struct Least;

impl PlayerTwo for Least {
    fn name(&self) -> String {
        "least".into()
    }

    fn play(&mut self, _: &GameState, c: &SetExpr, _: &mut dyn RngCore) -> Result<BTreeSet<Point>, GameError> {
        Ok(first_points(c, 1, &BTreeSet::new()).into_iter().collect())
    }
}

/// Up to three points among the first sixteen of the played set.
struct RandomTwo;

impl PlayerTwo for RandomTwo {
    fn name(&self) -> String {
        "random".into()
    }

    fn play(&mut self, _: &GameState, c: &SetExpr, rng: &mut dyn RngCore) -> Result<BTreeSet<Point>, GameError> {
        let pool = first_points(c, 16, &BTreeSet::new());
        let k = rng.gen_range(0..=3.min(pool.len()));
        let mut rng = rng;
        Ok(pool.choose_multiple(&mut rng, k).cloned().collect())
    }
}

struct Empty;

impl PlayerTwo for Empty {
    fn name(&self) -> String {
        "empty".into()
    }

    fn play(&mut self, _: &GameState, _: &SetExpr, _: &mut dyn RngCore) -> Result<BTreeSet<Point>, GameError> {
        Ok(BTreeSet::new())
    }
}

pub fn player_one(name: &str, f: &FilterExpr) -> Result<Box<dyn PlayerOne>, GameError> {
    Ok(match name {
        "full" => Box::new(Full),
        "avoid" => Box::new(Avoid),
        "shrinking" => Box::new(Shrinking),
        "random" => Box::new(RandomOne),
        "copy" => {
            let d = f.domain()?;
            let id = BijectionSpec::table(DomainExpr::prod(DomainExpr::Nat), d, BTreeMap::new())
                .map_err(crate::filter::FilterError::from)?;
            Box::new(strategy_i_from_copy(id, f)?)
        }
        other => return Err(GameError::UnknownStrategy(other.into())),
    })
}

pub fn player_two(name: &str, f: &FilterExpr) -> Result<Box<dyn PlayerTwo>, GameError> {
    Ok(match name {
        "universal" => {
            let u = UniversalFamily::Singletons { domain: f.domain()? };
            Box::new(strategy_ii_universal(u)) as Box<dyn PlayerTwo>
        }
        "fresh" => Box::new(Fresh),
        "least" => Box::new(Least),
        "random" => Box::new(RandomTwo),
        "empty" => Box::new(Empty),
        other => return Err(GameError::UnknownStrategy(other.into())),
    })
}

impl PlayerTwo for UniversalPlayer {
    fn name(&self) -> String {
        "universal".into()
    }

    fn play(&mut self, st: &GameState, c: &SetExpr, _: &mut dyn RngCore) -> Result<BTreeSet<Point>, GameError> {
        self.answer(st.round, c)
    }
}
