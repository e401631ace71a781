//! Finite prefixes of the game `G(F)`: Player I plays members `C_n`, Player II plays
//! finite `F_n ⊆ C_n`. No winner is ever declared; only finite-horizon invariants.

pub mod separator;
pub mod strategy;
pub mod universal;

use std::collections::BTreeSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::domain::{point_in_domain, Point};
use crate::filter::{BijectionSpec, FilterError, FilterExpr};
use crate::rank::RankError;
use crate::reference::{point_in, reference_member};
use crate::set::{SetError, SetExpr};

pub use separator::{separator_verdict, SeparatorFamily, Verdict};
pub use strategy::{
    player_one, player_two, strategy_i_from_copy, PlayerOne, PlayerTwo, PLAYER_ONE_NAMES, PLAYER_TWO_NAMES,
};
pub use universal::{strategy_ii_universal, verify_universal_family, UniversalFamily, UniversalReport};

#[derive(Debug, Error)]
pub enum GameError {
    #[error("illegal move by Player {player} ({strategy}) in round {round}: {reason}")]
    IllegalMove {
        player: &'static str,
        strategy: String,
        round: usize,
        reason: String,
    },
    #[error("no universal witness Z_{round}^k inside the played set for k <= {bound}")]
    NoUniversalWitness { round: usize, bound: u64 },
    #[error("sample {0} is not a member of the filter")]
    BadSample(String),
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("replay diverged at round {0}")]
    ReplayMismatch(usize),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Rank(#[from] RankError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    pub c: SetExpr,
    pub f: BTreeSet<Point>,
    /// `|F_0 ∪ ... ∪ F_n|`.
    pub union_size: usize,
}

/// What strategies see before moving in round `round`.
#[derive(Debug, Clone)]
pub struct GameState {
    pub filter: FilterExpr,
    pub round: usize,
    pub history: Vec<Round>,
    pub union: BTreeSet<Point>,
}

impl GameState {
    pub fn new(filter: FilterExpr) -> Self {
        GameState {
            filter,
            round: 0,
            history: Vec::new(),
            union: BTreeSet::new(),
        }
    }

    pub fn union_set(&self) -> Result<SetExpr, GameError> {
        let d = self.filter.domain()?;
        Ok(SetExpr::from_points(&d, self.union.iter().cloned())?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub filter: FilterExpr,
    pub player_one: String,
    pub player_two: String,
    pub seed: u64,
    pub rounds: Vec<Round>,
    /// Whether the final union lies in the dual ideal; a finite-prefix hint only.
    pub union_in_dual: bool,
}

impl Transcript {
    pub fn union(&self) -> BTreeSet<Point> {
        self.rounds.iter().flat_map(|r| r.f.iter().cloned()).collect()
    }
}

fn fmt_points(pts: &BTreeSet<Point>) -> String {
    let items: Vec<String> = pts.iter().map(Point::to_string).collect();
    format!("{{{}}}", items.join(","))
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, r) in self.rounds.iter().enumerate() {
            writeln!(f, "n={n} C={} F={} |U|={}", r.c, fmt_points(&r.f), r.union_size)?;
        }
        Ok(())
    }
}

/// Plays `rounds` rounds; every move is checked before the game continues.
pub fn play(
    f: &FilterExpr,
    one: &mut dyn PlayerOne,
    two: &mut dyn PlayerTwo,
    rounds: usize,
    seed: u64,
) -> Result<Transcript, GameError> {
    if rounds == 0 {
        return Err(GameError::Precondition("at least one round".into()));
    }
    let d = f.domain()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = GameState::new(f.clone());
    for n in 0..rounds {
        st.round = n;
        let c = one.play(&st, &mut rng)?;
        let illegal = |player, strategy: String, reason: String| GameError::IllegalMove {
            player,
            strategy,
            round: n,
            reason,
        };
        if c.domain() != &d || !f.member(&c)? {
            return Err(illegal("I", one.name(), format!("{c} is not a member of {f}")));
        }
        let fin = two.play(&st, &c, &mut rng)?;
        for p in &fin {
            if !point_in_domain(p, &d) || !c.contains(p)? {
                return Err(illegal("II", two.name(), format!("point {p} is not in {c}")));
            }
        }
        st.union.extend(fin.iter().cloned());
        st.history.push(Round {
            c,
            f: fin,
            union_size: st.union.len(),
        });
    }
    let union_in_dual = f.dual_member(&st.union_set()?)?;
    Ok(Transcript {
        filter: f.clone(),
        player_one: one.name(),
        player_two: two.name(),
        seed,
        rounds: st.history,
        union_in_dual,
    })
}

/// Re-checks legality with the definitional evaluator rather than the oracle.
pub fn validate_transcript(t: &Transcript) -> Result<(), GameError> {
    let mut union = BTreeSet::new();
    for (n, r) in t.rounds.iter().enumerate() {
        let bad = |player, reason: String| GameError::IllegalMove {
            player,
            strategy: if player == "I" {
                t.player_one.clone()
            } else {
                t.player_two.clone()
            },
            round: n,
            reason,
        };
        match reference_member(&t.filter, &r.c) {
            Some(true) => {}
            Some(false) => return Err(bad("I", format!("{} is not a member", r.c))),
            // the definitional evaluator skips non-identity bijections
            None => {
                if !t.filter.member(&r.c)? {
                    return Err(bad("I", format!("{} is not a member", r.c)));
                }
            }
        }
        if let Some(p) = r.f.iter().find(|p| !point_in(&r.c, p)) {
            return Err(bad("II", format!("point {p} is not in {}", r.c)));
        }
        union.extend(r.f.iter().cloned());
        if union.len() != r.union_size {
            return Err(bad("II", "recorded union size is wrong".into()));
        }
    }
    Ok(())
}

/// Replays a transcript by rebuilding both strategies from their registry names.
pub fn replay(t: &Transcript) -> Result<Transcript, GameError> {
    let mut one = player_one(&t.player_one, &t.filter)?;
    let mut two = player_two(&t.player_two, &t.filter)?;
    let again = play(&t.filter, one.as_mut(), two.as_mut(), t.rounds.len(), t.seed)?;
    if let Some(n) = (0..t.rounds.len()).find(|&n| again.rounds[n] != t.rounds[n]) {
        return Err(GameError::ReplayMismatch(n));
    }
    Ok(again)
}

/// First `(round, column)` at which `|σ⁻¹[U_n] ∩ col_i| > Σ_{m≤i} |F_m|`, if any.
pub fn column_bound_violation(t: &Transcript, sigma: &BijectionSpec) -> Result<Option<(usize, u64)>, GameError> {
    let mut columns: std::collections::BTreeMap<u64, BTreeSet<Point>> = Default::default();
    let mut sizes = Vec::new();
    for (n, r) in t.rounds.iter().enumerate() {
        sizes.push(r.f.len());
        for p in &r.f {
            let q = sigma.invert(p).map_err(FilterError::from)?;
            let col = q
                .head()
                .ok_or_else(|| GameError::Precondition(format!("{q} has no column")))?;
            columns.entry(col).or_default().insert(q);
        }
        for (&i, pts) in &columns {
            let allowed: usize = sizes.iter().take(i as usize + 1).sum();
            if pts.len() > allowed {
                return Ok(Some((n, i)));
            }
        }
    }
    Ok(None)
}
