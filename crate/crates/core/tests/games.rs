use std::collections::BTreeMap;

use filterlab::domain::{DomainExpr, Point};
use filterlab::filter::{BijectionSpec, FilterExpr, FilterFamily, FilterTable};
use filterlab::game::{
    column_bound_violation, play, player_one, player_two, replay, separator_verdict, strategy_i_from_copy,
    strategy_ii_universal, validate_transcript, GameError, GameState, PlayerOne, SeparatorFamily, UniversalFamily,
    Verdict, PLAYER_ONE_NAMES, PLAYER_TWO_NAMES,
};
use filterlab::gen::{random_member, random_set, rng};
use filterlab::set::SetExpr;
use rand::{Rng, RngCore};

fn fr() -> FilterExpr {
    FilterExpr::Frechet(DomainExpr::Nat)
}

fn n2() -> FilterExpr {
    FilterExpr::product(fr(), fr()).unwrap()
}

fn omega2() -> DomainExpr {
    DomainExpr::prod(DomainExpr::Nat)
}

fn identity2() -> BijectionSpec {
    BijectionSpec::patch(omega2(), BTreeMap::new()).unwrap()
}

#[test]
fn frechet_universal_singletons_grow_every_round() {
    let mut one = player_one("avoid", &fr()).unwrap();
    let mut two = player_two("universal", &fr()).unwrap();
    let t = play(&fr(), one.as_mut(), two.as_mut(), 10, 1).unwrap();
    assert_eq!(t.union().len(), 10);
    assert_eq!(t.rounds.last().unwrap().union_size, 10);
    validate_transcript(&t).unwrap();
}

#[test]
fn fresh_player_against_constant_cofinite_set() {
    struct Always;
    impl PlayerOne for Always {
        fn name(&self) -> String {
            "always".into()
        }
        fn play(&mut self, _: &GameState, _: &mut dyn RngCore) -> Result<SetExpr, GameError> {
            Ok(SetExpr::nat_cofin([]))
        }
    }
    let mut two = player_two("fresh", &fr()).unwrap();
    let t = play(&fr(), &mut Always, two.as_mut(), 10, 0).unwrap();
    assert_eq!(t.union().len(), 10);
}

#[test]
fn universal_self_play_on_n1_keeps_growing() {
    let n1 = FilterExpr::product(fr(), FilterExpr::Principal(SetExpr::full(&DomainExpr::Unit))).unwrap();
    let mut one = player_one("avoid", &n1).unwrap();
    let mut two = player_two("universal", &n1).unwrap();
    let t = play(&n1, one.as_mut(), two.as_mut(), 30, 3).unwrap();
    for (n, r) in t.rounds.iter().enumerate() {
        assert_eq!(r.union_size, n + 1);
    }
}

#[test]
fn universal_answers_are_inside_the_played_set() {
    let p = strategy_ii_universal(UniversalFamily::Singletons {
        domain: DomainExpr::Nat,
    });
    let mut r = rng(4);
    for _ in 0..100 {
        let c = random_member(&mut r, &fr());
        let z = p.answer(0, &c).unwrap();
        assert!(z.iter().all(|q| c.contains(q).unwrap()));
    }
}

#[test]
fn copy_player_moves_are_tail_columns() {
    let mut one = strategy_i_from_copy(identity2(), &n2()).unwrap();
    let mut two = player_two("empty", &n2()).unwrap();
    let t = play(&n2(), &mut one, two.as_mut(), 5, 0).unwrap();
    let nat = DomainExpr::Nat;
    for (n, r) in t.rounds.iter().enumerate() {
        let expect = SetExpr::sections(
            omega2(),
            (0..n as u64).map(|i| (i, SetExpr::empty(&nat))).collect(),
            SetExpr::full(&nat),
        )
        .unwrap();
        assert_eq!(r.c, expect);
    }
}

#[test]
fn copy_player_column_bound_against_random_opponents() {
    for seed in 0..50 {
        let mut one = player_one("copy", &n2()).unwrap();
        let mut two = player_two("random", &n2()).unwrap();
        let t = play(&n2(), one.as_mut(), two.as_mut(), 50, seed).unwrap();
        validate_transcript(&t).unwrap();
        assert_eq!(column_bound_violation(&t, &identity2()).unwrap(), None);
        assert_eq!(replay(&t).unwrap(), t);
    }
}

#[test]
fn column_bound_detects_a_forged_transcript() {
    let mut one = player_one("full", &n2()).unwrap();
    let mut two = player_two("least", &n2()).unwrap();
    // Player I never shrinks, so Player II may keep hitting column 0
    let t = play(&n2(), one.as_mut(), two.as_mut(), 3, 0).unwrap();
    assert!(column_bound_violation(&t, &identity2()).unwrap().is_none());
    let mut forged = t.clone();
    forged.rounds[1].f = [Point::pair(0, Point::Nat(9)), Point::pair(0, Point::Nat(8))].into();
    assert_eq!(column_bound_violation(&forged, &identity2()).unwrap(), Some((1, 0)));
}

#[test]
fn copy_strategy_rejects_a_non_embedding() {
    let principal = FilterExpr::Principal(SetExpr::from_points(&omega2(), [Point::pair(0, Point::Nat(0))]).unwrap());
    assert!(matches!(
        strategy_i_from_copy(identity2(), &principal),
        Err(GameError::Precondition(_))
    ));
}

#[test]
fn illegal_moves_name_the_offender() {
    struct Cheat;
    impl PlayerOne for Cheat {
        fn name(&self) -> String {
            "cheat".into()
        }
        fn play(&mut self, st: &GameState, _: &mut dyn RngCore) -> Result<SetExpr, GameError> {
            Ok(if st.round < 2 {
                SetExpr::nat_cofin([])
            } else {
                SetExpr::nat_fin([1])
            })
        }
    }
    let mut two = player_two("least", &fr()).unwrap();
    match play(&fr(), &mut Cheat, two.as_mut(), 5, 0) {
        Err(GameError::IllegalMove {
            player,
            strategy,
            round,
            ..
        }) => {
            assert_eq!((player, strategy.as_str(), round), ("I", "cheat", 2));
        }
        other => panic!("expected an illegal move, got {other:?}"),
    }
}

#[test]
fn random_strategy_pairs_replay_identically() {
    let mut r = rng(12);
    let filters = [fr(), n2()];
    for i in 0..20 {
        let f = &filters[i % 2];
        let p1 = PLAYER_ONE_NAMES[r.gen_range(0..PLAYER_ONE_NAMES.len())];
        let p1 = if p1 == "copy" && i % 2 == 0 { "avoid" } else { p1 };
        let p2 = PLAYER_TWO_NAMES[r.gen_range(0..PLAYER_TWO_NAMES.len())];
        let mut one = player_one(p1, f).unwrap();
        let mut two = player_two(p2, f).unwrap();
        let t = play(f, one.as_mut(), two.as_mut(), 12, r.gen()).unwrap();
        validate_transcript(&t).unwrap();
        assert_eq!(replay(&t).unwrap(), t, "{p1} vs {p2}");
    }
}

#[test]
fn transcript_lines() {
    let mut one = player_one("avoid", &fr()).unwrap();
    let mut two = player_two("fresh", &fr()).unwrap();
    let t = play(&fr(), one.as_mut(), two.as_mut(), 2, 0).unwrap();
    assert_eq!(t.to_string(), "n=0 C=cofin{} F={0} |U|=1\nn=1 C=cofin{0} F={1} |U|=2\n");
}

fn lifted_frechet_limit() -> FilterExpr {
    FilterExpr::limit(
        fr(),
        FilterFamily::Lifted {
            table: FilterTable::constant(fr()),
            target: omega2(),
        },
    )
    .unwrap()
}

#[test]
fn separator_agrees_with_membership() {
    let lim = lifted_frechet_limit();
    let FilterExpr::Limit { family, .. } = &lim else {
        unreachable!()
    };
    let sep = SeparatorFamily::Filters(family.clone());
    let u = UniversalFamily::Singletons {
        domain: DomainExpr::Nat,
    };
    let mut r = rng(8);
    let (mut members, mut duals) = (0, 0);
    while members < 100 || duals < 100 {
        let a = if r.gen_bool(0.5) {
            random_member(&mut r, &lim)
        } else {
            random_set(&mut r, &omega2())
        };
        let v = separator_verdict(&lim, &u, &sep, &a).unwrap();
        assert!(!matches!(v, Verdict::Unknown(_)));
        if lim.member(&a).unwrap() {
            assert_eq!(v, Verdict::In, "{a}");
            members += 1;
        }
        if lim.dual_member(&a).unwrap() {
            assert_eq!(v, Verdict::Out, "{a}");
            duals += 1;
        }
    }
    let full = SetExpr::full(&omega2());
    assert_eq!(separator_verdict(&lim, &u, &sep, &full).unwrap(), Verdict::In);
}

#[test]
fn separator_needs_a_rank_one_base() {
    // a principal base has rank 0
    let base = FilterExpr::Principal(SetExpr::nat_cofin([]));
    let lim = FilterExpr::limit(base, FilterFamily::Table(FilterTable::constant(fr()))).unwrap();
    let FilterExpr::Limit { family, .. } = &lim else {
        unreachable!()
    };
    let r = separator_verdict(
        &lim,
        &UniversalFamily::ColumnSegments,
        &SeparatorFamily::Filters(family.clone()),
        &SetExpr::nat_cofin([]),
    );
    assert!(matches!(r, Err(GameError::Precondition(_))));
}
