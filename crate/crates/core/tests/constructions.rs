use std::collections::BTreeSet;

use filterlab::constructions::{
    collapse_limit, collapse_limit_of, collapse_pair, katetov, omega_times_frechet, selector_shadow, z_family, Answer,
    CertifiedFilter, ConstructionError, IndexSet, InterleavedPair, Query, COMPLETION_PERIOD,
};
use filterlab::domain::{DomainExpr, Point};
use filterlab::filter::witness::{is_diagonalizable, refute_diagonal_witness, Diagonal};
use filterlab::filter::FilterExpr;
use filterlab::gen::{random_member, random_set, rng};
use filterlab::rank::{RankBounds, Rule};
use filterlab::set::SetExpr;
use rand::Rng;

fn fr() -> FilterExpr {
    FilterExpr::Frechet(DomainExpr::Nat)
}

#[test]
fn katetov_one_behaves_like_frechet() {
    let n1 = katetov(1).unwrap();
    let d = DomainExpr::katetov(1);
    let mut r = rng(1);
    for _ in 0..100 {
        let a = random_set(&mut r, &d);
        assert_eq!(n1.member(&a).unwrap(), a.is_cofinite(), "{a}");
    }
}

#[test]
fn katetov_two_dual_is_fin_times_fin() {
    let n2 = katetov(2).unwrap();
    let d = DomainExpr::katetov(2);
    let mut r = rng(2);
    for _ in 0..100 {
        let a = random_set(&mut r, &d);
        // all but finitely many sections finite: only the tail section decides
        let tail_finite = a.tail_section().unwrap().is_finite();
        assert_eq!(n2.dual_member(&a).unwrap(), tail_finite, "{a}");
    }
}

#[test]
fn z_family_contrapositive_on_members() {
    for gamma in 1..=3 {
        let z = z_family(gamma).unwrap();
        let f = katetov(gamma).unwrap();
        let mut r = rng(40 + gamma as u64);
        for _ in 0..100 {
            let m = random_member(&mut r, &f);
            assert!(z.witness_line(&m, 5000).unwrap().is_some(), "gamma={gamma} M={m}");
        }
    }
}

#[test]
fn z_family_lines_disjoint_and_covering() {
    let z = z_family(2).unwrap();
    let d = z.domain();
    for n in 0..10_000 {
        let p = filterlab::domain::enumerate(&d, n).unwrap();
        let owners = (0..200).filter(|&i| z.contains(i, &p)).count();
        let (i, _) = z.locate(&p).unwrap();
        assert_eq!(owners, usize::from(i < 200));
    }
}

#[test]
fn z_family_grid_dump() {
    let z = z_family(2).unwrap();
    assert_eq!(
        z.grid(3, 3).unwrap(),
        "Z_0: (0,0) (0,1) (0,2)\nZ_1: (1,0) (1,1) (1,2)\nZ_2: (2,0) (2,1) (2,2)\n"
    );
}

#[test]
fn interleaving_meets_every_pair_and_keeps_growing() {
    let mut p = InterleavedPair::new(1).unwrap();
    let mut last = vec![vec![0u64; 10]; 10];
    for bound in [1_000, 10_000, 100_000] {
        let t = p.joint_table(10, bound).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                if bound >= 10_000 {
                    assert!(t[i][j] >= 1, "({i},{j}) at {bound}");
                }
                assert!(t[i][j] > last[i][j] || bound == 1_000, "({i},{j}) stalled at {bound}");
            }
        }
        last = t;
    }
    assert!(p.covers_enumeration(0, 1_000).unwrap());
    assert!(p.covers_enumeration(1, 1_000).unwrap());
}

#[test]
fn interleaving_is_injective_on_a_long_prefix() {
    let mut p = InterleavedPair::new(2).unwrap();
    for side in 0..2 {
        let pts: BTreeSet<Point> = p.prefix(side, 10_000).unwrap().iter().cloned().collect();
        assert_eq!(pts.len(), 10_000);
    }
    assert_eq!(p.stages(), 10_000);
    assert!(p.covers_enumeration(0, 10_000 / COMPLETION_PERIOD).unwrap());
}

#[test]
fn selector_bound_holds_at_ten_thousand() {
    let mut p = InterleavedPair::new(2).unwrap();
    let s = selector_shadow(&mut p, 10_000, 20).unwrap();
    assert_eq!(s.bound_violation(), None, "{:?}", s.block_hits);
    for (i, sel) in s.selectors.iter().enumerate() {
        for &n in sel {
            let q = p.pi(1, n).unwrap();
            assert_eq!(p.zfamily().locate(&q).unwrap().0, i as u64);
        }
        assert!(sel.len() >= s.available[i].min(5));
    }
}

#[test]
fn pullbacks_of_members_are_members() {
    let cp = collapse_pair(2).unwrap();
    let n2 = katetov(2).unwrap();
    let mut r = rng(7);
    for _ in 0..50 {
        let b = random_member(&mut r, &n2);
        let q = Query::Pullback { side: 0, set: b };
        assert_eq!(cp.g0.member(&q).unwrap(), Answer::Yes);
    }
    let full = Query::Set(SetExpr::nat_cofin([]));
    assert_eq!(cp.meet.member(&full).unwrap(), Answer::Yes);
}

#[test]
fn pullback_across_sides_is_unknown_unless_finite() {
    let cp = collapse_pair(2).unwrap();
    let d = DomainExpr::katetov(2);
    let inner = DomainExpr::katetov(1);
    let split = SetExpr::sections(
        d.clone(),
        [(0, SetExpr::full(&inner))].into_iter().collect(),
        SetExpr::empty(&inner),
    )
    .unwrap();
    let q = Query::Pullback { side: 0, set: split };
    assert_eq!(cp.g1.member(&q).unwrap(), Answer::Unknown);
    // G0 decides it exactly, and one refusal settles the meet
    assert_eq!(cp.g0.member(&q).unwrap(), Answer::No);
    assert_eq!(cp.meet.member(&q).unwrap(), Answer::No);
    let fin = Query::Pullback {
        side: 0,
        set: SetExpr::from_points(&d, [Point::pair(0, Point::pair(0, Point::Unit))]).unwrap(),
    };
    assert_eq!(cp.g1.member(&fin).unwrap(), Answer::No);
}

#[test]
fn collapse_limit_is_certified_rank_one() {
    let lim = collapse_limit(2, fr(), IndexSet::even()).unwrap();
    let (b, cert) = lim.filter.rank_bounds().unwrap();
    assert_eq!(b, RankBounds::finite(1, 1));
    assert!(cert.uses(Rule::RCert));
    cert.replay().unwrap();
    assert_eq!(lim.base_bounds, RankBounds::finite(1, 1));
}

#[test]
fn collapse_limit_rejects_members_of_the_base() {
    let base = FilterExpr::Principal(SetExpr::nat_fin([0]));
    let h = IndexSet::Symbolic(SetExpr::nat_fin([0, 2]));
    assert!(matches!(
        collapse_limit(1, base, h),
        Err(ConstructionError::Precondition(_))
    ));
    let cofinite = IndexSet::periodic(2, [0, 1]).unwrap();
    assert!(collapse_limit(1, fr(), cofinite).is_err());
}

/// The principal ultrafilter at `p`, as an oracle.
fn mock(p: u64) -> CertifiedFilter {
    CertifiedFilter::new(
        format!("mock{p}"),
        DomainExpr::Nat,
        RankBounds::finite(0, 0),
        "mock",
        move |q| match q {
            Query::Set(s) => Ok(Answer::from_bool(s.contains(&Point::Nat(p))?)),
            _ => Ok(Answer::Unknown),
        },
    )
    .unwrap()
}

#[test]
fn limit_definition_matches_installed_meet() {
    let bases = [
        (fr(), IndexSet::even()),
        (fr(), IndexSet::periodic(3, [1]).unwrap()),
        (
            FilterExpr::Principal(SetExpr::nat_fin([0, 1])),
            IndexSet::Symbolic(SetExpr::nat_fin([0])),
        ),
    ];
    let mut r = rng(10);
    let mut combos = BTreeSet::new();
    for k in 0..100 {
        let (base, h) = &bases[k % bases.len()];
        let (p0, p1) = (r.gen_range(0..6), r.gen_range(0..6));
        let lim = collapse_limit_of(base.clone(), h.clone(), mock(p0), mock(p1)).unwrap();
        for _ in 0..8 {
            let a = Query::Set(random_set(&mut r, &DomainExpr::Nat));
            let pair = (lim.g0.member(&a).unwrap(), lim.g1.member(&a).unwrap());
            combos.insert(format!("{}{}", pair.0, pair.1));
            assert_eq!(
                lim.member_by_definition(&a).unwrap(),
                lim.filter.member(&a).unwrap(),
                "{a}"
            );
        }
    }
    assert_eq!(combos.len(), 4, "{combos:?}");
}

#[test]
fn omega_times_frechet_bundle() {
    let ex = omega_times_frechet().unwrap();
    assert_eq!(ex.bounds, RankBounds::finite(1, 1));
    assert!(ex.certificate.uses(Rule::RQH));
    assert!(ex.certificate.uses(Rule::R0));
    ex.certificate.replay().unwrap();
    assert_eq!(ex.ct.level(), Some(2));
    let column = SetExpr::sections(
        DomainExpr::prod(DomainExpr::Nat),
        [(0, SetExpr::nat_cofin([]))].into_iter().collect(),
        SetExpr::nat_fin([]),
    )
    .unwrap();
    assert_eq!(ex.diagonal, Diagonal::Yes(column.clone()));
    assert_eq!(refute_diagonal_witness(&ex.filter, &column).unwrap(), None);
}

#[test]
fn countable_type_corpus_is_diagonalized_or_principal() {
    let corpus = [
        fr(),
        FilterExpr::Principal(SetExpr::nat_fin([2, 5])),
        FilterExpr::meet(FilterExpr::Principal(SetExpr::nat_fin([0])), fr()).unwrap(),
        FilterExpr::Principal(SetExpr::nat_cofin([1])),
        omega_times_frechet().unwrap().filter,
        katetov(1).unwrap(),
    ];
    for f in corpus {
        match is_diagonalizable(&f).unwrap() {
            Diagonal::Yes(a) => {
                assert!(!a.is_finite(), "{f}");
                assert_eq!(refute_diagonal_witness(&f, &a).unwrap(), None, "{f}");
            }
            _ => assert!(matches!(&f, FilterExpr::Principal(e) if e.is_finite()), "{f}"),
        }
    }
}

#[test]
fn p_filters_in_the_corpus_are_diagonalizable() {
    let p_filters = [
        fr(),
        FilterExpr::meet(FilterExpr::Principal(SetExpr::nat_fin([0])), fr()).unwrap(),
    ];
    for f in p_filters {
        assert!(matches!(is_diagonalizable(&f).unwrap(), Diagonal::Yes(_)), "{f}");
    }
}
