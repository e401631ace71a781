use filterlab::constructions::katetov;
use filterlab::domain::DomainExpr;
use filterlab::filter::{FilterExpr, FilterFamily, FilterTable};
use filterlab::gen::{random_domain, random_filter, rng};
use filterlab::rank::{
    borel_class_bound, ct_bound, derive, rank_bounds, rank_report, BorelClass, ClassBound, CtBound, Hi, Ordinal,
    RankBounds, RankCertificate, RankHints, Rule,
};
use filterlab::set::SetExpr;
use proptest::prelude::*;

fn fr() -> FilterExpr {
    FilterExpr::Frechet(DomainExpr::Nat)
}

#[test]
fn katetov_ranks_are_exact_and_replay() {
    for n in 0..=4 {
        let (b, cert) = rank_bounds(&katetov(n).unwrap()).unwrap();
        assert_eq!(b, RankBounds::finite(n as u64, n as u64));
        let again = RankCertificate::parse(&cert.to_string()).unwrap();
        assert_eq!(again.replay().unwrap(), b);
    }
}

#[test]
fn fubini_of_katetov_adds_one() {
    for (n, want) in [(2, 3), (1, 2)] {
        let g = FilterExpr::fubini(fr(), FilterTable::constant(katetov(n).unwrap())).unwrap();
        let (b, cert) = rank_bounds(&g).unwrap();
        assert_eq!(b, RankBounds::finite(want, want));
        cert.replay().unwrap();
    }
}

#[test]
fn rank_one_limit_bound_beats_the_generic_one() {
    let k2 = katetov(2).unwrap();
    let lim = FilterExpr::limit(fr(), FilterFamily::table(Default::default(), k2.clone())).unwrap();
    // with and without an exception that blocks the constant-limit rule
    let full = FilterExpr::Principal(SetExpr::full(&DomainExpr::katetov(2)));
    let lim_exc = FilterExpr::limit(fr(), FilterFamily::table([(3, full)].into_iter().collect(), k2)).unwrap();
    for f in [lim, lim_exc] {
        let d = derive(&f, &RankHints::default()).unwrap();
        let root = d.certificate.root_rules();
        let hi = |r: Rule| root.iter().find(|a| a.rule == r).map(|a| a.out.hi.clone());
        assert_eq!(hi(Rule::RLimHi), Some(Hi::Finite(4.into())), "{f}");
        assert_eq!(hi(Rule::RLimHi1), Some(Hi::Finite(3.into())), "{f}");
        assert!(
            d.bounds.hi.finite().is_some_and(|h| *h <= Ordinal::finite(3)),
            "{}",
            d.bounds
        );
        d.certificate.replay().unwrap();
    }
}

#[test]
fn tampered_certificates_are_rejected() {
    let (_, cert) = rank_bounds(&katetov(3).unwrap()).unwrap();
    let text = cert.to_string().replacen("bounds=[3,3]", "bounds=[2,3]", 1);
    let parsed = RankCertificate::parse(&text).unwrap();
    assert!(parsed.replay().is_err());
}

#[test]
fn report_reads_off_the_baire_class() {
    let r = rank_report(&katetov(2).unwrap()).unwrap();
    assert!(r.starts_with("bounds [2,2]\n"));
    assert!(r.contains("B_2"));
    assert!(r.contains("RULE RKat"));
    let lim = FilterExpr::limit(
        fr(),
        FilterFamily::table(
            [(0, FilterExpr::Principal(SetExpr::full(&DomainExpr::katetov(2))))]
                .into_iter()
                .collect(),
            katetov(2).unwrap(),
        ),
    )
    .unwrap();
    assert!(!rank_report(&lim).unwrap().contains("Baire class"));
}

#[test]
fn countable_type_and_class_tags() {
    assert_eq!(
        ct_bound(&FilterExpr::Principal(SetExpr::nat_fin([4]))),
        CtBound::Level(0)
    );
    assert_eq!(ct_bound(&fr()), CtBound::Level(1));
    assert_eq!(borel_class_bound(&fr()), ClassBound::Tag(BorelClass::sigma(2)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_filters_get_consistent_replayable_bounds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_domain(&mut r, 2);
        let f = random_filter(&mut r, &d, 3);
        let (b, cert) = rank_bounds(&f).unwrap();
        prop_assert!(b.is_consistent());
        prop_assert_eq!(cert.replay().unwrap(), b.clone());
        // free filters have positive rank, others rank zero
        let free = f.is_free().unwrap();
        prop_assert_eq!(b.lo > Ordinal::zero(), free);
        if !free {
            prop_assert_eq!(b, RankBounds::finite(0, 0));
        }
    }
}
