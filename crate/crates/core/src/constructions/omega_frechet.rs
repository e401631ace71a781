//! `F = {ω} × Fr` on `ω × ω`: rank 1 but countable type 2.
//!
//! Only `ct ≤ 2` is certified here. The lower bound rests on every free
//! countable-type-1 filter being a restriction of `N_1` to an infinite set,
//! which `F` is not; that argument quantifies over all such filters and is not
//! checked mechanically.

use rand::Rng;

use super::ConstructionError;
use crate::domain::DomainExpr;
use crate::filter::witness::{
    is_diagonalizable, verify_quasi_homomorphism, Diagonal, PointMap, QuasiHom, WitnessReport,
};
use crate::filter::{FilterExpr, FilterFamily, FilterTable};
use crate::gen::{random_member, random_set, rng};
use crate::rank::{ct_bound, rank_bounds_with, CtBound, QhHint, RankBounds, RankCertificate, RankHints};
use crate::set::SetExpr;

const AGREEMENT_SAMPLES: usize = 200;
const QH_SAMPLES: usize = 30;

#[derive(Debug, Clone)]
pub struct OmegaTimesFrechet {
    pub filter: FilterExpr,
    pub bounds: RankBounds,
    pub certificate: RankCertificate,
    /// `x ↦ (0, x)` from `Fr` into `F`.
    pub witness: QuasiHom,
    pub witness_report: WitnessReport,
    /// `F` as a Fréchet limit of `{M : M_i cofinite}`, each repeated infinitely often.
    pub limit_form: FilterExpr,
    /// Samples on which `F` and `limit_form` agree; equals the sample count.
    pub limit_form_agreement: usize,
    pub ct: CtBound,
    pub diagonal: Diagonal,
}

pub fn omega_times_frechet() -> Result<OmegaTimesFrechet, ConstructionError> {
    let nat = DomainExpr::Nat;
    let omega2 = DomainExpr::prod(nat.clone());
    let fr = FilterExpr::Frechet(nat.clone());
    let filter = FilterExpr::product(FilterExpr::Principal(SetExpr::full(&nat)), fr.clone())?;

    let witness = QuasiHom {
        map: PointMap::Column(0),
        domain_member: SetExpr::full(&nat),
    };
    let mut r = rng(0x53);
    let samples: Vec<SetExpr> = (0..QH_SAMPLES).map(|_| random_member(&mut r, &filter)).collect();
    let witness_report = verify_quasi_homomorphism(&witness, &fr, &filter, &samples)?;
    let hints = RankHints {
        quasi_homs: vec![QhHint {
            target: filter.clone(),
            source: fr.clone(),
            witness: witness.clone(),
        }],
    };
    let (bounds, certificate) = rank_bounds_with(&filter, &hints)?;

    let limit_form = FilterExpr::limit(
        FilterExpr::Frechet(omega2.clone()),
        FilterFamily::Repeated(Box::new(FilterFamily::Lifted {
            table: FilterTable::constant(fr),
            target: omega2.clone(),
        })),
    )?;
    let mut limit_form_agreement = 0;
    for _ in 0..AGREEMENT_SAMPLES {
        let a = if r.gen_bool(0.5) {
            random_member(&mut r, &filter)
        } else {
            random_set(&mut r, &omega2)
        };
        if filter.member(&a)? == limit_form.member(&a)? {
            limit_form_agreement += 1;
        }
    }

    Ok(OmegaTimesFrechet {
        ct: ct_bound(&limit_form),
        diagonal: is_diagonalizable(&filter)?,
        filter,
        bounds,
        certificate,
        witness,
        witness_report,
        limit_form,
        limit_form_agreement,
    })
}
