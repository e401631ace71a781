use super::{check_range, ConstructionError};
use crate::domain::{DomainExpr, DEFAULT_MAX_DEPTH};
use crate::filter::FilterExpr;
use crate::set::SetExpr;

/// `N_0 = {{0}}` on `Unit`, `N_{n+1} = Fr × N_n`.
pub fn katetov(n: usize) -> Result<FilterExpr, ConstructionError> {
    check_range("Katětov level", n, 0, DEFAULT_MAX_DEPTH)?;
    let mut f = FilterExpr::Principal(SetExpr::full(&DomainExpr::Unit));
    for _ in 0..n {
        f = FilterExpr::product(FilterExpr::Frechet(DomainExpr::Nat), f)?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Point;

    #[test]
    fn domains_match() {
        for n in 0..5 {
            assert_eq!(katetov(n).unwrap().domain().unwrap(), DomainExpr::katetov(n));
        }
    }

    #[test]
    fn level_zero_is_the_unit_ultrafilter() {
        let n0 = katetov(0).unwrap();
        assert!(n0.member(&SetExpr::full(&DomainExpr::Unit)).unwrap());
        assert!(!n0.member(&SetExpr::empty(&DomainExpr::Unit)).unwrap());
    }

    #[test]
    fn level_one_is_cofinite() {
        let n1 = katetov(1).unwrap();
        let d = DomainExpr::katetov(1);
        let co = SetExpr::from_points(&d, [Point::pair(3, Point::Unit)])
            .unwrap()
            .complement();
        assert!(n1.member(&co).unwrap());
        assert!(!n1.member(&co.complement()).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(katetov(DEFAULT_MAX_DEPTH + 1).is_err());
    }
}
