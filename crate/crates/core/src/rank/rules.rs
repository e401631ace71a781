//! The rule catalog as pure functions of input bounds.

use std::fmt;
use std::str::FromStr;

use super::bounds::{Hi, RankBounds};
use super::ordinal::Ordinal;
use super::RankError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    R0,
    RKat,
    RMono,
    RMonoLo,
    RFubLo,
    RFubHi,
    RFubFr,
    RFubExact,
    RLimHi,
    RLimHi1,
    RLimLo,
    RLimConst,
    RIso,
    RQH,
    RCert,
    RCt,
}

impl Rule {
    pub const ALL: [Rule; 16] = [
        Rule::R0,
        Rule::RKat,
        Rule::RMono,
        Rule::RMonoLo,
        Rule::RFubLo,
        Rule::RFubHi,
        Rule::RFubFr,
        Rule::RFubExact,
        Rule::RLimHi,
        Rule::RLimHi1,
        Rule::RLimLo,
        Rule::RLimConst,
        Rule::RIso,
        Rule::RQH,
        Rule::RCert,
        Rule::RCt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::R0 => "R0",
            Rule::RKat => "RKat",
            Rule::RMono => "RMono",
            Rule::RMonoLo => "RMonoLo",
            Rule::RFubLo => "RFubLo",
            Rule::RFubHi => "RFubHi",
            Rule::RFubFr => "RFubFr",
            Rule::RFubExact => "RFubExact",
            Rule::RLimHi => "RLimHi",
            Rule::RLimHi1 => "RLimHi1",
            Rule::RLimLo => "RLimLo",
            Rule::RLimConst => "RLimConst",
            Rule::RIso => "RIso",
            Rule::RQH => "RQH",
            Rule::RCert => "RCert",
            Rule::RCt => "RCt",
        }
    }

    /// The statement each rule instantiates.
    pub fn cite(self) -> &'static str {
        match self {
            Rule::R0 => "a filter has rank 0 if and only if it is not free",
            Rule::RKat => "the Katetov filter N_n has rank n",
            Rule::RMono => "a filter contained in another has at most its rank",
            Rule::RMonoLo => "a filter containing another has at least its rank",
            Rule::RFubLo => "rk(F) >= alpha and rk(F_i) >= xi on a member J give rk(G) >= xi+alpha",
            Rule::RFubHi => "rk(F) <= alpha and rk(F_i) <= xi on a member J give rk(G) <= xi+1+alpha",
            Rule::RFubFr => "a Frechet Fubini sum with rk(F_i) <= xi on a member J has rk(G) <= xi+1",
            Rule::RFubExact => {
                "a Fubini sum over a Borel rank 1 filter with rk(F_i) = alpha on a member J has rank alpha+1"
            }
            Rule::RLimHi => "rk(F) <= alpha and rk(F_i) <= beta on a member J give rk(lim F_i) <= beta+1+alpha",
            Rule::RLimHi1 => {
                "a limit over a Borel rank 1 filter with rk(F_i) <= alpha on a member J has rank at most alpha+1"
            }
            Rule::RLimLo => {
                "free filters on a member J have a limit containing the Frechet filter, so of positive rank"
            }
            Rule::RLimConst => "the limit of a constant family is its member",
            Rule::RIso => "two isomorphic filters have the same rank",
            Rule::RQH => "a quasi-homomorphism from F for G gives rk(G) <= rk(F)",
            Rule::RCert => "externally certified bounds",
            Rule::RCt => "a filter built by n nested Frechet limits from principal ultrafilters has rank at most n",
        }
    }

    /// Recomputes the output bounds from the inputs and the argument.
    pub fn eval(self, ins: &[RankBounds], arg: &str) -> Result<RankBounds, RankError> {
        let premise = |what: &str| RankError::Premise {
            rule: self.name(),
            detail: what.to_string(),
        };
        let split = || match ins.split_first() {
            Some((b, m)) if !m.is_empty() => Ok((b, m)),
            _ => Err(premise("expects base and member bounds")),
        };
        let one = || match ins {
            [x] => Ok(x),
            _ => Err(premise("expects exactly one input")),
        };
        let number = |key: &str| -> Result<u64, RankError> {
            arg.strip_prefix(key)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| premise(&format!("argument {arg:?} lacks {key}")))
        };
        let max_hi = |m: &[RankBounds]| m.iter().fold(Hi::Finite(Ordinal::zero()), |h, b| h.max(&b.hi));
        let plus_one = |h: Hi| h.add(&Hi::Finite(Ordinal::finite(1)));
        let upper = |hi: Hi| RankBounds {
            lo: Ordinal::zero(),
            hi,
        };
        let base_is_rank_one = |b: &RankBounds| b.is_exact() == Some(&Ordinal::finite(1));
        Ok(match self {
            Rule::R0 => match arg {
                "free" => RankBounds::at_least(Ordinal::finite(1)),
                "not-free" => RankBounds::finite(0, 0),
                _ => return Err(premise("argument must be free or not-free")),
            },
            Rule::RKat => RankBounds::exact(Ordinal::finite(number("n=")?)),
            Rule::RCt => RankBounds::at_most(Ordinal::finite(number("level=")?)),
            Rule::RCert => arg
                .strip_prefix("bounds=")
                .ok_or_else(|| premise("argument lacks bounds="))?
                .parse()?,
            Rule::RMono => {
                if ins.is_empty() {
                    return Err(premise("expects the larger filters"));
                }
                upper(ins.iter().fold(Hi::Unbounded, |h, b| h.min(&b.hi)))
            }
            Rule::RMonoLo => RankBounds::at_least(one()?.lo.clone()),
            Rule::RLimConst | Rule::RIso => one()?.clone(),
            Rule::RQH => upper(one()?.hi.clone()),
            Rule::RFubLo => {
                let (b, m) = split()?;
                let xi = m.iter().map(|x| &x.lo).min().unwrap().clone();
                RankBounds::at_least(xi.add(&b.lo))
            }
            Rule::RFubHi | Rule::RLimHi => {
                let (b, m) = split()?;
                upper(plus_one(max_hi(m)).add(&b.hi))
            }
            Rule::RFubFr => {
                let (_, m) = split()?;
                upper(plus_one(max_hi(m)))
            }
            Rule::RLimHi1 => {
                let (b, m) = split()?;
                if !base_is_rank_one(b) {
                    return Err(premise("base rank is not exactly 1"));
                }
                upper(plus_one(max_hi(m)))
            }
            Rule::RFubExact => {
                let (b, m) = split()?;
                if !base_is_rank_one(b) {
                    return Err(premise("base rank is not exactly 1"));
                }
                let alpha = m[0].is_exact().ok_or_else(|| premise("member rank not exact"))?;
                if m.iter().any(|x| x.is_exact() != Some(alpha)) {
                    return Err(premise("member ranks differ"));
                }
                RankBounds::exact(alpha.succ())
            }
            Rule::RLimLo => {
                let (_, m) = split()?;
                if m.iter().any(|x| x.lo.is_zero()) {
                    return Err(premise("some member may have rank 0"));
                }
                RankBounds::at_least(Ordinal::finite(1))
            }
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = RankError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| RankError::Parse(format!("unknown rule {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(lo: u64, hi: u64) -> RankBounds {
        RankBounds::finite(lo, hi)
    }

    #[test]
    fn fubini_formulas() {
        let ins = [b(1, 1), b(2, 2)];
        assert_eq!(Rule::RFubLo.eval(&ins, "").unwrap().lo, Ordinal::finite(3));
        assert_eq!(Rule::RFubHi.eval(&ins, "").unwrap(), b(0, 4));
        assert_eq!(Rule::RFubFr.eval(&ins, "").unwrap(), b(0, 3));
        assert_eq!(Rule::RFubExact.eval(&ins, "").unwrap(), b(3, 3));
        assert!(Rule::RFubExact.eval(&[b(1, 2), b(2, 2)], "").is_err());
    }

    #[test]
    fn limit_formulas() {
        let ins = [b(1, 1), b(0, 0), b(2, 2)];
        assert_eq!(Rule::RLimHi.eval(&ins, "").unwrap(), b(0, 4));
        assert_eq!(Rule::RLimHi1.eval(&ins, "").unwrap(), b(0, 3));
        assert!(Rule::RLimLo.eval(&ins, "").is_err());
        assert_eq!(
            Rule::RLimLo.eval(&[b(1, 1), b(2, 2)], "").unwrap(),
            RankBounds::at_least(Ordinal::finite(1))
        );
    }

    #[test]
    fn argument_rules() {
        assert_eq!(Rule::RKat.eval(&[], "n=3").unwrap(), b(3, 3));
        assert_eq!(Rule::R0.eval(&[], "not-free").unwrap(), b(0, 0));
        assert_eq!(Rule::RCert.eval(&[], "bounds=[1,1]").unwrap(), b(1, 1));
        assert!(Rule::RKat.eval(&[], "3").is_err());
        for r in Rule::ALL {
            assert_eq!(r.name().parse::<Rule>().unwrap(), r);
        }
    }
}
