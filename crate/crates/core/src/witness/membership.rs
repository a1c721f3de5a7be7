//! Membership in the levels `E_k` of a symmetric Cantor set by direct
//! descent through the construction, independent of the interval-set code.

use serde::{Deserialize, Serialize};

use crate::constructions::CantorSpec;
use crate::error::{Error, Result};
use crate::sets::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    In,
    Out,
    Unknown,
}

struct Descent<'a> {
    spec: &'a CantorSpec,
    k: usize,
    lo: Rational,
    len: Rational,
}

impl<'a> Descent<'a> {
    fn new(spec: &'a CantorSpec) -> Self {
        Descent { spec, k: 0, lo: Rational::zero(), len: Rational::one() }
    }

    /// The open gap removed from the current part.
    fn gap(&self) -> Result<(Rational, Rational, Rational)> {
        let t = self
            .spec
            .t(self.k)
            .ok_or_else(|| Error::Schedule(format!("removal length t_{} is not specified", self.k)))?;
        if t >= self.len {
            return Err(Error::Schedule(format!("removal length t_{} = {t} does not fit in a part of length {}", self.k, self.len)));
        }
        let side = (&self.len - &t).mul_pow2(-1);
        let g_lo = &self.lo + &side;
        let g_hi = &g_lo + &t;
        Ok((g_lo, g_hi, side))
    }

    fn step(&mut self, right: bool, g_hi: Rational, side: Rational) {
        if right {
            self.lo = g_hi;
        }
        self.len = side;
        self.k += 1;
    }
}

/// Is `x` in `E_depth`? Points outside `[0, 1]` are not.
pub fn cantor_membership(spec: &CantorSpec, x: &Rational, depth: usize) -> Result<bool> {
    if x.is_negative() || x > &Rational::one() {
        return Ok(false);
    }
    let mut d = Descent::new(spec);
    while d.k < depth {
        let (g_lo, g_hi, side) = d.gap()?;
        if x > &g_lo && x < &g_hi {
            return Ok(false);
        }
        let right = x >= &g_hi;
        d.step(right, g_hi, side);
    }
    Ok(true)
}

/// Membership of the whole interval `[lo, hi]`: `In` when it lies in one
/// part of `E_depth`, `Out` when it misses `E_depth`, otherwise `Unknown`.
pub fn cantor_membership_bracket(spec: &CantorSpec, lo: &Rational, hi: &Rational, depth: usize) -> Result<Membership> {
    if lo > hi {
        return Err(Error::param("bracket", format!("empty bracket [{lo}, {hi}]")));
    }
    let one = Rational::one();
    if hi.is_negative() || lo > &one {
        return Ok(Membership::Out);
    }
    if lo.is_negative() || hi > &one {
        return Ok(Membership::Unknown);
    }
    let mut d = Descent::new(spec);
    while d.k < depth {
        let (g_lo, g_hi, side) = d.gap()?;
        if lo > &g_lo && hi < &g_hi {
            return Ok(Membership::Out);
        }
        let right = if hi <= &g_lo {
            false
        } else if lo >= &g_hi {
            true
        } else {
            return Ok(Membership::Unknown);
        };
        d.step(right, g_hi, side);
    }
    Ok(Membership::In)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn descent_examples() {
        let s = CantorSpec::middle_a(q(1, 4)).unwrap();
        for d in 0..12 {
            assert!(cantor_membership(&s, &q(0, 1), d).unwrap());
        }
        assert!(!cantor_membership(&s, &q(1, 2), 1).unwrap());
        assert!(cantor_membership(&s, &q(3, 8), 5).unwrap());
        assert!(cantor_membership(&s, &q(5, 8), 5).unwrap());
        assert!(!cantor_membership(&s, &q(-1, 8), 0).unwrap());
    }

    #[test]
    fn brackets() {
        let s = CantorSpec::middle_a(q(1, 4)).unwrap();
        assert_eq!(cantor_membership_bracket(&s, &q(0, 1), &q(1, 10), 1).unwrap(), Membership::In);
        assert_eq!(cantor_membership_bracket(&s, &q(4, 10), &q(6, 10), 1).unwrap(), Membership::Out);
        assert_eq!(cantor_membership_bracket(&s, &q(3, 10), &q(4, 10), 1).unwrap(), Membership::Unknown);
        assert!(cantor_membership_bracket(&s, &q(1, 2), &q(1, 3), 1).is_err());
    }
}
