use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::Rational;
use crate::error::{Error, Result};

/// An interval endpoint on the extended line.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Endpoint {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Endpoint::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Endpoint::Finite(_))
    }

    fn neg(&self) -> Endpoint {
        match self {
            Endpoint::NegInf => Endpoint::PosInf,
            Endpoint::PosInf => Endpoint::NegInf,
            Endpoint::Finite(r) => Endpoint::Finite(-r),
        }
    }

    fn affine(&self, a: &Rational, b: &Rational) -> Endpoint {
        match self {
            Endpoint::Finite(r) => Endpoint::Finite(a * r + b),
            e if a.is_negative() => e.neg(),
            e => e.clone(),
        }
    }

    pub fn cmp_rational(&self, x: &Rational) -> Ordering {
        match self {
            Endpoint::NegInf => Ordering::Less,
            Endpoint::PosInf => Ordering::Greater,
            Endpoint::Finite(r) => r.cmp(x),
        }
    }
}

impl From<Rational> for Endpoint {
    fn from(r: Rational) -> Self {
        Endpoint::Finite(r)
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => f.write_str("-inf"),
            Endpoint::PosInf => f.write_str("+inf"),
            Endpoint::Finite(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Endpoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Endpoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "-inf" => Ok(Endpoint::NegInf),
            "+inf" => Ok(Endpoint::PosInf),
            other => other.parse().map(Endpoint::Finite).map_err(serde::de::Error::custom),
        }
    }
}

/// A non-empty interval with explicit closure flags.
///
/// Either `lo < hi`, or `lo == hi` with both ends closed (a singleton).
/// Infinite ends are always open.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    lo: Endpoint,
    hi: Endpoint,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Endpoint, hi: Endpoint, lo_closed: bool, hi_closed: bool) -> Result<Interval> {
        if lo == Endpoint::PosInf || hi == Endpoint::NegInf {
            return Err(Error::InvalidInterval(format!("endpoints {lo}, {hi}")));
        }
        let lo_closed = lo_closed && lo.is_finite();
        let hi_closed = hi_closed && hi.is_finite();
        match lo.cmp(&hi) {
            Ordering::Greater => Err(Error::InvalidInterval(format!("lo {lo} > hi {hi}"))),
            Ordering::Equal if !(lo_closed && hi_closed) => {
                Err(Error::InvalidInterval(format!("degenerate non-closed interval at {lo}")))
            }
            _ => Ok(Interval { lo, hi, lo_closed, hi_closed }),
        }
    }

    pub fn open(a: Rational, b: Rational) -> Result<Interval> {
        Interval::new(a.into(), b.into(), false, false)
    }

    pub fn closed(a: Rational, b: Rational) -> Result<Interval> {
        Interval::new(a.into(), b.into(), true, true)
    }

    pub fn point(x: Rational) -> Interval {
        Interval { lo: x.clone().into(), hi: x.into(), lo_closed: true, hi_closed: true }
    }

    pub fn everything() -> Interval {
        Interval { lo: Endpoint::NegInf, hi: Endpoint::PosInf, lo_closed: false, hi_closed: false }
    }

    /// `[a, +inf)`.
    pub fn closed_ray(a: Rational) -> Interval {
        Interval { lo: a.into(), hi: Endpoint::PosInf, lo_closed: true, hi_closed: false }
    }

    pub fn lo(&self) -> &Endpoint {
        &self.lo
    }

    pub fn hi(&self) -> &Endpoint {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    /// Finite endpoints, or `None` for an unbounded interval.
    pub fn bounds(&self) -> Option<(&Rational, &Rational)> {
        Some((self.lo.finite()?, self.hi.finite()?))
    }

    pub fn length(&self) -> Result<Rational> {
        let (a, b) = self.bounds().ok_or(Error::InfiniteMeasure)?;
        Ok(b - a)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = match self.lo.cmp_rational(x) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Greater => false,
        };
        above
            && match self.hi.cmp_rational(x) {
                Ordering::Greater => true,
                Ordering::Equal => self.hi_closed,
                Ordering::Less => false,
            }
    }

    /// Does this interval contain every point of `other`?
    pub fn contains_interval(&self, other: &Interval) -> bool {
        let lo_ok = match self.lo.cmp(&other.lo) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed || !other.lo_closed,
            Ordering::Greater => false,
        };
        let hi_ok = match self.hi.cmp(&other.hi) {
            Ordering::Greater => true,
            Ordering::Equal => self.hi_closed || !other.hi_closed,
            Ordering::Less => false,
        };
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, hi, lo_closed, hi_closed).ok()
    }

    /// Image under `x -> a*x + b` with `a != 0`.
    pub fn affine(&self, a: &Rational, b: &Rational) -> Interval {
        let lo = self.lo.affine(a, b);
        let hi = self.hi.affine(a, b);
        if a.is_negative() {
            Interval { lo: hi, hi: lo, lo_closed: self.hi_closed, hi_closed: self.lo_closed }
        } else {
            Interval { lo, hi, lo_closed: self.lo_closed, hi_closed: self.hi_closed }
        }
    }

    /// Sort key: by left end, closed-left before open-left.
    pub(crate) fn lo_key(&self) -> (&Endpoint, bool) {
        (&self.lo, !self.lo_closed)
    }

    /// Can `next` (starting at or after `self.lo`) be merged into `self`?
    pub(crate) fn touches(&self, next: &Interval) -> bool {
        match next.lo.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => next.lo_closed || self.hi_closed,
            Ordering::Greater => false,
        }
    }

    pub(crate) fn absorb(&mut self, next: &Interval) {
        if next.lo == self.lo {
            self.lo_closed |= next.lo_closed;
        }
        match next.hi.cmp(&self.hi) {
            Ordering::Greater => {
                self.hi = next.hi.clone();
                self.hi_closed = next.hi_closed;
            }
            Ordering::Equal => self.hi_closed |= next.hi_closed,
            Ordering::Less => {}
        }
    }

    /// Is `x` strictly above every point of this interval?
    pub(crate) fn lies_below(&self, x: &Rational) -> bool {
        match self.hi.cmp_rational(x) {
            Ordering::Less => true,
            Ordering::Equal => !self.hi_closed,
            Ordering::Greater => false,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_singleton() {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Deserialize)]
struct RawInterval {
    lo: Endpoint,
    hi: Endpoint,
    lo_closed: bool,
    hi_closed: bool,
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RawInterval::deserialize(d)?;
        if (r.lo_closed && !r.lo.is_finite()) || (r.hi_closed && !r.hi.is_finite()) {
            return Err(serde::de::Error::custom("infinite endpoints must be open"));
        }
        Interval::new(r.lo, r.hi, r.lo_closed, r.hi_closed).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn construction_rules() {
        assert!(Interval::open(q(1, 1), q(0, 1)).is_err());
        assert!(Interval::open(q(1, 1), q(1, 1)).is_err());
        assert!(Interval::closed(q(1, 1), q(1, 1)).unwrap().is_singleton());
        let ray = Interval::new(Endpoint::NegInf, q(0, 1).into(), true, true).unwrap();
        assert!(!ray.lo_closed());
    }

    #[test]
    fn membership_respects_flags() {
        let i = Interval::new(q(0, 1).into(), q(1, 1).into(), true, false).unwrap();
        assert!(i.contains(&q(0, 1)));
        assert!(!i.contains(&q(1, 1)));
        assert!(i.contains(&q(1, 2)));
    }

    #[test]
    fn reflection_swaps_flags() {
        let i = Interval::new(q(0, 1).into(), q(1, 1).into(), true, false).unwrap();
        let r = i.affine(&q(-1, 1), &q(0, 1));
        assert_eq!(r, Interval::new(q(-1, 1).into(), q(0, 1).into(), false, true).unwrap());
    }
}
