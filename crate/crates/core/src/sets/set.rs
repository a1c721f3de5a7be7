use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use super::interval::{Endpoint, Interval};
use super::rational::Rational;
use crate::error::{Error, Result};

/// A finite union of intervals in canonical form.
///
/// Parts are sorted, pairwise disjoint, and no two of them could be merged
/// into a single interval. Two sets with the same membership function have
/// the same representation.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn from_interval(i: Interval) -> Self {
        IntervalSet { parts: vec![i] }
    }

    pub fn everything() -> Self {
        IntervalSet::from_interval(Interval::everything())
    }

    /// Canonicalizes an arbitrary list of intervals.
    pub fn normalize(mut parts: Vec<Interval>) -> Self {
        parts.sort_by(|a, b| a.lo_key().cmp(&b.lo_key()));
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match out.last_mut() {
                Some(cur) if cur.touches(&p) => cur.absorb(&p),
                _ => out.push(p),
            }
        }
        IntervalSet { parts: out }
    }

    /// Builds from `(lo, hi, lo_closed, hi_closed)` tuples, rejecting bad intervals.
    pub fn from_tuples(items: impl IntoIterator<Item = (Rational, Rational, bool, bool)>) -> Result<Self> {
        let parts = items
            .into_iter()
            .map(|(a, b, lc, hc)| Interval::new(a.into(), b.into(), lc, hc))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntervalSet::normalize(parts))
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Interval> {
        self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.parts.iter().all(Interval::is_bounded)
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> Result<Rational> {
        let mut total = Rational::zero();
        for p in &self.parts {
            total = total + p.length()?;
        }
        Ok(total)
    }

    /// Measure of the intersection with `[lo, hi]`, without building it.
    pub fn measure_between(&self, lo: &Rational, hi: &Rational) -> Rational {
        if hi <= lo {
            return Rational::zero();
        }
        let start = self.parts.partition_point(|p| p.hi().cmp_rational(lo) != Ordering::Greater);
        let mut total = Rational::zero();
        for p in &self.parts[start..] {
            if p.lo().cmp_rational(hi) != Ordering::Less {
                break;
            }
            let a = match p.lo().finite() {
                Some(a) if a > lo => a,
                _ => lo,
            };
            let b = match p.hi().finite() {
                Some(b) if b < hi => b,
                _ => hi,
            };
            total = total + (b - a);
        }
        total
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let i = self.parts.partition_point(|p| p.lies_below(x));
        self.parts.get(i).is_some_and(|p| p.contains(x))
    }

    /// Index of the part containing `x`, if any.
    pub fn part_containing(&self, x: &Rational) -> Option<usize> {
        let i = self.parts.partition_point(|p| p.lies_below(x));
        self.parts.get(i).filter(|p| p.contains(x)).map(|_| i)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut v = self.parts.clone();
        v.extend(other.parts.iter().cloned());
        IntervalSet::normalize(v)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.parts, &other.parts);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            if let Some(x) = a[i].intersect(&b[j]) {
                out.push(x);
            }
            match a[i].hi().cmp(b[j].hi()) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        IntervalSet::normalize(out)
    }

    /// Complement in the whole real line.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut lo = Endpoint::NegInf;
        let mut lo_closed = false;
        for p in &self.parts {
            if let Ok(gap) = Interval::new(lo.clone(), p.lo().clone(), lo_closed, !p.lo_closed()) {
                out.push(gap);
            }
            lo = p.hi().clone();
            lo_closed = !p.hi_closed();
        }
        if let Ok(gap) = Interval::new(lo, Endpoint::PosInf, lo_closed, false) {
            out.push(gap);
        }
        IntervalSet::normalize(out)
    }

    pub fn complement_within(&self, domain: &Interval) -> IntervalSet {
        self.complement().intersection(&IntervalSet::from_interval(domain.clone()))
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersection(&other.complement())
    }

    pub fn clip(&self, domain: &Interval) -> IntervalSet {
        self.intersection(&IntervalSet::from_interval(domain.clone()))
    }

    /// Image under `x -> a*x + b`.
    pub fn affine_map(&self, a: &Rational, b: &Rational) -> Result<IntervalSet> {
        if a.is_zero() {
            return Err(Error::param("a", "affine scale must be non-zero"));
        }
        let mut parts: Vec<Interval> = self.parts.iter().map(|p| p.affine(a, b)).collect();
        if a.is_negative() {
            parts.reverse();
        }
        Ok(IntervalSet { parts })
    }

    /// Reflection `x -> -x`.
    pub fn reflect(&self) -> IntervalSet {
        self.affine_map(&Rational::int(-1), &Rational::zero()).expect("non-zero scale")
    }

    /// Smallest finite lower bound and largest finite upper bound, if bounded.
    pub fn hull(&self) -> Option<(Rational, Rational)> {
        let first = self.parts.first()?;
        let last = self.parts.last()?;
        Some((first.lo().finite()?.clone(), last.hi().finite()?.clone()))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("{}");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" u ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            parts: Vec<Interval>,
        }
        Ok(IntervalSet::normalize(Raw::deserialize(d)?.parts))
    }
}
