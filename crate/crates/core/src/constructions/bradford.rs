//! The symmetric set `E = (E_1 ∩ E_2) ∪ -(E_1 ∩ E_2)` with `E_1` the
//! equidistributed blocks at `ε/4` and `E_2` the countable elimination at
//! `ε/4` over a list of rational differences.

use std::collections::HashMap;

use serde::Serialize;
use serde_json::json;

use super::elim::{DeltaSource, ElimGenerator, ElimInterval, ElimSchedule};
use super::Construction;
use crate::error::{Error, Result};
use crate::sets::{Interval, IntervalSet, LazyIntervalStream, Rational, TailBound};

#[derive(Clone)]
pub struct Bradford {
    pub epsilon: Rational,
    /// Block length of the equidistributed part, `ε/4`.
    pub block: Rational,
    pub elim: ElimGenerator,
}

impl Bradford {
    pub fn new(epsilon: &Rational, deltas: DeltaSource) -> Result<Self> {
        if !epsilon.is_positive() || *epsilon >= Rational::one() {
            return Err(Error::param("epsilon", format!("must lie in (0, 1), got {epsilon}")));
        }
        let quarter = epsilon.mul_pow2(-2);
        let schedule = ElimSchedule::new(deltas, quarter.clone())?;
        Ok(Bradford { epsilon: epsilon.clone(), block: quarter, elim: ElimGenerator::new(schedule) })
    }

    /// Removed set intersected with `[lo, hi)`, for `0 <= lo`.
    pub fn removed_positive(&self, lo: &Rational, hi: &Rational) -> Result<IntervalSet> {
        let window = Interval::new(lo.clone().into(), hi.clone().into(), true, false)?;
        let mut parts = Vec::new();
        let mut n = lo.floor();
        while Rational::int(n.clone()) < *hi {
            let right = Rational::int(n.clone() + 1);
            parts.push(Interval::open(&right - &self.block, right)?);
            n += 1;
        }
        for iv in self.elim.meeting(lo, hi)? {
            parts.push(iv.interval());
        }
        Ok(IntervalSet::normalize(parts).clip(&window))
    }

    /// Exact membership of `x` in the removed set.
    pub fn removed_contains(&self, x: &Rational) -> Result<bool> {
        let y = x.abs();
        let frac = &y - Rational::int(y.floor());
        if !frac.is_zero() && frac > Rational::one() - &self.block {
            return Ok(true);
        }
        let hits = self.elim.meeting(&y, &y)?;
        Ok(hits.iter().any(|iv| iv.interval().contains(&y)))
    }

    /// Is the open interval `(u, v)` contained in the removed set?
    pub fn removed_covers(&self, u: &Rational, v: &Rational) -> Result<bool> {
        if u >= v {
            return Err(Error::InvalidInterval(format!("({u}, {v}) is empty")));
        }
        let (u, v) = if !v.is_positive() { (-v, -u) } else { (u.clone(), v.clone()) };
        if u.is_negative() {
            // 0 is never removed
            return Ok(false);
        }
        let s = self.removed_positive(&u, &v)?;
        Ok(s.len() == 1 && s.measure()? == &v - &u)
    }

    pub fn construction(&self) -> Construction {
        let me = self.clone();
        let removed = LazyIntervalStream::new(
            move |d| {
                let lo = Rational::int(d);
                let pos = me.removed_positive(&lo, &(&lo + Rational::one()))?;
                Ok(pos.union(&pos.reflect()))
            },
            |_| Ok(TailBound::Unbounded),
        )
        .with_frontier(|d| Interval::open(Rational::int(-(d as i64) - 1), Rational::int(d as i64 + 1)).ok());
        Construction {
            kind: "bradford".into(),
            params: json!({ "epsilon": self.epsilon, "deltas": self.elim.schedule().deltas }),
            domain: Interval::everything(),
            removed,
        }
    }
}

pub fn bradford_set(epsilon: &Rational, deltas: DeltaSource) -> Result<(Construction, Bradford)> {
    let b = Bradford::new(epsilon, deltas)?;
    Ok((b.construction(), b))
}

/// A term of `b + kΔ` that lies in a removed interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApHit {
    pub k: u64,
    pub term: Rational,
    pub lo: Rational,
    pub hi: Rational,
}

/// Finds removed intervals met by progressions `b + kΔ`, `b >= 0`, within a
/// fixed horizon.
pub struct ApKillChecker {
    block: Rational,
    horizon: Rational,
    by_delta: HashMap<Rational, Vec<ElimInterval>>,
}

impl ApKillChecker {
    pub fn new(bradford: &Bradford, horizon: &Rational) -> Result<Self> {
        let mut by_delta: HashMap<Rational, Vec<ElimInterval>> = HashMap::new();
        for iv in bradford.elim.up_to(horizon)? {
            if iv.hi <= *horizon {
                by_delta.entry(iv.delta.clone()).or_default().push(iv);
            }
        }
        Ok(ApKillChecker { block: bradford.block.clone(), horizon: horizon.clone(), by_delta })
    }

    pub fn horizon(&self) -> &Rational {
        &self.horizon
    }

    pub fn first_hit(&self, delta: &Rational, b: &Rational) -> Option<ApHit> {
        self.block_hit(delta, b).or_else(|| self.elim_hit(delta, b))
    }

    /// The block pattern repeats after `denom(Δ)` steps, so scanning one period decides it.
    fn block_hit(&self, delta: &Rational, b: &Rational) -> Option<ApHit> {
        let period = delta.denom().try_into().unwrap_or(u64::MAX).min(1 << 16);
        let edge = Rational::one() - &self.block;
        for k in 0..period {
            let term = b + delta * Rational::int(k);
            if term >= self.horizon {
                return None;
            }
            let whole = Rational::int(term.floor());
            let frac = &term - &whole;
            if !frac.is_zero() && frac > edge {
                let hi = whole + Rational::one();
                return Some(ApHit { k, lo: &hi - &self.block, hi, term });
            }
        }
        None
    }

    fn elim_hit(&self, delta: &Rational, b: &Rational) -> Option<ApHit> {
        for iv in self.by_delta.get(delta)? {
            let k = if b > &iv.lo {
                0
            } else {
                ((&iv.lo - b).checked_div(delta).ok()?.floor() + 1u32).try_into().ok()?
            };
            let term = b + delta * Rational::int(k);
            if term < iv.hi {
                return Some(ApHit { k, term, lo: iv.lo.clone(), hi: iv.hi.clone() });
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::enumerate::RationalOrder;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn twenty() -> DeltaSource {
        DeltaSource::List(RationalOrder::SternBrocot.prefix(20))
    }

    #[test]
    fn window_at_zero() {
        let (c, _) = bradford_set(&q(1, 10), twenty()).unwrap();
        let w = c.kept_on(&Interval::closed(q(0, 1), q(1, 1)).unwrap(), 2).unwrap();
        assert!(w.measure().unwrap() >= q(9, 10));
    }

    #[test]
    fn symmetric() {
        let (c, b) = bradford_set(&q(1, 10), twenty()).unwrap();
        let (removed, _) = c.removed.take(30).unwrap();
        for i in 0..100 {
            let x = q(i * 37 % 290, 10);
            assert_eq!(removed.contains(&x), removed.contains(&-&x));
            assert_eq!(removed.contains(&x), b.removed_contains(&x).unwrap(), "x = {x}");
        }
    }

    #[test]
    fn half_step_progression_exits() {
        let (_, b) = bradford_set(&q(1, 10), twenty()).unwrap();
        let checker = ApKillChecker::new(&b, &q(100_000, 1)).unwrap();
        let hit = checker.first_hit(&q(1, 2), &q(1, 4)).expect("orbit should be killed");
        assert!(b.removed_contains(&hit.term).unwrap());
    }
}
