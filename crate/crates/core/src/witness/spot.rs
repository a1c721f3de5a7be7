//! Finite-horizon scans of a progression against a kept set. A scan can
//! find an exit; it never establishes infinite containment.

use serde::{Deserialize, Serialize};

use super::membership::Membership;
use crate::constructions::Construction;
use crate::error::{Error, Result};
use crate::sets::{Interval, Rational};
use crate::transforms::EnclosedSet;
use crate::verdict::Label;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Family {
    Ap { b: Rational, delta: Rational },
    Gp { a: Rational, q: Rational },
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        match self {
            Family::Ap { delta, .. } if delta.is_zero() => Err(Error::param("delta", "progression must be non-constant")),
            Family::Gp { a, .. } if a.is_zero() => Err(Error::param("a", "progression must be non-constant")),
            Family::Gp { q, .. } if q.is_zero() || q == &Rational::one() => {
                Err(Error::param("q", "progression must be non-constant"))
            }
            _ => Ok(()),
        }
    }

    pub fn terms(&self, horizon: u64) -> Vec<Rational> {
        match self {
            Family::Ap { b, delta } => (0..horizon).map(|n| b + &(delta * &Rational::int(n as i64))).collect(),
            Family::Gp { a, q } => {
                let mut t = a.clone();
                (0..horizon)
                    .map(|_| {
                        let cur = t.clone();
                        t = &t * q;
                        cur
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpotReport {
    pub horizon: u64,
    /// Smallest `n` whose term is certainly outside the kept set.
    pub first_exit: Option<u64>,
    /// Terms before the first exit whose membership could not be decided.
    pub unknown: Vec<u64>,
    pub label: Label,
}

fn scan(horizon: u64, verdicts: impl Iterator<Item = Membership>) -> SpotReport {
    let mut unknown = Vec::new();
    let mut first_exit = None;
    for (n, v) in verdicts.enumerate() {
        match v {
            Membership::Out => {
                first_exit = Some(n as u64);
                break;
            }
            Membership::Unknown => unknown.push(n as u64),
            Membership::In => {}
        }
    }
    let label = if first_exit.is_some() { Label::ProvedExact } else { Label::EvidenceOnly };
    SpotReport { horizon, first_exit, unknown, label }
}

/// Scans the first `horizon` terms against `domain \ removed`. Uses the
/// least depth up to `max_depth` whose frontier covers the terms; without
/// one, terms missing the materialized holes are reported as unknown.
pub fn spot_check_avoidance(kept: &Construction, family: &Family, horizon: u64, max_depth: u64) -> Result<SpotReport> {
    family.validate()?;
    let terms = family.terms(horizon);
    let (Some(lo), Some(hi)) = (terms.iter().min(), terms.iter().max()) else {
        return Ok(scan(0, std::iter::empty()));
    };
    let region = Interval::closed(lo.clone(), hi.clone())?;
    let (depth, complete) = match kept.depth_covering(&region, max_depth) {
        Ok(d) => (d, true),
        Err(Error::HorizonShortfall(_)) => (max_depth, false),
        Err(e) => return Err(e),
    };
    let (removed, _) = kept.removed.take(depth as i64)?;
    let verdicts = terms.iter().map(|t| {
        if !kept.domain_contains(t) || removed.contains(t) {
            Membership::Out
        } else if complete {
            Membership::In
        } else {
            Membership::Unknown
        }
    });
    Ok(scan(horizon, verdicts))
}

/// Scans against an enclosed kept set: inside `inner` is in, outside `outer` is out.
pub fn spot_check_enclosed(kept: &EnclosedSet, family: &Family, horizon: u64) -> Result<SpotReport> {
    family.validate()?;
    let terms = family.terms(horizon);
    let verdicts = terms.iter().map(|t| {
        if kept.inner.contains(t) {
            Membership::In
        } else if !kept.outer.contains(t) {
            Membership::Out
        } else {
            Membership::Unknown
        }
    });
    Ok(scan(horizon, verdicts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::equidistribute_set;
    use crate::sets::{IntervalSet, LazyIntervalStream};

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn exits_and_stays() {
        let c = equidistribute_set(&q(1, 4)).unwrap();
        let r = spot_check_avoidance(&c, &Family::Ap { b: q(7, 8), delta: q(1, 1) }, 10, 64).unwrap();
        assert_eq!(r.first_exit, Some(0));
        let full = Construction {
            kind: "line".into(),
            params: serde_json::Value::Null,
            domain: Interval::everything(),
            removed: LazyIntervalStream::empty(),
        };
        let r = spot_check_avoidance(&full, &Family::Gp { a: q(3, 1), q: q(2, 3) }, 50, 0).unwrap();
        assert_eq!((r.first_exit, r.unknown.len()), (None, 0));
        let e = EnclosedSet::exact(IntervalSet::everything());
        assert!(spot_check_enclosed(&e, &Family::Ap { b: q(0, 1), delta: q(0, 1) }, 3).is_err());
    }
}
