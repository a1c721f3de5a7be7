//! Symmetric Cantor sets: `E_{k+1}` removes an open interval of length `t_k`
//! from the middle of each of the `2^k` closed intervals of `E_k`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Construction;
use crate::error::{Error, Result};
use crate::sets::{Interval, IntervalSet, LazyIntervalStream, Rational, TailBound};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CantorSpec {
    /// `t_k = a^{k+1}`.
    MiddleA { a: Rational },
    /// Explicit removal lengths, with optional bounds for what lies past the list:
    /// `tail >= Σ_{k>=len} 2^k t_k` and `weighted_tail >= Σ_{k>=len} k 2^k t_k`.
    Generic {
        t: Vec<Rational>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<Rational>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weighted_tail: Option<Rational>,
    },
}

impl CantorSpec {
    /// Middle-`a` set; `a = 1/3` is accepted so that the boundary case can be analysed.
    pub fn middle_a(a: Rational) -> Result<Self> {
        if !a.is_positive() || a > Rational::frac(1, 3) {
            return Err(Error::param("a", format!("must lie in (0, 1/3], got {a}")));
        }
        Ok(CantorSpec::MiddleA { a })
    }

    pub fn generic(t: Vec<Rational>, tail: Option<Rational>, weighted_tail: Option<Rational>) -> Result<Self> {
        if let Some(bad) = t.iter().find(|x| !x.is_positive()) {
            return Err(Error::param("t", format!("removal lengths must be positive, got {bad}")));
        }
        for (name, v) in [("tail", &tail), ("weighted_tail", &weighted_tail)] {
            if v.as_ref().is_some_and(Rational::is_negative) {
                return Err(Error::param(name, "must be non-negative"));
            }
        }
        Ok(CantorSpec::Generic { t, tail, weighted_tail })
    }

    pub fn a(&self) -> Option<&Rational> {
        match self {
            CantorSpec::MiddleA { a } => Some(a),
            CantorSpec::Generic { .. } => None,
        }
    }

    pub fn t(&self, k: usize) -> Option<Rational> {
        match self {
            CantorSpec::MiddleA { a } => Some(a.pow(k as u32 + 1)),
            CantorSpec::Generic { t, .. } => t.get(k).cloned(),
        }
    }

    /// Number of known removal lengths, `None` when unlimited.
    pub fn known_len(&self) -> Option<usize> {
        match self {
            CantorSpec::MiddleA { .. } => None,
            CantorSpec::Generic { t, .. } => Some(t.len()),
        }
    }

    /// Upper bound for `Σ_{k>=d} 2^k t_k` (exact for middle-`a`).
    pub fn mass_tail(&self, d: usize) -> Option<Rational> {
        match self {
            CantorSpec::MiddleA { a } => {
                let x = a.mul_pow2(1);
                (a * &x.pow(d as u32)).checked_div(&(Rational::one() - &x)).ok()
            }
            CantorSpec::Generic { t, tail, .. } => {
                let listed: Rational = t.iter().enumerate().skip(d).map(|(k, tk)| tk.mul_pow2(k as i64)).sum();
                tail.as_ref().map(|r| listed + r)
            }
        }
    }

    /// Upper bound for `Σ_{k>=d} k 2^k t_k` (exact for middle-`a`).
    pub fn weighted_tail(&self, d: usize) -> Option<Rational> {
        match self {
            CantorSpec::MiddleA { a } => {
                let x = a.mul_pow2(1);
                let one = Rational::one();
                let dd = Rational::int(d as i64);
                let num = x.pow(d as u32) * (&dd - (&dd - &one) * &x);
                let den = (&one - &x).pow(2);
                num.checked_div(&den).ok().map(|s| a * &s)
            }
            CantorSpec::Generic { t, weighted_tail, .. } => {
                let listed: Rational = t
                    .iter()
                    .enumerate()
                    .skip(d)
                    .map(|(k, tk)| tk.mul_pow2(k as i64) * Rational::int(k as i64))
                    .sum();
                weighted_tail.as_ref().map(|r| listed + r)
            }
        }
    }

    /// `Σ_{j<k} 2^j t_j`; needs `t_0..t_{k-1}`.
    pub fn removed_through(&self, k: usize) -> Result<Rational> {
        (0..k).map(|j| Ok(self.need_t(j)?.mul_pow2(j as i64))).sum()
    }

    /// Common length of the `2^k` parts of `E_k`.
    pub fn part_length(&self, k: usize) -> Result<Rational> {
        Ok((Rational::one() - self.removed_through(k)?).mul_pow2(-(k as i64)))
    }

    fn need_t(&self, k: usize) -> Result<Rational> {
        self.t(k).ok_or_else(|| Error::Schedule(format!("removal length t_{k} is not specified")))
    }

    /// Checks `0 < t_k < L_k` for `k < depth`.
    pub fn validate(&self, depth: usize) -> Result<()> {
        let mut len = Rational::one();
        for k in 0..depth {
            let tk = self.need_t(k)?;
            if tk >= len {
                return Err(Error::Schedule(format!(
                    "removal length t_{k} = {tk} is not shorter than the parts of E_{k}, which have length {len}"
                )));
            }
            len = (&len - &tk).mul_pow2(-1);
        }
        Ok(())
    }

    /// Left endpoints and common length of the parts of `E_k`.
    pub fn level_parts(&self, k: usize) -> Result<(Vec<Rational>, Rational)> {
        self.validate(k)?;
        let mut lefts = vec![Rational::zero()];
        let mut len = Rational::one();
        for j in 0..k {
            let tj = self.need_t(j)?;
            let jump = (&len + &tj).mul_pow2(-1);
            lefts = lefts.into_iter().flat_map(|x| [x.clone(), x + &jump]).collect();
            len = (&len - &tj).mul_pow2(-1);
        }
        Ok((lefts, len))
    }

    /// `E_k` as a union of `2^k` closed intervals.
    pub fn level(&self, k: usize) -> Result<IntervalSet> {
        let (lefts, len) = self.level_parts(k)?;
        let parts = lefts.into_iter().map(|x| {
            let r = &x + &len;
            Interval::closed(x, r)
        });
        Ok(IntervalSet::normalize(parts.collect::<Result<_>>()?))
    }

    /// The `2^k` open gaps removed when passing from `E_k` to `E_{k+1}`.
    pub fn gaps(&self, k: usize) -> Result<IntervalSet> {
        self.validate(k + 1)?;
        let (lefts, len) = self.level_parts(k)?;
        let tk = self.need_t(k)?;
        let off = (&len - &tk).mul_pow2(-1);
        let parts = lefts.into_iter().map(|x| {
            let lo = x + &off;
            let hi = &lo + &tk;
            Interval::open(lo, hi)
        });
        Ok(IntervalSet::normalize(parts.collect::<Result<_>>()?))
    }
}

/// Levels `E_0 ⊇ ... ⊇ E_depth` and the removed stream whose batch `k` holds
/// the gaps opened at step `k`.
pub fn symmetric_cantor(spec: &CantorSpec, depth: usize) -> Result<(Vec<IntervalSet>, Construction)> {
    spec.validate(depth)?;
    let levels = (0..=depth).map(|k| spec.level(k)).collect::<Result<Vec<_>>>()?;
    Ok((levels, cantor_construction(spec)))
}

pub fn cantor_construction(spec: &CantorSpec) -> Construction {
    let s1 = spec.clone();
    let s2 = spec.clone();
    let removed = LazyIntervalStream::new(
        move |k| s1.gaps(k as usize),
        move |d| Ok(s2.mass_tail(d as usize + 1).map_or(TailBound::Unbounded, TailBound::Finite)),
    );
    Construction {
        kind: "cantor".into(),
        params: json!(spec),
        domain: Interval::closed(Rational::zero(), Rational::one()).expect("unit interval"),
        removed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn middle_quarter_first_level() {
        let spec = CantorSpec::middle_a(q(1, 4)).unwrap();
        let (levels, _) = symmetric_cantor(&spec, 1).unwrap();
        let expect = IntervalSet::from_tuples([(q(0, 1), q(3, 8), true, true), (q(5, 8), q(1, 1), true, true)]).unwrap();
        assert_eq!(levels[1], expect);
    }

    #[test]
    fn classic_measures_and_counts() {
        let spec = CantorSpec::middle_a(q(1, 3)).unwrap();
        let (levels, c) = symmetric_cantor(&spec, 6).unwrap();
        for (k, e) in levels.iter().enumerate() {
            assert_eq!(e.len(), 1 << k);
            assert_eq!(e.measure().unwrap(), q(2, 3).pow(k as u32));
        }
        let (removed, tail) = c.removed.take(5).unwrap();
        assert_eq!(removed.len(), 63);
        assert_eq!(removed.measure().unwrap() + tail.finite().unwrap(), q(1, 1));
    }

    #[test]
    fn closed_forms_match_partial_sums() {
        let spec = CantorSpec::middle_a(q(1, 4)).unwrap();
        assert_eq!(spec.mass_tail(0).unwrap(), q(1, 2));
        assert_eq!(spec.weighted_tail(0).unwrap(), q(1, 2));
        let partial: Rational = (0..30).map(|k| spec.t(k).unwrap().mul_pow2(k as i64) * Rational::int(k as i64)).sum();
        assert_eq!(partial + spec.weighted_tail(30).unwrap(), q(1, 2));
    }

    #[test]
    fn schedule_violation() {
        let spec = CantorSpec::generic(vec![q(1, 2), q(1, 4)], None, None).unwrap();
        assert!(matches!(spec.validate(2), Err(Error::Schedule(_))));
        assert!(CantorSpec::middle_a(q(1, 2)).is_err());
    }
}
