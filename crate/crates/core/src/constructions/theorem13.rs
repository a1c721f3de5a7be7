//! A closed `F ⊂ [0, ∞)` with unit-window measure tending to 1 that avoids
//! every infinite arithmetic progression: `F = [0, ∞) \ G` where
//! `G = ∪_k G_k ∩ (α_{m_k}/k - k, h_k)` glues the removed sets `G_k` of
//! progression-killing sets at parameter `ε_k`.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::bradford::Bradford;
use super::elim::DeltaSource;
use super::enumerate::RationalOrder;
use super::glue::{glue_cover_search, GlueCertificate, GlueOptions, GlueRegion};
use super::sequence::SequenceSpec;
use super::Construction;
use crate::error::{Error, Result};
use crate::sets::{Endpoint, Interval, IntervalSet, LazyIntervalStream, Rational, TailBound};

/// `ε_k = 1/k`, except `ε_1 = 1/2` since the level sets need `ε < 1`.
pub fn level_epsilon(k: u64) -> Rational {
    if k == 1 {
        Rational::frac(1, 2)
    } else {
        Rational::frac(1, k as i64)
    }
}

/// Least `m >= 1` with `α_m/k - k > h + 1`; `m_1 = 0`.
pub fn next_index(alpha: &SequenceSpec, k: u64, prev_h: Option<&Rational>) -> Result<u64> {
    let Some(h) = prev_h else { return Ok(0) };
    let kk = Rational::int(k);
    let target = h + &Rational::one() + &kk;
    let ok = |m: u64| -> Result<bool> { Ok(alpha.term(m)?.checked_div(&kk)? > target) };
    let mut hi = 1u64;
    while !ok(hi)? {
        hi = hi.checked_mul(2).ok_or_else(|| Error::Schedule("sequence never exceeds the next window start".into()))?;
    }
    let mut lo = hi / 2;
    // ok(lo) is false (or lo = 0), ok(hi) is true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `α_m/k - k`, with `-k` for `m = 0`.
pub fn window_start(alpha: &SequenceSpec, k: u64, m: u64) -> Result<Rational> {
    let kk = Rational::int(k);
    if m == 0 {
        return Ok(-kk);
    }
    Ok(alpha.term(m)?.checked_div(&kk)? - kk)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem13Window {
    pub k: u64,
    pub epsilon: Rational,
    pub m: u64,
    pub lo: Rational,
    pub h: Rational,
}

#[derive(Clone)]
pub struct Theorem13 {
    pub alpha: SequenceSpec,
    pub certificates: Vec<GlueCertificate>,
    pub windows: Vec<Theorem13Window>,
    bradfords: Vec<Bradford>,
    cache: Arc<Vec<OnceLock<IntervalSet>>>,
}

impl Theorem13 {
    /// Runs the glue search for `k = 1..=depth`.
    pub fn build(depth: usize, alpha: &SequenceSpec, opts: &GlueOptions) -> Result<Self> {
        if depth == 0 {
            return Err(Error::param("depth", "need at least one level"));
        }
        let mut certs = Vec::with_capacity(depth);
        for k in 1..=depth as u64 {
            let m = next_index(alpha, k, certs.last().map(|c: &GlueCertificate| &c.h))?;
            let b = Bradford::new(&level_epsilon(k), DeltaSource::Enumeration(RationalOrder::SternBrocot))?;
            certs.push(glue_cover_search(&b, alpha, k, m, opts)?);
        }
        Self::assemble(certs)
    }

    /// Rebuilds from stored certificates, replaying each one.
    pub fn from_certificates(certs: Vec<GlueCertificate>) -> Result<Self> {
        for c in &certs {
            c.replay()?;
        }
        Self::assemble(certs)
    }

    fn assemble(certs: Vec<GlueCertificate>) -> Result<Self> {
        let Some(first) = certs.first() else {
            return Err(Error::param("certificates", "need at least one level"));
        };
        let alpha = first.alpha.clone();
        let mut windows: Vec<Theorem13Window> = Vec::new();
        let mut bradfords = Vec::new();
        for (i, c) in certs.iter().enumerate() {
            let k = i as u64 + 1;
            let bad = |what: &str| Err(Error::Certificate(format!("level {k}: {what}")));
            if c.k != k || c.region != GlueRegion::square(k) {
                return bad("wrong level or region");
            }
            if c.alpha != alpha {
                return bad("sequence differs from level 1");
            }
            if c.epsilon != level_epsilon(k) {
                return bad("unexpected epsilon");
            }
            if c.m != next_index(&alpha, k, windows.last().map(|w| &w.h))? {
                return bad("m is not the least admissible index");
            }
            let lo = window_start(&alpha, k, c.m)?;
            if let Some(prev) = windows.last() {
                if lo <= &prev.h + &Rational::one() {
                    return bad("window overlaps the previous one");
                }
            }
            windows.push(Theorem13Window { k, epsilon: c.epsilon.clone(), m: c.m, lo, h: c.h.clone() });
            bradfords.push(Bradford::new(&c.epsilon, c.deltas.clone())?);
        }
        let cache = Arc::new((0..certs.len()).map(|_| OnceLock::new()).collect());
        Ok(Theorem13 { alpha, certificates: certs, windows, bradfords, cache })
    }

    pub fn depth(&self) -> usize {
        self.windows.len()
    }

    /// Start of the first window not yet built.
    pub fn next_window_start(&self) -> Result<Rational> {
        let k = self.depth() as u64 + 1;
        let m = next_index(&self.alpha, k, self.windows.last().map(|w| &w.h))?;
        window_start(&self.alpha, k, m)
    }

    /// `G_k ∩ (lo_k, h_k) ∩ [0, ∞)` for `k` from 1.
    pub fn window_removed(&self, k: usize) -> Result<IntervalSet> {
        let i = k.checked_sub(1).filter(|&i| i < self.depth()).ok_or_else(|| {
            Error::InsufficientDepth(format!("window {k} is beyond depth {}", self.depth()))
        })?;
        if let Some(s) = self.cache[i].get() {
            return Ok(s.clone());
        }
        let w = &self.windows[i];
        let start = w.lo.clone().max(Rational::zero());
        let set = self.bradfords[i]
            .removed_positive(&start, &w.h)?
            .clip(&Interval::open(w.lo.clone(), w.h.clone())?);
        Ok(self.cache[i].get_or_init(|| set).clone())
    }

    /// `G` restricted to the built windows.
    pub fn removed(&self) -> Result<IntervalSet> {
        let mut g = IntervalSet::empty();
        for k in 1..=self.depth() {
            g = g.union(&self.window_removed(k)?);
        }
        Ok(g)
    }

    /// Everything below this point is final.
    pub fn complete_below(&self) -> Result<Rational> {
        self.next_window_start()
    }

    pub fn construction(&self) -> Construction {
        let me = self.clone();
        let me2 = self.clone();
        let removed = LazyIntervalStream::new(move |b| me.window_removed(b as usize + 1), |_| Ok(TailBound::Unbounded))
            .with_frontier(move |b| {
                let b = b as usize;
                let end = if b + 1 < me2.depth() {
                    me2.windows[b + 1].lo.clone()
                } else if b + 1 == me2.depth() {
                    me2.next_window_start().ok()?
                } else {
                    return None;
                };
                Interval::new(Endpoint::NegInf, end.into(), false, true).ok()
            });
        Construction {
            kind: "theorem13".into(),
            params: json!({ "depth": self.depth(), "alpha": self.alpha, "windows": self.windows }),
            domain: Interval::closed_ray(Rational::zero()),
            removed,
        }
    }
}

pub fn theorem13_set(depth: usize, opts: &GlueOptions) -> Result<(Construction, Theorem13)> {
    let t = Theorem13::build(depth, &SequenceSpec::identity(), opts)?;
    Ok((t.construction(), t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_one() {
        let (c, t) = theorem13_set(1, &GlueOptions::default()).unwrap();
        assert_eq!(t.windows[0].m, 0);
        let g1 = t.window_removed(1).unwrap();
        let (removed, _) = c.removed.take(0).unwrap();
        assert_eq!(removed, g1);
        let edge = t.next_window_start().unwrap();
        assert!(edge > &t.windows[0].h + &Rational::one());
        let kept = c.kept_on(&Interval::closed(Rational::zero(), edge.clone()).unwrap(), 0).unwrap();
        assert_eq!(kept.measure().unwrap() + g1.measure().unwrap(), edge);
    }

    #[test]
    fn next_index_is_minimal() {
        let id = SequenceSpec::identity();
        let h = Rational::frac(8225, 48);
        let m = next_index(&id, 2, Some(&h)).unwrap();
        assert!(window_start(&id, 2, m).unwrap() > &h + &Rational::one());
        assert!(window_start(&id, 2, m - 1).unwrap() <= &h + &Rational::one());
    }
}
