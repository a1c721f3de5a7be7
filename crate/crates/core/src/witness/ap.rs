//! Progressions with a given difference that avoid a set of finite measure.
//!
//! After scaling the difference to 1, the avoided set is cut into unit
//! pieces `B_n = A ∩ (n, n+1] - n` folded onto `(0, 1]`. Once
//! `λ(∪_{n>=N} B_n)` plus the tail bound drops below 1, a positive-measure
//! set of offsets `x` gives progressions `x+N, x+N+1, ...` missing `A`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{Interval, IntervalSet, LazyIntervalStream, Rational, TailBound, TailKind};

/// Outcome of the folding search on a set already scaled to unit difference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    /// Smallest `N` with `λ(U_N) + τ < 1`.
    pub offset: u64,
    /// Midpoint of the largest component of `(0, 1) \ U_N` (leftmost on ties).
    pub x: Rational,
    pub gap: (Rational, Rational),
    /// `λ(U_N)`.
    pub covered: Rational,
    /// `λ(B_n)` for each non-empty piece.
    pub ledger: Vec<(u64, Rational)>,
}

/// Folds closed parts `[α, β]` of `A ∩ [0, ∞)` (unit difference) and picks the offset.
pub fn fold_search(parts: &[(Rational, Rational)], tau: &Rational) -> Result<Fold> {
    let one = Rational::one();
    if tau >= &one {
        return Err(Error::InsufficientDepth(format!("tail bound {tau} leaves no room: need tail < 1 after scaling")));
    }
    let pieces: Vec<Vec<(u64, Interval)>> = parts
        .par_iter()
        .map(|(a, b)| fold_part(a, b))
        .collect::<Result<_>>()?;
    let mut buckets: BTreeMap<u64, Vec<Interval>> = BTreeMap::new();
    for (n, i) in pieces.into_iter().flatten() {
        buckets.entry(n).or_default().push(i);
    }
    let buckets: Vec<(u64, IntervalSet)> = buckets.into_iter().map(|(n, v)| (n, IntervalSet::normalize(v))).collect();
    let ledger = buckets.iter().map(|(n, s)| Ok((*n, s.measure()?))).collect::<Result<Vec<_>>>()?;

    // U_N only grows as N decreases, so walk down until the test fails.
    let mut offset = 0;
    let mut covered = IntervalSet::empty();
    let mut covered_measure = Rational::zero();
    for (n, b) in buckets.iter().rev() {
        let u = covered.union(b);
        let m = u.measure()?;
        if &m + tau >= one {
            offset = n + 1;
            break;
        }
        covered = u;
        covered_measure = m;
    }

    let free = IntervalSet::from_interval(Interval::open(Rational::zero(), one.clone())?).difference(&covered);
    let mut best: Option<(Rational, &Interval)> = None;
    for p in free.parts() {
        let len = p.length()?;
        if best.as_ref().is_none_or(|(l, _)| &len > l) {
            best = Some((len, p));
        }
    }
    let (_, gap) = best.ok_or_else(|| Error::InsufficientDepth("no surviving offsets".into()))?;
    let (g_lo, g_hi) = gap.bounds().ok_or(Error::InfiniteMeasure)?;
    Ok(Fold {
        offset,
        x: g_lo.midpoint(g_hi),
        gap: (g_lo.clone(), g_hi.clone()),
        covered: covered_measure,
        ledger,
    })
}

fn fold_part(a: &Rational, b: &Rational) -> Result<Vec<(u64, Interval)>> {
    let a = a.clone().max(Rational::zero());
    if &a > b {
        return Ok(Vec::new());
    }
    let to_u64 = |r: num_bigint::BigInt| -> Result<u64> {
        u64::try_from(r).map_err(|_| Error::param("avoid", "set extends too far to fold"))
    };
    let first = to_u64(a.floor())?;
    let last = to_u64(b.ceil())?.max(first + 1);
    if last - first > 1 << 20 {
        return Err(Error::param("avoid", format!("part [{a}, {b}] spans more than 2^20 unit windows")));
    }
    let mut out = Vec::new();
    for n in first..last {
        let nn = Rational::int(n as i64);
        let lo = a.clone().max(nn.clone());
        let hi = b.clone().min(&nn + &Rational::one());
        if lo <= hi {
            out.push((n, Interval::closed(lo - &nn, hi - &nn)?));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Outside the avoided set.
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApTerm {
    pub n: u64,
    pub verdict: Side,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApWitness {
    pub kind: String,
    pub b: Rational,
    pub delta: Rational,
    pub offset: u64,
    pub x: Rational,
    /// Terms `b + nΔ` for `n <= certified_depth` are checked against `avoid`.
    pub certified_depth: u64,
    /// `Δ(1 - λ(U_N)) - tail`: measure of offsets that survive every hole, materialized or not.
    pub existence_margin: Rational,
    pub depth: i64,
    pub tail: Rational,
    pub avoid: IntervalSet,
    pub terms: Vec<ApTerm>,
}

fn closed_parts(s: &IntervalSet) -> Result<Vec<(Rational, Rational)>> {
    s.parts()
        .iter()
        .filter(|p| p.hi().cmp_rational(&Rational::zero()) == std::cmp::Ordering::Greater)
        .map(|p| p.bounds().map(|(a, b)| (a.clone(), b.clone())).ok_or(Error::InfiniteMeasure))
        .collect()
}

fn scaled_parts(avoid: &IntervalSet, delta: &Rational) -> Result<Vec<(Rational, Rational)>> {
    let inv = delta.recip()?;
    Ok(closed_parts(avoid)?.into_iter().map(|(a, b)| (a * &inv, b * &inv)).collect())
}

fn ap_witness(avoid: IntervalSet, tail: Rational, delta: &Rational, depth: i64, terms: u64) -> Result<ApWitness> {
    let fold = fold_search(&scaled_parts(&avoid, delta)?, &tail.checked_div(delta)?)?;
    let start = &fold.x + &Rational::int(fold.offset as i64);
    let b = delta * &start;
    let mut list = Vec::with_capacity(terms as usize);
    for n in 0..terms {
        let t = &b + &(delta * &Rational::int(n as i64));
        if avoid.contains(&t) {
            return Err(Error::Certificate(format!("term {n} = {t} lies in the avoided set")));
        }
        list.push(ApTerm { n, verdict: Side::Out });
    }
    Ok(ApWitness {
        kind: "ap".into(),
        existence_margin: delta * &(Rational::one() - &fold.covered) - &tail,
        b,
        delta: delta.clone(),
        offset: fold.offset,
        x: fold.x,
        certified_depth: terms - 1,
        depth,
        tail,
        avoid,
        terms: list,
    })
}

/// Finds `b` with `b + nΔ` outside `avoid` for `n < terms`, and certifies
/// that some progression with difference `Δ` misses all of `avoid`.
pub fn find_ap(avoid: &LazyIntervalStream, delta: &Rational, depth: i64, terms: u64) -> Result<ApWitness> {
    if !delta.is_positive() {
        return Err(Error::param("delta", format!("difference must be positive, got {delta}")));
    }
    if terms == 0 {
        return Err(Error::param("terms", "need at least one term"));
    }
    if avoid.kind() != TailKind::Length {
        return Err(Error::param("avoid", "tail bound must measure length"));
    }
    let (set, tail) = avoid.take(depth)?;
    let TailBound::Finite(tail) = tail else {
        return Err(Error::param("avoid", "stream has no finite tail bound"));
    };
    ap_witness(set, tail, delta, depth, terms)
}

/// Checks a stored witness by recomputing the fold and every term.
pub fn replay_ap(w: &ApWitness) -> Result<()> {
    let bad = |m: String| Err(Error::Certificate(m));
    if w.kind != "ap" {
        return bad(format!("expected kind `ap`, got `{}`", w.kind));
    }
    if !w.delta.is_positive() || w.tail.is_negative() {
        return bad("difference must be positive and tail non-negative".into());
    }
    if w.terms.len() as u64 != w.certified_depth + 1 || w.terms.iter().enumerate().any(|(i, t)| t.n != i as u64) {
        return bad("term list does not match certified depth".into());
    }
    let fresh = ap_witness(w.avoid.clone(), w.tail.clone(), &w.delta, w.depth, w.certified_depth + 1)
        .map_err(|e| Error::Certificate(format!("recomputation failed: {e}")))?;
    if &fresh != w {
        return bad("stored witness differs from recomputation".into());
    }
    if !w.existence_margin.is_positive() {
        return bad("existence margin is not positive".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn empty_avoid() {
        let w = find_ap(&LazyIntervalStream::empty(), &q(1, 1), 0, 5).unwrap();
        assert_eq!((w.offset, w.b.clone(), w.existence_margin.clone()), (0, q(1, 2), q(1, 1)));
        replay_ap(&w).unwrap();
    }

    #[test]
    fn single_interval() {
        let s = IntervalSet::from_tuples([(q(5, 2), q(11, 4), false, false)]).unwrap();
        let w = find_ap(&LazyIntervalStream::finite(vec![s.clone()]), &q(1, 1), 0, 20).unwrap();
        assert_eq!((w.offset, w.x.clone()), (0, q(1, 4)));
        for n in 0..20 {
            assert!(!s.contains(&(&w.b + &Rational::int(n))));
        }
        replay_ap(&w).unwrap();
        let mut t = w.clone();
        t.b = q(21, 8);
        assert!(matches!(replay_ap(&t), Err(Error::Certificate(_))));
    }

    #[test]
    fn heavy_tail_fails() {
        let s = LazyIntervalStream::new(|_| Ok(IntervalSet::empty()), |_| Ok(TailBound::Finite(Rational::int(2))));
        assert!(matches!(find_ap(&s, &q(1, 1), 3, 4), Err(Error::InsufficientDepth(_))));
    }

    #[test]
    fn offset_skips_dense_start() {
        // (0, 3) blocks every offset below 3.
        let s = IntervalSet::from_tuples([(q(0, 1), q(3, 1), false, false), (q(7, 2), q(15, 4), true, true)]).unwrap();
        let w = find_ap(&LazyIntervalStream::finite(vec![s]), &q(1, 1), 0, 10).unwrap();
        assert_eq!(w.offset, 3);
        assert_eq!(w.x, q(1, 4));
    }

    #[test]
    fn ledger_matches_brute_force() {
        let parts = vec![(q(1, 3), q(5, 2)), (q(9, 4), q(13, 4)), (q(7, 1), q(7, 1))];
        let f = fold_search(&parts, &q(0, 1)).unwrap();
        let mut brute = IntervalSet::empty();
        for (a, b) in &parts {
            for n in 0..8 {
                let w = Interval::closed(Rational::int(n), Rational::int(n + 1)).unwrap();
                let piece = IntervalSet::from_interval(Interval::closed(a.clone(), b.clone()).unwrap()).clip(&w);
                if n as u64 >= f.offset {
                    brute = brute.union(&piece.affine_map(&q(1, 1), &Rational::int(-n)).unwrap());
                }
            }
        }
        assert_eq!(brute.measure().unwrap(), f.covered);
    }
}
