//! Series criteria: the root-weighted series for density points, the two
//! log-length sums of a removed family, and the Cantor schedule test.

use serde::Serialize;

use crate::constructions::{CantorSpec, Construction};
use crate::error::{Error, Result};
use crate::sets::directed::{log, root};
use crate::sets::{Bracket, Interval, IntervalSet, Rational, TailBound, Truth};
use crate::verdict::Label;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesRow {
    pub n: u32,
    pub term: Bracket,
    pub cumsum: Bracket,
}

/// `∫_{S ∩ [0, r0^n]} (1/n) x^{1/n - 1} dx = Σ v^{1/n} - u^{1/n}` over the parts of `S`.
pub fn prop31_term(complement: &IntervalSet, r0: &Rational, n: u32, bits: u32) -> Result<Bracket> {
    if n == 0 {
        return Err(Error::param("n", "terms start at 1"));
    }
    let window = Interval::closed(Rational::zero(), r0.pow(n))?;
    let mut acc = Bracket::exact(Rational::zero());
    for p in complement.clip(&window).parts() {
        let (u, v) = p.bounds().ok_or(Error::InfiniteMeasure)?;
        acc = acc.add(&root(v, n, bits)?.sub(&root(u, n, bits)?));
    }
    // Each term is a measure of a non-negative density, so clamp the rounding.
    if acc.lo.is_negative() {
        acc.lo = Rational::zero();
    }
    Ok(acc)
}

/// Terms `1..=n_max` and their partial sums.
pub fn prop31_series(complement: &IntervalSet, r0: &Rational, n_max: u32, bits: u32) -> Result<Vec<SeriesRow>> {
    if !r0.is_positive() || r0 > &Rational::one() {
        return Err(Error::param("r0", format!("must lie in (0, 1], got {r0}")));
    }
    let mut cum = Bracket::exact(Rational::zero());
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let term = prop31_term(complement, r0, n, bits)?;
        cum = cum.add(&term);
        rows.push(SeriesRow { n, term, cumsum: cum.clone() });
    }
    Ok(rows)
}

/// Same series with the complement read from a construction's removed stream on `[0, r0]`.
pub fn prop31_series_stream(c: &Construction, depth: i64, r0: &Rational, n_max: u32, bits: u32) -> Result<Vec<SeriesRow>> {
    let region = Interval::closed(Rational::zero(), r0.clone())?;
    let (g, _) = c.removed.take_covering(depth, &region)?;
    prop31_series(&g, r0, n_max, bits)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma42Row {
    pub u: Rational,
    pub v: Rational,
    pub ratio: Rational,
    pub log: Bracket,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma42Report {
    pub count: usize,
    /// `Σ (v - u)/v`, exact.
    pub sum_ratio: Rational,
    /// `Σ log v - log u`.
    pub sum_log: Bracket,
    /// Every part with `v <= 2u` satisfies `log v - log u <= 2(v - u)/v`.
    pub stepping_stone: Truth,
    pub first_violation: Option<(Rational, Rational)>,
    /// Measure bound on everything past the materialized depth, when the stream has one.
    pub tail_measure: Option<Rational>,
    pub label: Label,
    pub rows: Vec<Lemma42Row>,
}

/// Both sums over the parts of `removed`, which must stay away from 0.
pub fn lemma42_conditions(removed: &IntervalSet, bits: u32) -> Result<Lemma42Report> {
    let mut sum_ratio = Rational::zero();
    let mut sum_log = Bracket::exact(Rational::zero());
    let mut stepping_stone = Truth::Yes;
    let mut first_violation = None;
    let mut rows = Vec::with_capacity(removed.len());
    for p in removed.parts() {
        let (u, v) = p.bounds().ok_or(Error::InfiniteMeasure)?;
        if !u.is_positive() {
            return Err(Error::Domain(format!("interval ({u}, {v}) touches 0")));
        }
        if u == v {
            continue;
        }
        let ratio = (v - u).checked_div(v)?;
        let gap = log(v, bits)?.sub(&log(u, bits)?);
        if v <= &u.mul_pow2(1) {
            let t = gap.le(&ratio.mul_pow2(1));
            if t == Truth::No && first_violation.is_none() {
                first_violation = Some((u.clone(), v.clone()));
            }
            stepping_stone = stepping_stone.and(t);
        }
        sum_ratio = sum_ratio + &ratio;
        sum_log = sum_log.add(&gap);
        rows.push(Lemma42Row { u: u.clone(), v: v.clone(), ratio, log: gap });
    }
    Ok(Lemma42Report {
        count: removed.len(),
        sum_ratio,
        sum_log,
        stepping_stone,
        first_violation,
        tail_measure: None,
        label: Label::EvidenceOnly,
        rows,
    })
}

/// The conditions on batches `0..=depth` of a removed stream.
pub fn lemma42_stream(c: &Construction, depth: i64, bits: u32) -> Result<Lemma42Report> {
    let (g, tail) = c.removed.take(depth)?;
    let mut r = lemma42_conditions(&g, bits)?;
    r.tail_measure = match tail {
        TailBound::Finite(t) => Some(t),
        TailBound::Unbounded => None,
    };
    Ok(r)
}

/// `Σ_{k<depth} (2^k t_k / m) Σ_{j=1}^{2^k} 1/(j - 1/2)`: the bound on
/// `Σ (v-u)/v` over the first `depth` Cantor levels, given that `m` bounds
/// the measure of `E` from below.
pub fn cantor_ratio_bound(spec: &CantorSpec, depth: usize, m: &Rational) -> Result<Rational> {
    if !m.is_positive() {
        return Err(Error::param("m", "must be positive"));
    }
    let half = Rational::frac(1, 2);
    let mut harmonic = Rational::zero();
    let mut filled = 0u64;
    let mut total = Rational::zero();
    for k in 0..depth {
        let tk = spec.t(k).ok_or_else(|| Error::Schedule(format!("removal length t_{k} is not specified")))?;
        let count = 1u64 << k;
        while filled < count {
            filled += 1;
            harmonic = harmonic + (Rational::int(filled as i64) - &half).recip()?;
        }
        total = total + tk.mul_pow2(k as i64).checked_div(m)? * &harmonic;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Cor44Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Cor44Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Cor44Verdict::Pass => "PASS",
            Cor44Verdict::Fail => "FAIL",
            Cor44Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cor44Report {
    /// `Σ 2^k t_k` (exact for middle-`a`, an upper bound otherwise).
    pub mass: Option<Rational>,
    /// `Σ k 2^k t_k`.
    pub weighted: Option<Rational>,
    /// Listed terms only, for generic schedules.
    pub mass_partial: Rational,
    pub weighted_partial: Rational,
    pub mass_below_one: Truth,
    pub weighted_finite: Truth,
    pub verdict: Cor44Verdict,
    pub label: Label,
}

/// Tests `Σ 2^k t_k < 1` and `Σ k 2^k t_k < ∞`.
pub fn cor44_check(spec: &CantorSpec) -> Result<Cor44Report> {
    let one = Rational::one();
    let (mass_partial, weighted_partial) = match spec {
        CantorSpec::MiddleA { .. } => (Rational::zero(), Rational::zero()),
        CantorSpec::Generic { t, .. } => {
            let m: Rational = t.iter().enumerate().map(|(k, tk)| tk.mul_pow2(k as i64)).sum();
            let w: Rational = t.iter().enumerate().map(|(k, tk)| tk.mul_pow2(k as i64) * Rational::int(k as i64)).sum();
            (m, w)
        }
    };
    let exact = matches!(spec, CantorSpec::MiddleA { .. });
    if exact && spec.a().is_some_and(|a| a >= &Rational::frac(1, 2)) {
        return Err(Error::param("a", "geometric sums diverge"));
    }
    let mass = spec.mass_tail(0);
    let weighted = spec.weighted_tail(0);
    let mass_below_one = match &mass {
        Some(s) if s < &one => Truth::Yes,
        // An upper bound that reaches 1 only decides the question when it is exact.
        Some(_) if exact => Truth::No,
        _ if mass_partial >= one => Truth::No,
        _ => Truth::Unknown,
    };
    let weighted_finite = if weighted.is_some() { Truth::Yes } else { Truth::Unknown };
    let verdict = match mass_below_one.and(weighted_finite) {
        Truth::Yes => Cor44Verdict::Pass,
        _ if mass_below_one == Truth::No => Cor44Verdict::Fail,
        _ => Cor44Verdict::Inconclusive,
    };
    let label = match (exact, verdict) {
        (true, _) => Label::ProvedExact,
        (false, Cor44Verdict::Pass) => Label::CertifiedWithTail,
        (false, Cor44Verdict::Fail) => Label::ProvedExact,
        (false, Cor44Verdict::Inconclusive) => Label::EvidenceOnly,
    };
    Ok(Cor44Report { mass, weighted, mass_partial, weighted_partial, mass_below_one, weighted_finite, verdict, label })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::cantor::cantor_construction;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn series_closed_forms() {
        let s = IntervalSet::from_tuples([(q(1, 4), q(1, 1), false, false)]).unwrap();
        let rows = prop31_series(&s, &q(1, 1), 2, 128).unwrap();
        assert!(rows[1].term.contains(&q(1, 2)));
        assert!(rows[0].term.contains(&q(3, 4)));
        let r0 = q(1, 2);
        let full = IntervalSet::from_tuples([(q(0, 1), q(1, 1), false, false)]).unwrap();
        for row in prop31_series(&full, &r0, 6, 128).unwrap() {
            assert!(row.term.contains(&r0), "{row:?}");
        }
        let none = prop31_series(&IntervalSet::empty(), &r0, 3, 64).unwrap();
        assert!(none.iter().all(|r| r.cumsum == Bracket::exact(q(0, 1))));
    }

    #[test]
    fn log_sums() {
        let s = IntervalSet::from_tuples([(q(1, 2), q(1, 1), false, false)]).unwrap();
        let r = lemma42_conditions(&s, 128).unwrap();
        assert_eq!(r.sum_ratio, q(1, 2));
        assert!(r.sum_log.lo < q(6932, 10000) && r.sum_log.hi > q(6931, 10000));
        assert_eq!(r.stepping_stone, Truth::Yes);
        let r = lemma42_conditions(&IntervalSet::empty(), 64).unwrap();
        assert!(r.sum_ratio.is_zero() && r.sum_log.hi.is_zero());
        let touching = IntervalSet::from_tuples([(q(0, 1), q(1, 2), false, false)]).unwrap();
        assert!(lemma42_conditions(&touching, 64).is_err());
    }

    #[test]
    fn cantor_ratio_sum_within_bound() {
        let spec = CantorSpec::middle_a(q(1, 4)).unwrap();
        let c = cantor_construction(&spec);
        let r = lemma42_stream(&c, 7, 64).unwrap();
        assert_eq!(r.count, 255);
        assert_eq!(r.tail_measure, spec.mass_tail(8));
        let bound = cantor_ratio_bound(&spec, 8, &q(1, 2)).unwrap();
        assert!(r.sum_ratio <= bound, "{} > {}", r.sum_ratio, bound);
    }

    #[test]
    fn cor44_verdicts() {
        let r = cor44_check(&CantorSpec::middle_a(q(1, 4)).unwrap()).unwrap();
        assert_eq!((r.mass.clone(), r.weighted.clone(), r.verdict), (Some(q(1, 2)), Some(q(1, 2)), Cor44Verdict::Pass));
        let r = cor44_check(&CantorSpec::middle_a(q(1, 3)).unwrap()).unwrap();
        assert_eq!((r.mass.clone(), r.verdict), (Some(q(1, 1)), Cor44Verdict::Fail));
        let g = CantorSpec::generic(vec![q(1, 4), q(1, 16)], None, None).unwrap();
        assert_eq!(cor44_check(&g).unwrap().verdict, Cor44Verdict::Inconclusive);
        let g = CantorSpec::generic(vec![q(1, 4), q(1, 16)], Some(q(1, 8)), Some(q(1, 2))).unwrap();
        let r = cor44_check(&g).unwrap();
        assert_eq!((r.verdict, r.label), (Cor44Verdict::Pass, Label::CertifiedWithTail));
    }

    #[test]
    fn closed_forms_match_partial_sums() {
        let spec = CantorSpec::middle_a(q(1, 4)).unwrap();
        let d = 40;
        let mass: Rational = (0..d).map(|k| spec.t(k).unwrap().mul_pow2(k as i64)).sum();
        let weighted: Rational = (0..d).map(|k| spec.t(k).unwrap().mul_pow2(k as i64) * Rational::int(k as i64)).sum();
        assert_eq!(mass + spec.mass_tail(d).unwrap(), spec.mass_tail(0).unwrap());
        assert_eq!(weighted + spec.weighted_tail(d).unwrap(), spec.weighted_tail(0).unwrap());
    }
}
