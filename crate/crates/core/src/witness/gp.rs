//! Geometric progressions `a q^n` inside a symmetric Cantor set.
//!
//! Under `-log` the removed gaps `G` become a set `A` of finite measure and
//! the progression becomes one with difference `-log q`, so the folding
//! search for arithmetic progressions applies. The returned `a` is checked
//! term by term against `E_depth`; containment in `E` itself is claimed
//! only as existence, through the positive margin.

use serde::{Deserialize, Serialize};

use super::ap::{fold_search, Fold};
use super::membership::{cantor_membership_bracket, Membership};
use crate::analysis::series::{cor44_check, Cor44Verdict};
use crate::constructions::cantor::cantor_construction;
use crate::constructions::CantorSpec;
use crate::error::{Error, Result};
use crate::sets::directed::{escalate, exp, neg_log};
use crate::sets::{Bracket, Rational};
use crate::transforms::neg_log_image;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GpTerm {
    pub n: u64,
    /// Exact enclosure `[a_lo q^n, a_hi q^n]` of the term.
    pub lo: Rational,
    pub hi: Rational,
    pub verdict: Membership,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GpWitness {
    pub kind: String,
    pub a_lo: Rational,
    pub a_hi: Rational,
    pub q: Rational,
    pub certified_depth: u64,
    /// Lower bound on the measure, in `-log` units, of starting points whose
    /// progression stays in `E` at every level.
    pub existence_margin: Rational,
    pub cantor_depth: usize,
    pub spec: CantorSpec,
    pub offset: u64,
    pub x: Rational,
    /// Bound on `Σ log v - log u` over the levels not materialized.
    pub tail: Rational,
    pub precision_bits: u32,
    pub terms: Vec<GpTerm>,
}

/// Bound on `Σ_{k>=d} Σ_j log(v_{kj}/u_{kj})`.
///
/// With `m <= λ(E)` and `c_k = 2^k t_k / m`, each ratio `r = (v-u)/v` at
/// level `k` is at most `c_k/(j - 1/2) <= ρ = 2 Σ_{k>=d} c_k`, so
/// `log(v/u) = -log(1-r) <= r/(1-ρ)`, and
/// `Σ_{j<=2^k} 1/(j-1/2) <= 2 + (k+1) log 2 <= 27/10 + 7k/10`.
pub fn gp_tail_bound(spec: &CantorSpec, d: usize) -> Result<Rational> {
    let need = |v: Option<Rational>, what: &str| {
        v.ok_or_else(|| Error::param("spec", format!("schedule declares no bound for {what}")))
    };
    let m = Rational::one() - need(spec.mass_tail(0), "the total removed length")?;
    if !m.is_positive() {
        return Err(Error::param("spec", "the Cantor set has measure zero"));
    }
    let mass = need(spec.mass_tail(d), "the removed length past the materialized levels")?;
    let weighted = need(spec.weighted_tail(d), "the weighted removed length")?;
    let rho = mass.mul_pow2(1).checked_div(&m)?;
    let one = Rational::one();
    if rho >= one {
        return Err(Error::InsufficientDepth(format!("cantor depth {d} too small: ratio bound {rho} is not below 1")));
    }
    let inner = mass * Rational::frac(27, 10) + weighted * Rational::frac(7, 10);
    inner.checked_div(&(m * (one - rho)))
}

struct Attempt {
    fold: Fold,
    a: Bracket,
    margin: Rational,
}

/// `None` when `bits` cannot separate `-log q` from 0.
fn attempt(spec: &CantorSpec, q: &Rational, cantor_depth: usize, tail: &Rational, bits: u32) -> Result<Option<Attempt>> {
    let (g, _) = cantor_construction(spec).removed.take(cantor_depth as i64 - 1)?;
    let a_set = neg_log_image(&g, bits)?.outer;
    let delta = neg_log(q, bits)?;
    if !delta.lo.is_positive() {
        return Ok(None);
    }
    let parts = a_set
        .parts()
        .iter()
        .map(|p| {
            let (lo, hi) = p.bounds().ok_or(Error::InfiniteMeasure)?;
            let lo = lo.clone().max(Rational::zero());
            Ok(Bracket::new(lo.checked_div(&delta.hi)?, hi.checked_div(&delta.lo)?).round_outward(bits))
        })
        .map(|b: Result<Bracket>| b.map(|b| (b.lo, b.hi)))
        .collect::<Result<Vec<_>>>()?;
    let fold = fold_search(&parts, &tail.checked_div(&delta.lo)?)?;
    let start = &fold.x + &Rational::int(fold.offset as i64);
    let a = start_point(&start, &delta, bits);
    let margin = (Rational::one() - &fold.covered) * &delta.lo - tail;
    Ok(Some(Attempt { fold, a, margin }))
}

/// Enclosure of `e^{-sΔ}` rounded outward to dyadics.
fn start_point(s: &Rational, delta: &Bracket, bits: u32) -> Bracket {
    let lo = exp(&-(s * &delta.hi), bits).lo;
    let hi = exp(&-(s * &delta.lo), bits).hi;
    Bracket::new(lo, hi).round_outward(bits)
}

fn terms(spec: &CantorSpec, a: &Bracket, q: &Rational, depth: usize, count: u64) -> Result<Vec<GpTerm>> {
    let mut out = Vec::with_capacity(count as usize);
    let mut qn = Rational::one();
    for n in 0..count {
        let lo = &a.lo * &qn;
        let hi = &a.hi * &qn;
        let verdict = cantor_membership_bracket(spec, &lo, &hi, depth)?;
        out.push(GpTerm { n, lo, hi, verdict });
        qn = qn * q;
    }
    Ok(out)
}

fn check_inputs(spec: &CantorSpec, q: &Rational, cantor_depth: usize, count: u64) -> Result<()> {
    if !q.is_positive() || q >= &Rational::one() {
        return Err(Error::param("q", format!("ratio must lie in (0, 1), got {q}")));
    }
    if cantor_depth == 0 || count == 0 {
        return Err(Error::param("depth", "cantor depth and term count must be positive"));
    }
    let report = cor44_check(spec)?;
    if report.verdict != Cor44Verdict::Pass {
        let mass = report.mass.map_or("unknown".to_string(), |m| m.to_string());
        return Err(Error::param(
            "spec",
            format!("schedule fails the summability test (sum of 2^k t_k = {mass}, verdict {})", report.verdict),
        ));
    }
    spec.validate(cantor_depth)
}

/// Searches for `a` with `a q^n ∈ E_{cantor_depth}` for `n < ap_depth`,
/// raising precision from `bits` up to `cap` until every term is decided.
pub fn find_gp(spec: &CantorSpec, q: &Rational, cantor_depth: usize, ap_depth: u64, bits: u32, cap: u32) -> Result<GpWitness> {
    check_inputs(spec, q, cantor_depth, ap_depth)?;
    let tail = gp_tail_bound(spec, cantor_depth)?;
    escalate(bits, cap, "geometric witness membership", |b| {
        let Some(at) = attempt(spec, q, cantor_depth, &tail, b)? else {
            return Ok(None);
        };
        let list = terms(spec, &at.a, q, cantor_depth, ap_depth)?;
        if let Some(t) = list.iter().find(|t| t.verdict == Membership::Out) {
            return Err(Error::Certificate(format!("term {} left E_{cantor_depth}", t.n)));
        }
        if list.iter().any(|t| t.verdict == Membership::Unknown) {
            return Ok(None);
        }
        Ok(Some(GpWitness {
            kind: "gp".into(),
            a_lo: at.a.lo,
            a_hi: at.a.hi,
            q: q.clone(),
            certified_depth: ap_depth - 1,
            existence_margin: at.margin,
            cantor_depth,
            spec: spec.clone(),
            offset: at.fold.offset,
            x: at.fold.x,
            tail: tail.clone(),
            precision_bits: b,
            terms: list,
        }))
    })
}

/// Recomputes the witness at its stored precision and checks every term.
pub fn replay_gp(w: &GpWitness) -> Result<()> {
    let bad = |m: String| Err(Error::Certificate(m));
    if w.kind != "gp" {
        return bad(format!("expected kind `gp`, got `{}`", w.kind));
    }
    if w.terms.len() as u64 != w.certified_depth + 1 {
        return bad("term list does not match certified depth".into());
    }
    check_inputs(&w.spec, &w.q, w.cantor_depth, w.certified_depth + 1).map_err(|e| Error::Certificate(e.to_string()))?;
    if !w.a_lo.is_positive() || w.a_lo > w.a_hi {
        return bad("starting bracket is not a positive interval".into());
    }
    let a = Bracket::new(w.a_lo.clone(), w.a_hi.clone());
    let fresh = terms(&w.spec, &a, &w.q, w.cantor_depth, w.certified_depth + 1)?;
    for (mine, theirs) in fresh.iter().zip(&w.terms) {
        if mine != theirs {
            return bad(format!("term {} does not match its recomputation", theirs.n));
        }
        if mine.verdict != Membership::In {
            return bad(format!("term {} is not inside E_{}", mine.n, w.cantor_depth));
        }
    }
    let tail = gp_tail_bound(&w.spec, w.cantor_depth).map_err(|e| Error::Certificate(e.to_string()))?;
    if tail != w.tail {
        return bad("tail bound differs".into());
    }
    let at = attempt(&w.spec, &w.q, w.cantor_depth, &tail, w.precision_bits)
        .map_err(|e| Error::Certificate(e.to_string()))?
        .ok_or_else(|| Error::Certificate("stored precision cannot resolve -log q".into()))?;
    if at.fold.offset != w.offset || at.fold.x != w.x || at.margin != w.existence_margin {
        return bad("fold does not reproduce the stored offset and margin".into());
    }
    if !(a.lo <= at.a.lo && at.a.hi <= a.hi) {
        return bad("starting bracket does not enclose exp(-(x+N)Δ)".into());
    }
    if !w.existence_margin.is_positive() {
        return bad("existence margin is not positive".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::cantor::cantor_construction as cc;
    use crate::transforms::gp_to_ap;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn middle_quarter_half() {
        let spec = CantorSpec::middle_a(q(1, 4)).unwrap();
        let w = find_gp(&spec, &q(1, 2), 8, 12, 64, 1024).unwrap();
        assert!(w.existence_margin.is_positive());
        assert!(w.terms.iter().all(|t| t.verdict == Membership::In));
        replay_gp(&w).unwrap();
        let (removed, _) = cc(&spec).removed.take(7).unwrap();
        let mut qn = Rational::one();
        for _ in 0..12 {
            assert!(!removed.contains(&(&w.a_lo * &qn)));
            qn = qn * q(1, 2);
        }
    }

    #[test]
    fn additive_form_agrees() {
        let spec = CantorSpec::middle_a(q(1, 4)).unwrap();
        let w = find_gp(&spec, &q(1, 3), 6, 6, 64, 1024).unwrap();
        let s = &w.x + &Rational::int(w.offset as i64);
        for n in 0..6i64 {
            let (delta, x0) = gp_to_ap(&q(1, 3), &w.a_hi, 128).unwrap();
            let (_, x1) = gp_to_ap(&q(1, 3), &w.a_lo, 128).unwrap();
            let lhs = Bracket::new(x0.lo, x1.hi).add(&delta.mul_rational(&Rational::int(n)));
            let rhs = delta.mul_rational(&(&s + &Rational::int(n)));
            assert!(lhs.overlaps(&rhs), "n={n}: {lhs:?} vs {rhs:?}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = CantorSpec::middle_a(q(1, 4)).unwrap();
        assert!(find_gp(&spec, &q(1, 1), 4, 4, 64, 256).is_err());
        assert!(find_gp(&spec, &q(0, 1), 4, 4, 64, 256).is_err());
        let third = CantorSpec::middle_a(q(1, 3)).unwrap();
        let e = find_gp(&third, &q(1, 2), 4, 4, 64, 256).unwrap_err();
        assert!(e.to_string().contains("FAIL"), "{e}");
    }

    #[test]
    fn tamper_detected() {
        let spec = CantorSpec::middle_a(q(1, 4)).unwrap();
        let mut w = find_gp(&spec, &q(1, 2), 6, 5, 64, 1024).unwrap();
        w.terms[2].hi = &w.terms[2].hi + &q(1, 1 << 20);
        assert!(matches!(replay_gp(&w), Err(Error::Certificate(_))));
    }
}
