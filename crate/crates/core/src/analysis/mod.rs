//! Measure and density profiles, and the finite inequalities behind the
//! window/density equivalence.

pub mod csv;
pub mod quadrature;
pub mod series;

use serde::Serialize;

use crate::constructions::Construction;
use crate::error::{Error, Result};
use crate::sets::directed::{escalate, exp};
use crate::sets::{Bracket, Interval, IntervalSet, Rational, Truth};
use crate::transforms::EnclosedSet;

pub use series::{cor44_check, lemma42_conditions, prop31_series, Cor44Report, Cor44Verdict, Lemma42Report, SeriesRow};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowPoint {
    pub t: Rational,
    /// `λ(kept ∩ [t, t+1])`.
    pub measure: Rational,
}

/// Exact unit-window measures of a materialized kept set.
pub fn window_profile_set(kept: &IntervalSet, t_grid: &[Rational]) -> Vec<WindowPoint> {
    t_grid
        .iter()
        .map(|t| WindowPoint { t: t.clone(), measure: kept.measure_between(t, &(t + &Rational::one())) })
        .collect()
}

/// Unit-window measures of a construction, materializing just enough of it.
pub fn window_profile(c: &Construction, depth: i64, t_grid: &[Rational]) -> Result<Vec<WindowPoint>> {
    let (Some(lo), Some(hi)) = (t_grid.iter().min(), t_grid.iter().max()) else {
        return Ok(Vec::new());
    };
    let region = Interval::closed(lo.clone(), hi + &Rational::one())?;
    let kept = c.kept_on(&region, depth)?;
    Ok(window_profile_set(&kept, t_grid))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityPoint {
    pub t: Rational,
    pub lower: Rational,
    pub upper: Rational,
}

/// Relative measure of `kept` in `[center - t, center + t]` (or
/// `[center, center + t]` when `one_sided`), bracketed by the inner and
/// outer sides of the enclosure.
pub fn density_profile(kept: &EnclosedSet, t_grid: &[Rational], center: &Rational, one_sided: bool) -> Result<Vec<DensityPoint>> {
    t_grid
        .iter()
        .map(|t| {
            if !t.is_positive() {
                return Err(Error::param("t", format!("window half-width must be positive, got {t}")));
            }
            let (lo, width) = if one_sided { (center.clone(), t.clone()) } else { (center - t, t.mul_pow2(1)) };
            let hi = &lo + &width;
            Ok(DensityPoint {
                t: t.clone(),
                lower: kept.inner.measure_between(&lo, &hi).checked_div(&width)?,
                upper: kept.outer.measure_between(&lo, &hi).checked_div(&width)?,
            })
        })
        .collect()
}

/// The chain bounding `e^μ ∫_μ^∞ 1_G(x) e^{-x} dx` by window measures of `G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma26Report {
    pub mu: Rational,
    pub k: u32,
    /// `e^μ ∫_μ^{μ+k} 1_G e^{-x} dx + e^{-k}`, an upper bound for the full integral.
    pub lhs: Bracket,
    /// `k λ(G ∩ [μ, μ+1]) + e^{-k}`.
    pub rhs_literal: Bracket,
    /// `λ(G ∩ [μ, μ+k]) + e^{-k}`.
    pub rhs_middle: Bracket,
    /// `k max_j λ(G ∩ [μ+j, μ+j+1]) + e^{-k}`.
    pub rhs_corrected: Bracket,
    pub holds_literal: Truth,
    pub holds_middle: Truth,
    pub holds_corrected: Truth,
    pub precision_bits: u32,
}

/// Sum over the parts of `g ∩ [μ, μ+k]` of `e^{μ-u} - e^{μ-v}`.
fn weighted_mass(g: &IntervalSet, mu: &Rational, k: u32, bits: u32) -> Result<Bracket> {
    let window = Interval::closed(mu.clone(), mu + &Rational::int(k))?;
    let mut acc = Bracket::exact(Rational::zero());
    for p in g.clip(&window).parts() {
        let (u, v) = p.bounds().ok_or(Error::InfiniteMeasure)?;
        let left = exp(&(mu - u), bits);
        let right = exp(&(mu - v), bits);
        acc = acc.add(&left.sub(&right));
    }
    Ok(acc)
}

/// Evaluates the chain on a removed set materialized over `[μ, μ+k]`,
/// raising precision until every verdict is conclusive or `cap` is reached.
pub fn lemma26_chain(g: &IntervalSet, mu: &Rational, k: u32, bits: u32, cap: u32) -> Result<Lemma26Report> {
    if k == 0 {
        return Err(Error::param("k", "must be positive"));
    }
    let one = Rational::one();
    let literal = g.measure_between(mu, &(mu + &one)) * Rational::int(k);
    let middle = g.measure_between(mu, &(mu + &Rational::int(k)));
    let corrected = (0..k)
        .map(|j| {
            let lo = mu + &Rational::int(j);
            g.measure_between(&lo, &(&lo + &one))
        })
        .max()
        .expect("k > 0")
        * Rational::int(k);
    escalate(bits, cap, "window chain", |b| {
        // e^{-k} appears on both sides, so each verdict compares the finite parts.
        let mass = weighted_mass(g, mu, k, b)?;
        let verdicts = [&literal, &middle, &corrected].map(|r| mass.le(r));
        if verdicts.contains(&Truth::Unknown) {
            return Ok(None);
        }
        let tail = exp(&-Rational::int(k), b);
        let with_tail = |r: &Rational| tail.add_rational(r);
        Ok(Some(Lemma26Report {
            mu: mu.clone(),
            k,
            lhs: mass.add(&tail),
            rhs_literal: with_tail(&literal),
            rhs_middle: with_tail(&middle),
            rhs_corrected: with_tail(&corrected),
            holds_literal: verdicts[0],
            holds_middle: verdicts[1],
            holds_corrected: verdicts[2],
            precision_bits: b,
        }))
    })
}

/// The chain on a construction's removed stream, checking that `depth`
/// covers `[μ, μ+k]`.
pub fn lemma26_chain_stream(c: &Construction, depth: i64, mu: &Rational, k: u32, bits: u32, cap: u32) -> Result<Lemma26Report> {
    let region = Interval::closed(mu.clone(), mu + &Rational::int(k))?;
    let (g, _) = c.removed.take_covering(depth, &region)?;
    lemma26_chain(&g, mu, k, bits, cap)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowFraction {
    pub mu: Rational,
    pub nu: Rational,
    /// `λ(G ∩ [μ, μ+ν]) / ν`.
    pub removed_fraction: Rational,
}

/// Removed fraction of windows of several lengths; finite evidence for the
/// fixed-`ν` form of the window condition.
pub fn window_fractions(g: &IntervalSet, mu_grid: &[Rational], nus: &[Rational]) -> Result<Vec<WindowFraction>> {
    let mut out = Vec::with_capacity(mu_grid.len() * nus.len());
    for mu in mu_grid {
        for nu in nus {
            if !nu.is_positive() {
                return Err(Error::param("nu", "window length must be positive"));
            }
            let m = g.measure_between(mu, &(mu + nu));
            out.push(WindowFraction { mu: mu.clone(), nu: nu.clone(), removed_fraction: m.checked_div(nu)? });
        }
    }
    Ok(out)
}

/// The window lengths probed by [`window_fractions`] by default.
pub fn default_nus() -> Vec<Rational> {
    vec![Rational::frac(1, 4), Rational::frac(1, 2), Rational::one(), Rational::int(2)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::equidistribute_set;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn window_profiles() {
        let c = equidistribute_set(&q(1, 4)).unwrap();
        let p = window_profile(&c, 5, &[q(0, 1), q(1, 3), q(5, 2)]).unwrap();
        assert!(p.iter().all(|w| w.measure == q(3, 4)));
        let full = window_profile_set(&IntervalSet::everything(), &[q(-7, 3)]);
        assert_eq!(full[0].measure, q(1, 1));
    }

    #[test]
    fn densities() {
        let s = IntervalSet::from_tuples([(q(-1, 1), q(1, 1), false, false)]).unwrap();
        let d = density_profile(&EnclosedSet::exact(s), &[q(1, 2)], &q(0, 1), false).unwrap();
        assert_eq!((d[0].lower.clone(), d[0].upper.clone()), (q(1, 1), q(1, 1)));
        let s = IntervalSet::from_tuples([(q(0, 1), q(1, 4), false, true), (q(1, 2), q(1, 1), true, false)]).unwrap();
        let d = density_profile(&EnclosedSet::exact(s), &[q(1, 2)], &q(0, 1), true).unwrap();
        assert_eq!(d[0].lower, q(1, 2));
        assert!(density_profile(&EnclosedSet::exact(IntervalSet::empty()), &[q(0, 1)], &q(0, 1), true).is_err());
    }

    #[test]
    fn chain_cases() {
        let r = lemma26_chain(&IntervalSet::empty(), &q(3, 1), 4, 64, 1024).unwrap();
        assert_eq!(r.holds_literal, Truth::Yes);
        assert!(r.lhs.hi <= r.rhs_literal.hi);
        let full = IntervalSet::from_tuples([(q(2, 1), q(3, 1), true, true)]).unwrap();
        let r = lemma26_chain(&full, &q(2, 1), 3, 64, 1024).unwrap();
        assert!(r.rhs_literal.lo >= q(3, 1));
        assert!(r.lhs.hi <= q(1, 1));
        let c = equidistribute_set(&q(1, 4)).unwrap();
        let r = lemma26_chain_stream(&c, 6, &q(0, 1), 5, 64, 1024).unwrap();
        assert_eq!(r.holds_literal, Truth::Yes);
        assert_eq!(r.holds_corrected, Truth::Yes);
    }
}
