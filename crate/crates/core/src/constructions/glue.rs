//! Finite covers certifying that every progression `a α_n + b`, with `(a, b)`
//! in a rectangle and `n > m`, meets the removed set of a [`Bradford`] set
//! below a computed height `h`.
//!
//! The search works on vertical slabs `[a0, a1] × [b_lo, b_hi]`. For a fixed
//! `n` and removed interval `(u, v)`, every `b` in `(u - a0 α_n, v - a1 α_n)`
//! sends the whole slab column into `(u, v)`. Those `b`-pieces are collected
//! for growing ranges of `n` until they cover `[b_lo, b_hi]`; a slab that
//! cannot be covered is split in two. Pieces are located in floating point
//! and every resulting cell is then verified exactly, so the certificate does
//! not depend on rounding.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::bradford::Bradford;
use super::elim::DeltaSource;
use super::sequence::SequenceSpec;
use crate::error::{Error, Result};
use crate::sets::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueRegion {
    pub a_lo: Rational,
    pub a_hi: Rational,
    pub b_lo: Rational,
    pub b_hi: Rational,
}

impl GlueRegion {
    /// `[1/k, k] × [-k, k]`.
    pub fn square(k: u64) -> Self {
        let kk = Rational::int(k);
        GlueRegion { a_lo: Rational::frac(1, k as i64), a_hi: kk.clone(), b_lo: -&kk, b_hi: kk }
    }

    pub fn point(a: Rational, b: Rational) -> Self {
        GlueRegion { a_lo: a.clone(), a_hi: a, b_lo: b.clone(), b_hi: b }
    }

    fn validate(&self) -> Result<()> {
        if !self.a_lo.is_positive() || self.a_lo > self.a_hi || self.b_lo > self.b_hi {
            return Err(Error::param("region", "need 0 < a_lo <= a_hi and b_lo <= b_hi"));
        }
        Ok(())
    }

    pub fn area(&self) -> Rational {
        (&self.a_hi - &self.a_lo) * (&self.b_hi - &self.b_lo)
    }
}

/// Cell `[a_lo, a_hi] × [b_prev, b_hi]` of a slab, sent into `(u, v)` at index `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueCell {
    pub b_hi: Rational,
    pub n: u64,
    pub u: Rational,
    pub v: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueSlab {
    pub a_lo: Rational,
    pub a_hi: Rational,
    pub cells: Vec<GlueCell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueCertificate {
    pub k: u64,
    pub m: u64,
    /// Largest right end of a removed interval used by the cover.
    pub h: Rational,
    pub epsilon: Rational,
    pub deltas: DeltaSource,
    pub alpha: SequenceSpec,
    pub region: GlueRegion,
    pub slabs: Vec<GlueSlab>,
}

impl GlueCertificate {
    pub fn cell_count(&self) -> usize {
        self.slabs.iter().map(|s| s.cells.len()).sum()
    }

    pub fn max_n(&self) -> u64 {
        self.slabs.iter().flat_map(|s| s.cells.iter().map(|c| c.n)).max().unwrap_or(0)
    }

    /// Every cell as `(a_lo, a_hi, b_lo, b_hi, n, u, v)`.
    pub fn rectangles(&self) -> Vec<(Rational, Rational, Rational, Rational, u64, Rational, Rational)> {
        let mut out = Vec::with_capacity(self.cell_count());
        for s in &self.slabs {
            let mut b = self.region.b_lo.clone();
            for c in &s.cells {
                out.push((s.a_lo.clone(), s.a_hi.clone(), b.clone(), c.b_hi.clone(), c.n, c.u.clone(), c.v.clone()));
                b = c.b_hi.clone();
            }
        }
        out
    }

    /// Sum of the cell areas.
    pub fn area(&self) -> Rational {
        self.rectangles()
            .into_iter()
            .map(|(a0, a1, b0, b1, ..)| (a1 - a0) * (b1 - b0))
            .sum()
    }

    /// Re-checks the certificate by exact arithmetic, without any search.
    pub fn replay(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Certificate(msg));
        self.region.validate()?;
        let bradford = Bradford::new(&self.epsilon, self.deltas.clone())?;
        let r = &self.region;
        let flat_a = r.a_lo == r.a_hi;
        let flat_b = r.b_lo == r.b_hi;
        if self.slabs.is_empty() {
            return fail("no slabs".into());
        }
        let mut a = r.a_lo.clone();
        let mut seen: HashSet<(Rational, Rational)> = HashSet::new();
        let mut top = None::<Rational>;
        for (i, s) in self.slabs.iter().enumerate() {
            if s.a_lo != a {
                return fail(format!("slab {i} starts at {} instead of {a}", s.a_lo));
            }
            if s.a_hi < s.a_lo || (s.a_hi == s.a_lo && !flat_a) {
                return fail(format!("slab {i} is empty"));
            }
            if s.cells.is_empty() {
                return fail(format!("slab {i} has no cells"));
            }
            let mut b = r.b_lo.clone();
            for (j, c) in s.cells.iter().enumerate() {
                if c.b_hi < b || (c.b_hi == b && !flat_b) {
                    return fail(format!("cell {j} of slab {i} is empty"));
                }
                if c.n <= self.m {
                    return fail(format!("cell {j} of slab {i} uses n = {} <= m = {}", c.n, self.m));
                }
                let alpha = self.alpha.term(c.n)?;
                if !alpha.is_positive() {
                    return fail(format!("alpha_{} is not positive", c.n));
                }
                if &s.a_lo * &alpha + &b <= c.u || &s.a_hi * &alpha + &c.b_hi >= c.v {
                    return fail(format!("cell {j} of slab {i} is not mapped into ({}, {})", c.u, c.v));
                }
                if c.v > self.h {
                    return fail(format!("interval ({}, {}) lies above h = {}", c.u, c.v, self.h));
                }
                if seen.insert((c.u.clone(), c.v.clone())) && !bradford.removed_covers(&c.u, &c.v)? {
                    return fail(format!("({}, {}) is not inside the removed set", c.u, c.v));
                }
                if top.as_ref().is_none_or(|t| c.v > *t) {
                    top = Some(c.v.clone());
                }
                b = c.b_hi.clone();
            }
            if b != r.b_hi {
                return fail(format!("slab {i} stops at b = {b}"));
            }
            a = s.a_hi.clone();
        }
        if a != r.a_hi {
            return fail(format!("slabs stop at a = {a}"));
        }
        if top.as_ref() != Some(&self.h) {
            return fail("h is not the largest right end used".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueOptions {
    /// Largest index `n` tried.
    pub n_cap: u64,
    /// Largest number of slabs examined.
    pub subdivision_cap: usize,
    /// Indices examined in the first round for each slab.
    pub first_batch: u64,
}

impl Default for GlueOptions {
    fn default() -> Self {
        GlueOptions { n_cap: 1 << 22, subdivision_cap: 1 << 16, first_batch: 64 }
    }
}

#[derive(Debug, Clone, Copy)]
enum Source {
    /// Block `(i - β, i)`, `i >= 1`.
    Block(i64),
    /// Block `(-i, -i + β)`, `i >= 1`.
    NegBlock(i64),
    /// Elimination interval with this index.
    Elim(u64),
    /// Reflection of an elimination interval.
    NegElim(u64),
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    n: u64,
    src: Source,
}

struct Search<'a> {
    bradford: &'a Bradford,
    alpha: &'a SequenceSpec,
    m: u64,
    opts: &'a GlueOptions,
    b_lo: f64,
    b_hi: f64,
    beta: f64,
    max_len: Rational,
    /// `(lo, hi)` of elimination intervals `1, 2, ...` in floating point.
    elim: Vec<(f64, f64)>,
}

/// Smallest-denominator dyadic strictly between `x` and `y`.
fn dyadic_between(x: f64, y: f64) -> Option<f64> {
    if x.partial_cmp(&y) != Some(std::cmp::Ordering::Less) || !x.is_finite() || !y.is_finite() {
        return None;
    }
    let mut e = (-(y - x).log2()).floor() as i32 - 1;
    while e < 1100 {
        let s = 2f64.powi(e);
        let c = ((x * s).floor() + 1.0) / s;
        if c > x && c < y {
            return Some(c);
        }
        e += 1;
    }
    None
}

/// Smallest-denominator dyadic rational strictly between `x` and `y`.
fn dyadic_between_exact(x: &Rational, y: &Rational) -> Option<Rational> {
    if x >= y {
        return None;
    }
    let mut e: i64 = -64;
    loop {
        let c = Rational::int(x.mul_pow2(e).floor() + 1u32).mul_pow2(-e);
        if c < *y {
            return Some(c);
        }
        e += 1;
    }
}

impl Search<'_> {
    fn alpha_f64(&self, n: u64) -> Result<f64> {
        Ok(match self.alpha {
            SequenceSpec::Linear { start, step } => start.to_f64() + step.to_f64() * (n - 1) as f64,
            other => other.term(n)?.to_f64(),
        })
    }

    fn ensure_elim(&mut self, horizon: f64) -> Result<()> {
        while self.elim.last().is_none_or(|&(lo, _)| lo <= horizon) {
            let iv = self.bradford.elim.get(self.elim.len() as u64 + 1)?;
            self.elim.push((iv.lo.to_f64(), iv.hi.to_f64()));
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn push_piece(&self, out: &mut Vec<Piece>, u: f64, v: f64, a0: f64, a1: f64, alpha: f64, n: u64, src: Source) {
        let margin = 1e-12 * (1.0 + u.abs().max(v.abs()));
        let lo = u - a0 * alpha + margin;
        let hi = v - a1 * alpha - margin;
        if hi > lo && hi > self.b_lo && lo < self.b_hi {
            out.push(Piece { lo, hi, n, src });
        }
    }

    fn pieces_for(&mut self, n: u64, a0: f64, a1: f64, out: &mut Vec<Piece>) -> Result<()> {
        let alpha = self.alpha_f64(n)?;
        let wlo = a0 * alpha + self.b_lo;
        let whi = a1 * alpha + self.b_hi;
        let beta = self.beta;
        let first = (wlo.floor() as i64).max(1);
        let last = (whi + beta).ceil() as i64;
        for i in first..=last {
            let (u, v) = (i as f64 - beta, i as f64);
            if v > wlo && u < whi {
                self.push_piece(out, u, v, a0, a1, alpha, n, Source::Block(i));
            }
        }
        if wlo < 0.0 {
            for i in 1..=((-wlo).ceil() as i64 + 1) {
                let (u, v) = (-(i as f64), -(i as f64) + beta);
                if v > wlo && u < whi {
                    self.push_piece(out, u, v, a0, a1, alpha, n, Source::NegBlock(i));
                }
            }
        }
        self.ensure_elim(whi.max(-wlo))?;
        let start = self.elim.partition_point(|&(_, hi)| hi <= wlo);
        for idx in start..self.elim.len() {
            let (u, v) = self.elim[idx];
            if u >= whi {
                break;
            }
            self.push_piece(out, u, v, a0, a1, alpha, n, Source::Elim(idx as u64 + 1));
        }
        if wlo < 0.0 {
            let start = self.elim.partition_point(|&(_, hi)| hi <= -whi);
            for idx in start..self.elim.len() {
                let (lo, hi) = self.elim[idx];
                if lo >= -wlo {
                    break;
                }
                self.push_piece(out, -hi, -lo, a0, a1, alpha, n, Source::NegElim(idx as u64 + 1));
            }
        }
        Ok(())
    }

    /// Greedy sweep over pieces sorted by left end; returns the cut points
    /// and the piece used for each cell.
    fn greedy(&self, pieces: &[Piece]) -> Option<Vec<(f64, usize)>> {
        let mut best_upto = Vec::with_capacity(pieces.len());
        let mut best = 0usize;
        for (i, p) in pieces.iter().enumerate() {
            if p.hi > pieces[best].hi {
                best = i;
            }
            best_upto.push(best);
        }
        let containing = |c: f64| {
            let j = pieces.partition_point(|p| p.lo < c);
            (j > 0).then(|| best_upto[j - 1]).filter(|&i| pieces[i].hi > c)
        };
        let mut c = self.b_lo;
        let mut cuts = Vec::new();
        loop {
            let i = containing(c)?;
            if pieces[i].hi > self.b_hi {
                cuts.push((self.b_hi, i));
                return Some(cuts);
            }
            let top = pieces[i].hi;
            let next = containing(top)?;
            let cut = dyadic_between(c.max(pieces[next].lo), top)?;
            cuts.push((cut, i));
            c = cut;
        }
    }

    fn exact_interval(&self, src: Source) -> Result<(Rational, Rational)> {
        let beta = &self.bradford.block;
        Ok(match src {
            Source::Block(i) => (Rational::int(i) - beta, Rational::int(i)),
            Source::NegBlock(i) => (Rational::int(-i), Rational::int(-i) + beta),
            Source::Elim(n) => {
                let iv = self.bradford.elim.get(n)?;
                (iv.lo, iv.hi)
            }
            Source::NegElim(n) => {
                let iv = self.bradford.elim.get(n)?;
                (-iv.hi, -iv.lo)
            }
        })
    }

    /// Largest `n <= n_cap` with `(a1 - a0) α_n < max_len`.
    fn n_max(&self, a0: &Rational, a1: &Rational) -> Result<u64> {
        let w = a1 - a0;
        if w.is_zero() {
            return Ok(self.opts.n_cap);
        }
        let ok = |n: u64| -> Result<bool> { Ok(&w * &self.alpha.term(n)? < self.max_len) };
        if !ok(self.m + 1)? {
            return Ok(self.m);
        }
        let (mut lo, mut hi) = (self.m + 1, self.opts.n_cap);
        if ok(hi)? {
            return Ok(hi);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    fn cover_slab(&mut self, a0: &Rational, a1: &Rational, b_lo: &Rational) -> Result<Option<Vec<GlueCell>>> {
        let n_max = self.n_max(a0, a1)?;
        let (a0f, a1f) = (a0.to_f64(), a1.to_f64());
        let mut pieces = Vec::new();
        let mut done = self.m;
        let mut batch = self.opts.first_batch.max(1);
        while done < n_max {
            let upto = (done + batch).min(n_max);
            for n in done + 1..=upto {
                self.pieces_for(n, a0f, a1f, &mut pieces)?;
            }
            done = upto;
            batch *= 2;
            pieces.sort_by(|p, q| p.lo.total_cmp(&q.lo));
            if let Some(cuts) = self.greedy(&pieces) {
                return self.verify(a0, a1, b_lo, &pieces, &cuts);
            }
        }
        Ok(None)
    }

    fn verify(
        &self,
        a0: &Rational,
        a1: &Rational,
        b_lo: &Rational,
        pieces: &[Piece],
        cuts: &[(f64, usize)],
    ) -> Result<Option<Vec<GlueCell>>> {
        let mut cells = Vec::with_capacity(cuts.len());
        let mut b = b_lo.clone();
        for (k, &(cut, i)) in cuts.iter().enumerate() {
            let b_hi = if k + 1 == cuts.len() {
                self.region_b_hi()
            } else {
                Rational::from_f64(cut).ok_or_else(|| Error::Domain("non-finite cut".into()))?
            };
            let p = pieces[i];
            let (u, v) = self.exact_interval(p.src)?;
            let alpha = self.alpha.term(p.n)?;
            if a0 * &alpha + &b <= u || a1 * &alpha + &b_hi >= v {
                return Ok(None);
            }
            b = b_hi.clone();
            cells.push(GlueCell { b_hi, n: p.n, u, v });
        }
        Ok(Some(cells))
    }

    fn region_b_hi(&self) -> Rational {
        Rational::from_f64(self.b_hi).expect("finite")
    }
}

/// Cover of `[1/k, k] × [-k, k]` for indices `n > m`.
pub fn glue_cover_search(
    bradford: &Bradford,
    alpha: &SequenceSpec,
    k: u64,
    m: u64,
    opts: &GlueOptions,
) -> Result<GlueCertificate> {
    if k == 0 {
        return Err(Error::param("k", "must be positive"));
    }
    glue_cover_region(bradford, alpha, k, GlueRegion::square(k), m, opts)
}

/// Cover of an arbitrary rectangle. The `b` bounds must be exactly representable as `f64`.
pub fn glue_cover_region(
    bradford: &Bradford,
    alpha: &SequenceSpec,
    k: u64,
    region: GlueRegion,
    m: u64,
    opts: &GlueOptions,
) -> Result<GlueCertificate> {
    region.validate()?;
    let (b_lo, b_hi) = (region.b_lo.to_f64(), region.b_hi.to_f64());
    if Rational::from_f64(b_lo).as_ref() != Some(&region.b_lo) || Rational::from_f64(b_hi).as_ref() != Some(&region.b_hi) {
        return Err(Error::param("region", "b bounds must be dyadic"));
    }
    let mut search = Search {
        bradford,
        alpha,
        m,
        opts,
        b_lo,
        b_hi,
        beta: bradford.block.to_f64(),
        max_len: bradford.block.clone().max(bradford.elim.schedule().epsilon.clone()),
        elim: Vec::new(),
    };
    let mut stack = vec![(region.a_lo.clone(), region.a_hi.clone())];
    let mut slabs = Vec::new();
    let mut examined = 0usize;
    while let Some((a0, a1)) = stack.pop() {
        examined += 1;
        if examined > opts.subdivision_cap {
            return Err(Error::CoverNotFound(format!(
                "{} slabs examined, {} covered, next slab [{a0}, {a1}]",
                opts.subdivision_cap,
                slabs.len()
            )));
        }
        if let Some(cells) = search.cover_slab(&a0, &a1, &region.b_lo)? {
            slabs.push(GlueSlab { a_lo: a0, a_hi: a1, cells });
            continue;
        }
        let w = &a1 - &a0;
        if w.is_zero() || w < Rational::one().mul_pow2(-60) {
            return Err(Error::CoverNotFound(format!("slab [{a0}, {a1}] not covered up to n = {}", opts.n_cap)));
        }
        let quarter = w.mul_pow2(-2);
        let mid = dyadic_between_exact(&(&a0 + &quarter), &(&a1 - &quarter)).expect("non-empty range");
        stack.push((mid.clone(), a1));
        stack.push((a0, mid));
    }
    let h = slabs
        .iter()
        .flat_map(|s| s.cells.iter().map(|c| c.v.clone()))
        .max()
        .expect("at least one cell");
    Ok(GlueCertificate {
        k,
        m,
        h,
        epsilon: bradford.epsilon.clone(),
        deltas: bradford.elim.schedule().deltas.clone(),
        alpha: alpha.clone(),
        region,
        slabs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::enumerate::RationalOrder;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn half() -> Bradford {
        Bradford::new(&q(1, 2), DeltaSource::Enumeration(RationalOrder::SternBrocot)).unwrap()
    }

    #[test]
    fn dyadics_between() {
        assert_eq!(dyadic_between(0.3, 0.7), Some(0.5));
        assert_eq!(dyadic_between(0.26, 0.3), Some(0.28125));
        assert_eq!(dyadic_between_exact(&q(1, 3), &q(2, 3)), Some(q(1, 2)));
        assert_eq!(dyadic_between_exact(&q(5, 1), &q(100, 1)), Some(q(64, 1)));
    }

    #[test]
    fn point_region() {
        let b = half();
        let cert =
            glue_cover_region(&b, &SequenceSpec::identity(), 1, GlueRegion::point(q(1, 1), q(0, 1)), 3, &GlueOptions::default())
                .unwrap();
        assert_eq!(cert.cell_count(), 1);
        assert!(cert.slabs[0].cells[0].n > 3);
        cert.replay().unwrap();
    }

    #[test]
    fn level_one_square() {
        let b = half();
        let cert = glue_cover_search(&b, &SequenceSpec::identity(), 1, 0, &GlueOptions::default()).unwrap();
        cert.replay().unwrap();
        assert_eq!(cert.area(), q(0, 1));
        assert!(cert.h.is_positive());
    }

    #[test]
    fn tampered_certificate_fails() {
        let b = half();
        let mut cert = glue_cover_search(&b, &SequenceSpec::identity(), 1, 0, &GlueOptions::default()).unwrap();
        let c = &mut cert.slabs[0].cells[0];
        c.u = &c.u - q(1, 1);
        assert!(matches!(cert.replay(), Err(Error::Certificate(_))));
    }
}
