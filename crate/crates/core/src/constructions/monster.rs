//! Open sets of small measure that are nevertheless dense at every scale:
//! `G = ∪_n ∪_{k<M_n} (k/M_n, (k + ε/2^n)/M_n)` with relative mass at least
//! `f(t)` in every window of length `t`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Construction;
use crate::error::{Error, Result};
use crate::sets::directed::{exp, log};
use crate::sets::{Bracket, Interval, IntervalSet, LazyIntervalStream, Rational, TailBound, Truth};

/// Grid points per level used to re-check the floor inequality.
const FLOOR_GRID: i64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityTarget {
    /// `(ε/8) g(x)` with `g` piecewise linear through `(2^-j, 4^-j)` and `g = 1` on `[1, ∞)`.
    Stepwise,
    /// `(ε/8) / ln ln (1/x)` for `x < e^-e`, and `ε/8` above.
    LogLog,
}

impl DensityTarget {
    /// Enclosure of the target at `x > 0`.
    pub fn eval(self, epsilon: &Rational, x: &Rational, bits: u32) -> Result<Bracket> {
        if !x.is_positive() {
            return Err(Error::Domain(format!("density target needs x > 0, got {x}")));
        }
        let s = epsilon.mul_pow2(-3);
        match self {
            DensityTarget::Stepwise => Ok(Bracket::exact(&s * &stepwise_shape(x))),
            DensityTarget::LogLog => {
                let e = exp(&Rational::one(), bits);
                // e^-e lies in [exp(-e.hi), exp(-e.lo)]
                let threshold_lo = exp(&-&e.hi, bits).lo;
                let threshold_hi = exp(&-&e.lo, bits).hi;
                if *x >= threshold_hi {
                    return Ok(Bracket::exact(s));
                }
                let inner = log(&x.recip()?, bits)?;
                let outer = Bracket::new(log(&inner.lo, bits)?.lo, log(&inner.hi, bits)?.hi);
                if !outer.lo.is_positive() {
                    return Ok(Bracket::new(Rational::zero(), s));
                }
                let f = Bracket::new(s.checked_div(&outer.hi)?, s.checked_div(&outer.lo)?);
                if *x < threshold_lo {
                    Ok(f)
                } else {
                    Ok(f.hull(&Bracket::exact(s)))
                }
            }
        }
    }
}

fn stepwise_shape(x: &Rational) -> Rational {
    if *x >= Rational::one() {
        return Rational::one();
    }
    // 2^-(j+1) <= x < 2^-j
    let mut j: i64 = 0;
    while *x < Rational::one().mul_pow2(-(j + 1)) {
        j += 1;
    }
    let left = Rational::one().mul_pow2(-(j + 1));
    let base = Rational::one().mul_pow2(-2 * (j + 1));
    base + (x - &left) * Rational::int(3).mul_pow2(-(j + 1))
}

/// A scale `δ`, either rational or `exp(-exp(L))` with rational `L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Exact(Rational),
    LogLog(Rational),
}

impl Scale {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Scale::Exact(r) => Some(r),
            Scale::LogLog(_) => None,
        }
    }

    pub fn enclose(&self, bits: u32) -> Bracket {
        match self {
            Scale::Exact(r) => Bracket::exact(r.clone()),
            Scale::LogLog(l) => {
                let e = exp(l, bits);
                Bracket::new(exp(&-&e.hi, bits).lo, exp(&-&e.lo, bits).hi)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonsterLevel {
    pub n: u32,
    pub delta: Scale,
    pub delta_next: Scale,
    /// Number of translates; `None` when too large to represent.
    pub m: Option<BigInt>,
    pub materialized: bool,
    pub grid_checked: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityMonster {
    pub epsilon: Rational,
    pub target: DensityTarget,
    pub levels: Vec<MonsterLevel>,
    pub cap: u64,
}

/// Checks `(⌊M x⌋ - 2)/(M x) > 1/2` on a grid of `[lo, hi]`.
fn floor_inequality_on_grid(m: &BigInt, lo: &Rational, hi: &Rational) -> Result<u64> {
    let mr = Rational::int(m.clone());
    let half = Rational::frac(1, 2);
    let step = (hi - lo) * Rational::frac(1, FLOOR_GRID);
    for i in 0..=FLOOR_GRID {
        let x = lo + &(&step * Rational::int(i));
        let mx = &mr * &x;
        let lhs = (Rational::int(mx.floor()) - Rational::int(2)).checked_div(&mx)?;
        if lhs <= half {
            return Err(Error::Schedule(format!("M = {m} fails the floor inequality at x = {x}")));
        }
    }
    Ok(FLOOR_GRID as u64 + 1)
}

impl DensityMonster {
    pub fn new(epsilon: &Rational, target: DensityTarget, depth: u32, cap: u64, bits: u32) -> Result<Self> {
        if !epsilon.is_positive() || *epsilon > Rational::one() {
            return Err(Error::param("epsilon", format!("must lie in (0, 1], got {epsilon}")));
        }
        if depth == 0 {
            return Err(Error::param("depth", "need at least one level"));
        }
        let bound = |n: u32| epsilon.mul_pow2(-(n as i64 + 1));
        let at_one = target.eval(epsilon, &Rational::one(), bits)?;
        if at_one.hi >= bound(1) {
            return Err(Error::param("f_spec", "target must stay below ε/4 at 1"));
        }
        let mut levels = Vec::new();
        let mut delta = Scale::Exact(Rational::one());
        for n in 1..=depth {
            let next = match target {
                DensityTarget::Stepwise => {
                    let d = delta.exact().expect("stepwise scales are rational");
                    let mut x = d.mul_pow2(-1);
                    while target.eval(epsilon, &x, bits)?.hi >= bound(n + 1) {
                        x = x.mul_pow2(-1);
                    }
                    Scale::Exact(x)
                }
                DensityTarget::LogLog => Scale::LogLog(Rational::int(1i64 << (n - 1).min(62)) + Rational::one()),
            };
            let m = match &next {
                Scale::Exact(x) => Some(Rational::int(7).checked_div(x)?.ceil()),
                Scale::LogLog(l) => {
                    let e = exp(l, bits);
                    if e.hi > Rational::int(80) {
                        None
                    } else {
                        Some((exp(&e.hi, bits).hi * Rational::int(7)).ceil())
                    }
                }
            };
            let materialized = m.as_ref().and_then(|m| m.to_u64()).is_some_and(|m| m <= cap);
            let grid_checked = match (&m, materialized) {
                (Some(m), true) => {
                    let lo = Rational::int(7).checked_div(&Rational::int(m.clone()))?;
                    floor_inequality_on_grid(m, &lo, &delta.enclose(bits).hi)?
                }
                _ => 0,
            };
            levels.push(MonsterLevel { n, delta: delta.clone(), delta_next: next.clone(), m, materialized, grid_checked });
            delta = next;
        }
        Ok(DensityMonster { epsilon: epsilon.clone(), target, levels, cap })
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    /// Smallest window length for which the materialized levels suffice.
    pub fn floor_scale(&self) -> &Scale {
        &self.levels.last().expect("at least one level").delta_next
    }

    /// Level `n` (from 1) as an interval set.
    pub fn level_set(&self, n: u32) -> Result<IntervalSet> {
        let lv = self
            .levels
            .get(n as usize - 1)
            .ok_or_else(|| Error::InsufficientDepth(format!("level {n} is beyond depth {}", self.depth())))?;
        let m = match (&lv.m, lv.materialized) {
            (Some(m), true) => m.to_u64().expect("materialized levels fit"),
            _ => {
                return Err(Error::InsufficientDepth(format!(
                    "level {n} is recorded by its scale only (cap {})",
                    self.cap
                )))
            }
        };
        let mr = Rational::int(m);
        let width = self.epsilon.mul_pow2(-(n as i64));
        let parts = (0..m).map(|k| {
            let k = Rational::int(k);
            let lo = k.checked_div(&mr)?;
            let hi = (&k + &width).checked_div(&mr)?;
            Interval::open(lo, hi)
        });
        Ok(IntervalSet::normalize(parts.collect::<Result<_>>()?))
    }

    /// Union of all levels.
    pub fn materialize(&self) -> Result<IntervalSet> {
        let mut g = IntervalSet::empty();
        for n in 1..=self.depth() {
            g = g.union(&self.level_set(n)?);
        }
        Ok(g)
    }

    /// Compares `λ(G ∩ [p, p+t])/t` with `f(t)`.
    pub fn check_window(&self, g: &IntervalSet, p: &Rational, t: &Rational, bits: u32) -> Result<WindowCheck> {
        if p.is_negative() || *p >= Rational::one() {
            return Err(Error::param("p", format!("must lie in [0, 1), got {p}")));
        }
        if !t.is_positive() || p + t >= Rational::one() {
            return Err(Error::param("t", format!("must lie in (0, 1 - p), got {t}")));
        }
        let floor = self.floor_scale().enclose(bits);
        if *t < floor.hi {
            return Err(Error::HorizonShortfall(format!("window {t} is below the materialized scale {}", floor.hi)));
        }
        let ratio = g.measure_between(p, &(p + t)).checked_div(t)?;
        let f = self.target.eval(&self.epsilon, t, bits)?;
        let holds = f.le(&ratio);
        Ok(WindowCheck { ratio, f, holds })
    }

    pub fn construction(&self) -> Construction {
        let me = self.clone();
        let eps = self.epsilon.clone();
        let depth = self.depth() as u64;
        let removed = LazyIntervalStream::new(
            move |b| {
                if b >= depth {
                    return Err(Error::InsufficientDepth(format!("level {} is beyond depth {depth}", b + 1)));
                }
                let mut earlier = IntervalSet::empty();
                for n in 1..=b as u32 {
                    earlier = earlier.union(&me.level_set(n)?);
                }
                Ok(me.level_set(b as u32 + 1)?.difference(&earlier))
            },
            move |b| Ok(TailBound::Finite(eps.mul_pow2(-(b as i64 + 1)))),
        );
        Construction {
            kind: "monster".into(),
            params: json!({ "epsilon": self.epsilon, "target": self.target, "levels": self.levels }),
            domain: Interval::open(Rational::zero(), Rational::one()).expect("unit interval"),
            removed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowCheck {
    pub ratio: Rational,
    pub f: Bracket,
    pub holds: Truth,
}

pub fn density_monster(
    epsilon: &Rational,
    target: DensityTarget,
    depth: u32,
    cap: u64,
    bits: u32,
) -> Result<(Construction, DensityMonster)> {
    let m = DensityMonster::new(epsilon, target, depth, cap, bits)?;
    Ok((m.construction(), m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn stepwise_shape_hits_nodes() {
        for j in 0..6 {
            assert_eq!(stepwise_shape(&Rational::one().mul_pow2(-j)), Rational::one().mul_pow2(-2 * j));
        }
        assert!(stepwise_shape(&q(3, 4)) > stepwise_shape(&q(5, 8)));
    }

    #[test]
    fn scales_and_measure() {
        let m = DensityMonster::new(&q(1, 2), DensityTarget::Stepwise, 6, 1 << 20, 64).unwrap();
        for lv in &m.levels {
            let d = lv.delta_next.exact().unwrap();
            let f = DensityTarget::Stepwise.eval(&q(1, 2), d, 64).unwrap();
            assert!(f.hi < q(1, 2).mul_pow2(-(lv.n as i64 + 2)));
            assert!(lv.grid_checked > 0);
        }
        let g = m.materialize().unwrap();
        assert!(g.measure().unwrap() <= q(1, 2));
        let w = m.check_window(&g, &q(1, 3), &q(1, 10), 64).unwrap();
        assert_eq!(w.holds, Truth::Yes);
    }

    #[test]
    fn loglog_levels_go_symbolic() {
        let m = DensityMonster::new(&q(1, 2), DensityTarget::LogLog, 3, 1 << 20, 64).unwrap();
        assert!(m.levels[0].materialized);
        assert!(!m.levels[2].materialized);
        assert!(m.level_set(3).is_err());
    }
}
