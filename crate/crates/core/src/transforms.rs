//! Set images under `-log` and `exp(-.)` with explicit enclosure direction.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sets::directed::{exp_neg, neg_log, Dyadic};
use crate::sets::{Bracket, Endpoint, Interval, IntervalSet, Rational};

/// Which side of an enclosure a downstream claim should rely on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Inner,
    Outer,
}

/// `inner ⊆ true image ⊆ outer`, with `λ(outer) − λ(inner) <= slack`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnclosedSet {
    pub inner: IntervalSet,
    pub outer: IntervalSet,
    pub slack: Rational,
    pub authoritative: Direction,
}

impl EnclosedSet {
    pub fn exact(s: IntervalSet) -> Self {
        EnclosedSet { inner: s.clone(), outer: s, slack: Rational::zero(), authoritative: Direction::Outer }
    }

    pub fn with_authority(mut self, d: Direction) -> Self {
        self.authoritative = d;
        self
    }

    pub fn authoritative_set(&self) -> &IntervalSet {
        match self.authoritative {
            Direction::Inner => &self.inner,
            Direction::Outer => &self.outer,
        }
    }

    /// Checks `inner ⊆ outer` and, for bounded sets, the slack bound.
    pub fn is_consistent(&self) -> bool {
        if self.inner.intersection(&self.outer) != self.inner {
            return false;
        }
        match (self.outer.measure(), self.inner.measure()) {
            (Ok(o), Ok(i)) => o - i <= self.slack,
            _ => true,
        }
    }

    pub fn union(&self, other: &EnclosedSet) -> EnclosedSet {
        EnclosedSet {
            inner: self.inner.union(&other.inner),
            outer: self.outer.union(&other.outer),
            slack: &self.slack + &other.slack,
            authoritative: self.authoritative,
        }
    }

    /// Reflection `x -> -x` of both sides.
    pub fn reflect(&self) -> EnclosedSet {
        EnclosedSet {
            inner: self.inner.reflect(),
            outer: self.outer.reflect(),
            slack: self.slack.clone(),
            authoritative: self.authoritative,
        }
    }

    /// Adds an exactly known set to both sides.
    pub fn union_exact(&self, s: &IntervalSet) -> EnclosedSet {
        EnclosedSet {
            inner: self.inner.union(s),
            outer: self.outer.union(s),
            slack: self.slack.clone(),
            authoritative: self.authoritative,
        }
    }
}

/// Image of one endpoint: either exact or an enclosing bracket.
enum EndImage {
    Exact(Endpoint),
    Approx(Bracket),
}

impl EndImage {
    fn lo_hi(&self) -> (Endpoint, Endpoint) {
        match self {
            EndImage::Exact(e) => (e.clone(), e.clone()),
            EndImage::Approx(b) => (b.lo.clone().into(), b.hi.clone().into()),
        }
    }

    fn is_exact(&self) -> bool {
        matches!(self, EndImage::Exact(_)) || matches!(self, EndImage::Approx(b) if b.is_exact())
    }
}

/// Images each part under a strictly decreasing map given endpoint-wise.
fn decreasing_image(s: &IntervalSet, f: impl Fn(&Endpoint) -> Result<EndImage>) -> Result<EnclosedSet> {
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    let mut slack = Rational::zero();
    for p in s.parts() {
        let img_hi = f(p.lo())?;
        let img_lo = f(p.hi())?;
        let (lo_lo, lo_hi) = img_lo.lo_hi();
        let (hi_lo, hi_hi) = img_hi.lo_hi();
        // Flags carry over only where the endpoint image is exact.
        let o_lc = if img_lo.is_exact() { p.hi_closed() } else { true };
        let o_hc = if img_hi.is_exact() { p.lo_closed() } else { true };
        let o = Interval::new(lo_lo, hi_hi, o_lc, o_hc)?;
        let i_lc = img_lo.is_exact() && p.hi_closed();
        let i_hc = img_hi.is_exact() && p.lo_closed();
        let i = Interval::new(lo_hi, hi_lo, i_lc, i_hc).ok();
        if let Ok(ol) = o.length() {
            let il = i.as_ref().map(|i| i.length()).transpose()?.unwrap_or_default();
            slack = slack + (ol - il);
        }
        outer.push(o);
        inner.extend(i);
    }
    Ok(EnclosedSet {
        inner: IntervalSet::normalize(inner),
        outer: IntervalSet::normalize(outer),
        slack,
        authoritative: Direction::Outer,
    })
}

/// Enclosure of `{-log x : x in S}` for `S ⊂ (0, ∞)`.
///
/// Order-reversing: the image of `(u, v)` is `(-log v, -log u)`.
pub fn neg_log_image(s: &IntervalSet, bits: u32) -> Result<EnclosedSet> {
    if let Some(first) = s.parts().first() {
        if first.lo().cmp_rational(&Rational::zero()) != std::cmp::Ordering::Greater {
            return Err(Error::Domain(format!("-log image needs parts inside (0, inf); got {first}")));
        }
    }
    decreasing_image(s, |e| match e {
        Endpoint::PosInf => Ok(EndImage::Exact(Endpoint::NegInf)),
        Endpoint::Finite(x) => Ok(EndImage::Approx(neg_log(x, bits)?)),
        Endpoint::NegInf => unreachable!("checked above"),
    })
}

/// Enclosure of `{e^-x : x in S}` for `S ⊂ [0, ∞)`.
pub fn exp_neg_image(s: &IntervalSet, bits: u32) -> Result<EnclosedSet> {
    if let Some(first) = s.parts().first() {
        if first.lo().cmp_rational(&Rational::zero()) == std::cmp::Ordering::Less {
            return Err(Error::Domain(format!("exp(-x) image needs parts inside [0, inf); got {first}")));
        }
    }
    decreasing_image(s, |e| match e {
        Endpoint::PosInf => Ok(EndImage::Exact(Endpoint::Finite(Rational::zero()))),
        Endpoint::Finite(x) => Ok(EndImage::Approx(exp_neg(x, bits))),
        Endpoint::NegInf => unreachable!("checked above"),
    })
    .map(|mut e| {
        // e^-x never reaches 0, so an image touching 0 from +inf stays open there.
        e.outer = strip_zero(e.outer);
        e.inner = strip_zero(e.inner);
        e
    })
}

fn strip_zero(s: IntervalSet) -> IntervalSet {
    let zero = Rational::zero();
    if !s.contains(&zero) {
        return s;
    }
    s.difference(&IntervalSet::from_interval(Interval::point(zero)))
}

/// Additive form of the geometric progression `a q^n`: returns brackets for
/// `Δ = -log q` and `x0 = -log a`, so that `-log(a q^n) = x0 + nΔ`.
pub fn gp_to_ap(q: &Rational, a: &Rational, bits: u32) -> Result<(Bracket, Bracket)> {
    if !q.is_positive() || *q >= Rational::one() {
        return Err(Error::param("q", format!("ratio must lie in (0, 1), got {q}")));
    }
    if !a.is_positive() {
        return Err(Error::param("a", format!("initial term must be positive, got {a}")));
    }
    Ok((neg_log(q, bits)?, neg_log(a, bits)?))
}

// ---------------------------------------------------------------------------
// JSON with dyadic endpoints
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DyEnd {
    Inf(String),
    Dy(Dyadic),
}

#[derive(Serialize, Deserialize)]
struct DyPart {
    lo: DyEnd,
    hi: DyEnd,
    lo_closed: bool,
    hi_closed: bool,
}

#[derive(Serialize, Deserialize)]
struct DySet {
    parts: Vec<DyPart>,
}

#[derive(Serialize, Deserialize)]
struct DyEnclosed {
    inner: DySet,
    outer: DySet,
    slack: Dyadic,
    authoritative: Direction,
}

fn to_dy(e: &Endpoint) -> std::result::Result<DyEnd, String> {
    match e {
        Endpoint::NegInf => Ok(DyEnd::Inf("-inf".into())),
        Endpoint::PosInf => Ok(DyEnd::Inf("+inf".into())),
        Endpoint::Finite(r) => Dyadic::from_rational(r).map(DyEnd::Dy).ok_or_else(|| format!("endpoint {r} is not dyadic")),
    }
}

fn from_dy(e: DyEnd) -> std::result::Result<Endpoint, String> {
    match e {
        DyEnd::Inf(s) if s == "-inf" => Ok(Endpoint::NegInf),
        DyEnd::Inf(s) if s == "+inf" => Ok(Endpoint::PosInf),
        DyEnd::Inf(s) => Err(format!("bad endpoint `{s}`")),
        DyEnd::Dy(d) => Ok(Endpoint::Finite(d.to_rational())),
    }
}

fn set_to_dy(s: &IntervalSet) -> std::result::Result<DySet, String> {
    let parts = s
        .parts()
        .iter()
        .map(|p| {
            Ok(DyPart { lo: to_dy(p.lo())?, hi: to_dy(p.hi())?, lo_closed: p.lo_closed(), hi_closed: p.hi_closed() })
        })
        .collect::<std::result::Result<_, String>>()?;
    Ok(DySet { parts })
}

fn set_from_dy(s: DySet) -> std::result::Result<IntervalSet, String> {
    let parts = s
        .parts
        .into_iter()
        .map(|p| {
            Interval::new(from_dy(p.lo)?, from_dy(p.hi)?, p.lo_closed, p.hi_closed).map_err(|e| e.to_string())
        })
        .collect::<std::result::Result<Vec<_>, String>>()?;
    Ok(IntervalSet::normalize(parts))
}

impl Serialize for EnclosedSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let slack = Dyadic::from_rational(&self.slack).ok_or_else(|| S::Error::custom("slack is not dyadic"))?;
        DyEnclosed {
            inner: set_to_dy(&self.inner).map_err(S::Error::custom)?,
            outer: set_to_dy(&self.outer).map_err(S::Error::custom)?,
            slack,
            authoritative: self.authoritative,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EnclosedSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = DyEnclosed::deserialize(d)?;
        Ok(EnclosedSet {
            inner: set_from_dy(raw.inner).map_err(D::Error::custom)?,
            outer: set_from_dy(raw.outer).map_err(D::Error::custom)?,
            slack: raw.slack.to_rational(),
            authoritative: raw.authoritative,
        })
    }
}
