//! Directed-rounding enclosures for `log`, `exp` and `n`-th roots of rationals.
//!
//! All evaluation happens in fixed-point interval arithmetic over big
//! integers: every value carries a `[lo, hi]` pair scaled by `2^W`, and every
//! truncation rounds `lo` down and `hi` up. Results are finally rounded
//! outward to `precision_bits` significant bits.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::Rational;
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_BITS: u32 = 128;
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

/// Rounding direction of a one-sided approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    TowardNegInf,
    TowardPosInf,
}

/// `mantissa * 2^exponent`, normalized so the mantissa is odd (or zero with
/// exponent zero).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Dyadic { mantissa, exponent: 0 };
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Dyadic { mantissa: mantissa >> tz as usize, exponent: exponent + tz as i64 }
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn to_rational(&self) -> Rational {
        Rational::int(self.mantissa.clone()).mul_pow2(self.exponent)
    }

    /// Exact conversion; `None` unless the denominator is a power of two.
    pub fn from_rational(r: &Rational) -> Option<Dyadic> {
        let d = r.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz as usize) != BigInt::one() {
            return None;
        }
        Some(Dyadic::new(r.numer().clone(), -(tz as i64)))
    }

    /// Rounds `r` to `bits` significant bits in the given direction.
    pub fn round(r: &Rational, dir: Rounding, bits: u32) -> Dyadic {
        if r.is_zero() {
            return Dyadic::zero();
        }
        let bits = bits.max(2) as i64;
        let mag = r.numer().bits() as i64 - r.denom().bits() as i64;
        // |r| * 2^(-e) lands in [2^(bits-2), 2^(bits+1)); close enough for rounding.
        let e = mag - bits;
        let scaled = r.mul_pow2(-e);
        let m = match dir {
            Rounding::TowardNegInf => scaled.floor(),
            Rounding::TowardPosInf => scaled.ceil(),
        };
        Dyadic::new(m, e)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_rational().cmp(&other.to_rational())
    }
}

#[derive(Serialize, Deserialize)]
struct DyadicJson {
    m: String,
    e: i64,
}

impl Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DyadicJson { m: self.mantissa.to_string(), e: self.exponent }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DyadicJson::deserialize(d)?;
        let m: BigInt = j.m.parse().map_err(serde::de::Error::custom)?;
        Ok(Dyadic::new(m, j.e))
    }
}

/// A one-sided dyadic approximation of a real number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedReal {
    pub value: Dyadic,
    pub direction: Rounding,
    pub precision_bits: u32,
}

/// The transcendental functions with certified enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Log,
    Exp,
    Root(u32),
}

impl DirectedReal {
    /// Evaluates `f(x)` rounded in `direction`.
    pub fn eval(f: Func, x: &Rational, direction: Rounding, precision_bits: u32) -> Result<DirectedReal> {
        let b = match f {
            Func::Log => log(x, precision_bits)?,
            Func::Exp => exp(x, precision_bits),
            Func::Root(n) => root(x, n, precision_bits)?,
        };
        let r = match direction {
            Rounding::TowardNegInf => b.lo,
            Rounding::TowardPosInf => b.hi,
        };
        let value = Dyadic::from_rational(&r).unwrap_or_else(|| Dyadic::round(&r, direction, precision_bits));
        Ok(DirectedReal { value, direction, precision_bits })
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::Yes => "yes",
            Truth::No => "no",
            Truth::Unknown => "unknown",
        })
    }
}

/// Three-valued outcome of a comparison against an enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    Yes,
    No,
    Unknown,
}

impl Truth {
    pub fn from_bool(b: bool) -> Truth {
        if b {
            Truth::Yes
        } else {
            Truth::No
        }
    }

    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::No, _) | (_, Truth::No) => Truth::No,
            (Truth::Yes, Truth::Yes) => Truth::Yes,
            _ => Truth::Unknown,
        }
    }

}

impl std::ops::Not for Truth {
    type Output = Truth;

    fn not(self) -> Truth {
        match self {
            Truth::Yes => Truth::No,
            Truth::No => Truth::Yes,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

/// Closed enclosure `lo <= x <= hi` with rational (usually dyadic) ends.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: Rational,
    pub hi: Rational,
}

impl Bracket {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi, "inverted bracket");
        Bracket { lo, hi }
    }

    pub fn exact(x: Rational) -> Self {
        Bracket { lo: x.clone(), hi: x }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn neg(&self) -> Bracket {
        Bracket { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn add(&self, o: &Bracket) -> Bracket {
        Bracket { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Bracket) -> Bracket {
        Bracket { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn add_rational(&self, r: &Rational) -> Bracket {
        Bracket { lo: &self.lo + r, hi: &self.hi + r }
    }

    pub fn mul_rational(&self, r: &Rational) -> Bracket {
        let a = &self.lo * r;
        let b = &self.hi * r;
        if a <= b {
            Bracket { lo: a, hi: b }
        } else {
            Bracket { lo: b, hi: a }
        }
    }

    pub fn mul(&self, o: &Bracket) -> Bracket {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Bracket { lo, hi }
    }

    /// Hull of two brackets.
    pub fn hull(&self, o: &Bracket) -> Bracket {
        Bracket { lo: self.lo.clone().min(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()) }
    }

    pub fn overlaps(&self, o: &Bracket) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// Is the enclosed value `< x`?
    pub fn lt(&self, x: &Rational) -> Truth {
        if &self.hi < x {
            Truth::Yes
        } else if &self.lo >= x {
            Truth::No
        } else {
            Truth::Unknown
        }
    }

    /// Is the enclosed value `<= x`?
    pub fn le(&self, x: &Rational) -> Truth {
        if &self.hi <= x {
            Truth::Yes
        } else if &self.lo > x {
            Truth::No
        } else {
            Truth::Unknown
        }
    }

    pub fn gt(&self, x: &Rational) -> Truth {
        !self.le(x)
    }

    pub fn ge(&self, x: &Rational) -> Truth {
        !self.lt(x)
    }

    /// Rounds both ends outward to `bits` significant bits.
    pub fn round_outward(&self, bits: u32) -> Bracket {
        let lo = Dyadic::from_rational(&self.lo)
            .filter(|d| d.mantissa.bits() <= bits as u64)
            .unwrap_or_else(|| Dyadic::round(&self.lo, Rounding::TowardNegInf, bits));
        let hi = Dyadic::from_rational(&self.hi)
            .filter(|d| d.mantissa.bits() <= bits as u64)
            .unwrap_or_else(|| Dyadic::round(&self.hi, Rounding::TowardPosInf, bits));
        Bracket { lo: lo.to_rational(), hi: hi.to_rational() }
    }
}

/// Runs `f` at increasing precision until it produces a conclusive answer.
///
/// Precision doubles from `start` until `cap`; an answer still `None` at the
/// cap becomes [`Error::Inconclusive`].
pub fn escalate<T>(start: u32, cap: u32, what: &str, mut f: impl FnMut(u32) -> Result<Option<T>>) -> Result<T> {
    let mut bits = start.max(16);
    loop {
        if let Some(v) = f(bits)? {
            return Ok(v);
        }
        if bits >= cap {
            return Err(Error::Inconclusive { what: what.to_string(), cap });
        }
        bits = (bits * 2).min(cap);
    }
}

// ---------------------------------------------------------------------------
// Fixed-point interval kernel
// ---------------------------------------------------------------------------

/// `[lo, hi] * 2^-scale`.
#[derive(Clone, Debug)]
struct Fx {
    lo: BigInt,
    hi: BigInt,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

struct Kernel {
    scale: usize,
    unit: BigInt,
}

impl Kernel {
    fn new(scale: u32) -> Self {
        let scale = scale as usize;
        Kernel { scale, unit: BigInt::one() << scale }
    }

    fn fx(&self, r: &Rational) -> Fx {
        let n = r.numer() << self.scale;
        Fx { lo: floor_div(&n, r.denom()), hi: ceil_div(&n, r.denom()) }
    }

    fn int(&self, k: i64) -> Fx {
        let v = BigInt::from(k) << self.scale;
        Fx { lo: v.clone(), hi: v }
    }

    fn add(&self, a: &Fx, b: &Fx) -> Fx {
        Fx { lo: &a.lo + &b.lo, hi: &a.hi + &b.hi }
    }

    fn mul(&self, a: &Fx, b: &Fx) -> Fx {
        let c = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let lo = c.iter().min().unwrap();
        let hi = c.iter().max().unwrap();
        Fx { lo: floor_div(lo, &self.unit), hi: ceil_div(hi, &self.unit) }
    }

    fn mul_int(&self, a: &Fx, k: i64) -> Fx {
        let k = BigInt::from(k);
        let x = &a.lo * &k;
        let y = &a.hi * &k;
        if x <= y {
            Fx { lo: x, hi: y }
        } else {
            Fx { lo: y, hi: x }
        }
    }

    fn div_int(&self, a: &Fx, k: u64) -> Fx {
        let k = BigInt::from(k);
        Fx { lo: floor_div(&a.lo, &k), hi: ceil_div(&a.hi, &k) }
    }

    fn to_bracket(&self, a: &Fx) -> Bracket {
        let s = -(self.scale as i64);
        Bracket { lo: Rational::int(a.lo.clone()).mul_pow2(s), hi: Rational::int(a.hi.clone()).mul_pow2(s) }
    }

    /// `atanh(z)` for `z` in `[0, 1/3]` given as an exact rational.
    fn atanh(&self, z: &Rational) -> Fx {
        debug_assert!(!z.is_negative() && *z <= Rational::frac(1, 3));
        if z.is_zero() {
            return self.int(0);
        }
        let zf = self.fx(z);
        let z2 = self.mul(&zf, &zf);
        let mut pow = zf; // z^(2i+1)
        let mut sum = self.int(0);
        let mut i: u64 = 0;
        let eps = BigInt::one();
        loop {
            let term = self.div_int(&pow, 2 * i + 1);
            sum = self.add(&sum, &term);
            pow = self.mul(&pow, &z2);
            i += 1;
            if pow.hi <= eps {
                break;
            }
        }
        // Remainder: sum_{j>=i} z^(2j+1)/(2j+1) <= pow / (1 - z^2) <= pow * 9/8.
        let rem_hi = ceil_div(&(&pow.hi * BigInt::from(9)), &BigInt::from(8)) + 1;
        Fx { lo: sum.lo, hi: sum.hi + rem_hi }
    }

    fn ln2(&self) -> Fx {
        let a = self.atanh(&Rational::frac(1, 3));
        self.mul_int(&a, 2)
    }
}

/// Enclosure of `ln 2`.
pub fn ln2(bits: u32) -> Bracket {
    let k = Kernel::new(bits + 16);
    k.to_bracket(&k.ln2()).round_outward(bits)
}

/// Enclosure of `ln x` for rational `x > 0`.
pub fn log(x: &Rational, bits: u32) -> Result<Bracket> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("log of non-positive value {x}")));
    }
    if *x == Rational::one() {
        return Ok(Bracket::exact(Rational::zero()));
    }
    // x = 2^k * y with y in [1, 2).
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut y = x.mul_pow2(-k);
    while y >= Rational::int(2) {
        y = y.mul_pow2(-1);
        k += 1;
    }
    while y < Rational::one() {
        y = y.mul_pow2(1);
        k -= 1;
    }
    // Keep z = (y-1)/(y+1) small by folding y into [2/3, 4/3).
    if y > Rational::frac(4, 3) {
        y = y.mul_pow2(-1);
        k += 1;
    }
    let guard = 24 + 64 - (k.unsigned_abs().max(1)).leading_zeros();
    let kern = Kernel::new(bits + guard);
    let z = (&y - Rational::one()).checked_div(&(&y + Rational::one()))?;
    let atanh = if z.is_negative() {
        let a = kern.atanh(&-&z);
        Fx { lo: -a.hi, hi: -a.lo }
    } else {
        kern.atanh(&z)
    };
    let mut acc = kern.mul_int(&atanh, 2);
    if k != 0 {
        acc = kern.add(&acc, &kern.mul_int(&kern.ln2(), k));
    }
    Ok(kern.to_bracket(&acc).round_outward(bits))
}

/// Enclosure of `e^x` for rational `x`.
pub fn exp(x: &Rational, bits: u32) -> Bracket {
    if x.is_zero() {
        return Bracket::exact(Rational::one());
    }
    if x.is_negative() {
        let pos = exp_positive(&-x, bits + 8);
        // 1/[lo, hi] = [1/hi, 1/lo]; lo >= 1 so the reciprocal is safe.
        let lo = pos.hi.recip().expect("exp is positive");
        let hi = pos.lo.recip().expect("exp is positive");
        return Bracket { lo, hi }.round_outward(bits);
    }
    exp_positive(x, bits).round_outward(bits)
}

fn exp_positive(x: &Rational, bits: u32) -> Bracket {
    // Halve until r = x / 2^s <= 1/2, then square s times.
    let mut s: u32 = 0;
    let mut r = x.clone();
    while r > Rational::frac(1, 2) {
        r = r.mul_pow2(-1);
        s += 1;
    }
    let kern = Kernel::new(bits + s + 32);
    let rf = kern.fx(&r);
    let mut sum = kern.int(1);
    let mut term = kern.int(1);
    let mut i: u64 = 1;
    loop {
        term = kern.div_int(&kern.mul(&term, &rf), i);
        sum = kern.add(&sum, &term);
        i += 1;
        if term.hi <= BigInt::one() {
            break;
        }
    }
    // Remainder after the last term t_{i-1}: t_{i-1} * r/i * 1/(1-r) <= t_{i-1} (r <= 1/2, i >= 2).
    sum.hi += &term.hi + 1;
    for _ in 0..s {
        sum = kern.mul(&sum, &sum);
    }
    kern.to_bracket(&sum)
}

/// Enclosure of `x^(1/n)` for rational `x >= 0` and `n >= 1`.
pub fn root(x: &Rational, n: u32, bits: u32) -> Result<Bracket> {
    if n == 0 {
        return Err(Error::param("n", "root index must be positive"));
    }
    if x.is_negative() {
        return Err(Error::Domain(format!("root of negative value {x}")));
    }
    if x.is_zero() || n == 1 {
        return Ok(Bracket::exact(x.clone()));
    }
    // Integer part magnitude of the root, to choose an absolute scale.
    let mag = (x.numer().bits() as i64 - x.denom().bits() as i64) / n as i64;
    let w = (bits as i64 + 8 - mag).max(8) as usize;
    let scaled = x.mul_pow2((n as usize * w) as i64);
    let lo_arg = scaled.floor();
    let hi_arg = scaled.ceil();
    let lo = lo_arg.nth_root(n);
    let mut hi = hi_arg.nth_root(n);
    if num_traits::pow(hi.clone(), n as usize) < hi_arg {
        hi += 1;
    }
    let s = -(w as i64);
    Ok(Bracket { lo: Rational::int(lo).mul_pow2(s), hi: Rational::int(hi).mul_pow2(s) }.round_outward(bits))
}

/// Enclosure of `-ln x`.
pub fn neg_log(x: &Rational, bits: u32) -> Result<Bracket> {
    Ok(log(x, bits)?.neg())
}

/// Enclosure of `e^-x`.
pub fn exp_neg(x: &Rational, bits: u32) -> Bracket {
    exp(&-x, bits)
}

/// Is this bracket's absolute width at most `2^-k`?
pub fn narrower_than_pow2(b: &Bracket, k: i64) -> bool {
    b.width() <= Rational::one().mul_pow2(-k)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference digits (50 places) for independent checks.
    const LN2: &str = "0.69314718055994530941723212145817656807550013436025";
    const E: &str = "2.71828182845904523536028747135266249775724709369995";
    const SQRT2: &str = "1.41421356237309504880168872420969807856967187537694";

    fn dec(s: &str) -> Rational {
        let (i, f) = s.split_once('.').unwrap();
        let den = num_traits::pow(BigInt::from(10), f.len());
        let num: BigInt = format!("{i}{f}").parse().unwrap();
        Rational::new(num, den).unwrap()
    }

    fn near(b: &Bracket, reference: &str, tol_exp: i64) {
        let r = dec(reference);
        let tol = Rational::one().mul_pow2(-tol_exp);
        assert!(b.lo <= &r + &tol && &r - &tol <= b.hi, "{b:?} vs {reference}");
    }

    #[test]
    fn ln2_brackets_reference() {
        let b = ln2(128);
        near(&b, LN2, 160);
        assert!(narrower_than_pow2(&b, 120));
    }

    #[test]
    fn log_of_one_is_exact_zero() {
        assert_eq!(log(&Rational::one(), 128).unwrap(), Bracket::exact(Rational::zero()));
        assert_eq!(exp(&Rational::zero(), 64), Bracket::exact(Rational::one()));
    }

    #[test]
    fn log_rejects_non_positive() {
        assert!(log(&Rational::zero(), 64).is_err());
        assert!(log(&Rational::int(-2), 64).is_err());
    }

    #[test]
    fn exp_one_brackets_e() {
        let b = exp(&Rational::one(), 128);
        near(&b, E, 160);
        assert!(narrower_than_pow2(&b, 120));
    }

    #[test]
    fn sqrt2_bracket() {
        let b = root(&Rational::int(2), 2, 128).unwrap();
        near(&b, SQRT2, 160);
        assert!(narrower_than_pow2(&b, 120));
        let cube = root(&Rational::int(27), 3, 64).unwrap();
        assert!(cube.contains(&Rational::int(3)));
    }

    #[test]
    fn log_exp_roundtrip_contains_argument() {
        for (n, d) in [(1, 3), (7, 2), (1, 1000), (123456, 7)] {
            let x = Rational::frac(n, d);
            let l = log(&x, 128).unwrap();
            let lo = exp(&l.lo, 128).lo;
            let hi = exp(&l.hi, 128).hi;
            assert!(lo <= x && x <= hi);
        }
    }

    #[test]
    fn directed_real_sides() {
        let x = Rational::frac(5, 3);
        let lo = DirectedReal::eval(Func::Log, &x, Rounding::TowardNegInf, 96).unwrap();
        let hi = DirectedReal::eval(Func::Log, &x, Rounding::TowardPosInf, 96).unwrap();
        assert!(lo.value < hi.value);
        assert_eq!(lo.precision_bits, 96);
    }

    #[test]
    fn escalation_hits_cap() {
        let r: Result<()> = escalate(64, 256, "never", |_| Ok(None));
        assert!(matches!(r, Err(Error::Inconclusive { cap: 256, .. })));
        let v = escalate(64, 1024, "at 256", |b| Ok((b >= 256).then_some(b))).unwrap();
        assert_eq!(v, 256);
    }

    #[test]
    fn dyadic_rounding_direction() {
        let r = Rational::frac(1, 3);
        let d = Dyadic::round(&r, Rounding::TowardNegInf, 20).to_rational();
        let u = Dyadic::round(&r, Rounding::TowardPosInf, 20).to_rational();
        assert!(d < r && r < u);
        assert!(&u - &d <= Rational::one().mul_pow2(-19));
        assert_eq!(Dyadic::from_rational(&Rational::frac(3, 8)), Some(Dyadic::new(BigInt::from(3), -3)));
        assert_eq!(Dyadic::from_rational(&Rational::frac(1, 3)), None);
    }
}
