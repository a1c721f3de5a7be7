//! A compact `C = e^{-F} ∪ -e^{-F} ∪ {0}` with full density at 0 that contains
//! no infinite geometric progression, built from the glued set `F`.

use serde_json::json;

use super::theorem13::Theorem13;
use super::Construction;
use crate::error::{Error, Result};
use crate::sets::directed::exp_neg;
use crate::sets::{Interval, IntervalSet, LazyIntervalStream, Rational, TailBound};
use crate::transforms::{exp_neg_image, EnclosedSet};

#[derive(Clone)]
pub struct Theorem11 {
    pub base: Theorem13,
    /// `F` is used on `[0, cutoff]`; the image of the rest lies in `[-e^{-cutoff}, e^{-cutoff}]`.
    pub cutoff: Rational,
    pub bits: u32,
    pub kept: EnclosedSet,
}

impl Theorem11 {
    pub fn new(base: &Theorem13, cutoff: &Rational, bits: u32) -> Result<Self> {
        if !cutoff.is_positive() {
            return Err(Error::param("cutoff", "must be positive"));
        }
        let x = cutoff.clone().min(base.complete_below()?);
        let f = IntervalSet::from_interval(Interval::closed(Rational::zero(), x.clone())?).difference(&base.removed()?);
        let pos = exp_neg_image(&f, bits)?;
        let e = exp_neg(&x, bits).hi;
        let unknown = EnclosedSet {
            inner: IntervalSet::from_interval(Interval::point(Rational::zero())),
            outer: IntervalSet::from_interval(Interval::closed(-&e, e.clone())?),
            slack: e.mul_pow2(1),
            authoritative: pos.authoritative,
        };
        let kept = pos.union(&pos.reflect()).union(&unknown);
        Ok(Theorem11 { base: base.clone(), cutoff: x, bits, kept })
    }

    pub fn construction(&self) -> Construction {
        let me = self.clone();
        let me2 = self.clone();
        let removed = LazyIntervalStream::new(
            move |b| {
                let g = me.base.window_removed(b as usize + 1)?;
                let g = g.clip(&Interval::closed(Rational::zero(), me.cutoff.clone())?);
                let img = exp_neg_image(&g, me.bits)?.outer;
                Ok(img.union(&img.reflect()))
            },
            move |b| {
                let b = b as usize;
                let next = if b + 1 < me2.base.depth() {
                    me2.base.windows[b + 1].lo.clone()
                } else {
                    me2.base.next_window_start()?
                };
                let edge = next.min(me2.cutoff.clone());
                Ok(TailBound::Finite(exp_neg(&edge, me2.bits).hi.mul_pow2(1)))
            },
        );
        Construction {
            kind: "theorem11".into(),
            params: json!({
                "depth": self.base.depth(),
                "cutoff": self.cutoff,
                "precision_bits": self.bits,
                "windows": self.base.windows,
            }),
            domain: Interval::closed(-Rational::one(), Rational::one()).expect("unit interval"),
            removed,
        }
    }
}

pub fn theorem11_set(base: &Theorem13, cutoff: &Rational, bits: u32) -> Result<(EnclosedSet, Construction, Theorem11)> {
    let t = Theorem11::new(base, cutoff, bits)?;
    Ok((t.kept.clone(), t.construction(), t))
}
