//! Growth conditions on a sequence: unit gaps `a_{n+1} - a_n >= 1` and
//! subexponential growth `log(a_n)/n -> 0`.

use serde::Serialize;

use super::sequence::SequenceSpec;
use crate::error::{Error, Result};
use crate::sets::directed::log;
use crate::sets::{Bracket, Rational};
use crate::verdict::Label;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfilePoint {
    pub n: u64,
    pub lo: Rational,
    pub hi: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthProfile {
    pub shift: u64,
    pub points: Vec<ProfilePoint>,
    /// Least `n0` such that the profile is conclusively strictly decreasing on `[n0, prefix]`.
    pub decreasing_from: Option<u64>,
    /// True when the profile does not visibly decay: its last value is at
    /// least 3/4 of its value at the midpoint of the prefix.
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KpReport {
    pub prefix_len: u64,
    pub gaps_hold: bool,
    pub first_gap_violation: Option<u64>,
    pub increasing: bool,
    pub first_non_increase: Option<u64>,
    pub gap_label: Label,
    pub profile: GrowthProfile,
    pub shifted: GrowthProfile,
    pub growth_label: Label,
}

impl KpReport {
    /// Both conditions look satisfied on the prefix.
    pub fn passes(&self) -> bool {
        self.gaps_hold && !self.profile.flagged && !self.shifted.flagged
    }
}

fn profile(a: &SequenceSpec, prefix_len: u64, shift: u64, bits: u32) -> Result<GrowthProfile> {
    let mut points = Vec::new();
    for n in 1..=prefix_len {
        let v = a.term(n + shift)?;
        if !v.is_positive() {
            continue;
        }
        let b: Bracket = log(&v, bits)?.mul_rational(&Rational::frac(1, n as i64));
        points.push(ProfilePoint { n, lo: b.lo, hi: b.hi });
    }
    let mut decreasing_from = None;
    if let Some(last) = points.last() {
        let mut start = last.n;
        for w in points.windows(2).rev() {
            if w[0].n + 1 == w[1].n && w[1].hi < w[0].lo {
                start = w[0].n;
            } else {
                break;
            }
        }
        decreasing_from = Some(start);
    }
    let flagged = match (points.iter().find(|p| p.n >= prefix_len / 2), points.last()) {
        (Some(mid), Some(last)) if mid.n < last.n => last.lo >= &mid.hi * &Rational::frac(3, 4),
        _ => false,
    };
    Ok(GrowthProfile { shift, points, decreasing_from, flagged })
}

pub fn kp_condition_check(a: &SequenceSpec, prefix_len: u64, shift: u64, bits: u32) -> Result<KpReport> {
    if prefix_len < 2 {
        return Err(Error::param("prefix_len", "need at least two terms"));
    }
    if let Some(len) = a.len() {
        if len < prefix_len + shift {
            return Err(Error::param("prefix_len", format!("sequence has only {len} terms")));
        }
    }
    let terms = (1..=prefix_len).map(|n| a.term(n)).collect::<Result<Vec<_>>>()?;
    let mut first_gap_violation = None;
    let mut first_non_increase = None;
    for (i, w) in terms.windows(2).enumerate() {
        let gap = &w[1] - &w[0];
        let n = i as u64 + 1;
        if first_gap_violation.is_none() && gap < Rational::one() {
            first_gap_violation = Some(n);
        }
        if first_non_increase.is_none() && !gap.is_positive() {
            first_non_increase = Some(n);
        }
    }
    Ok(KpReport {
        prefix_len,
        gaps_hold: first_gap_violation.is_none(),
        first_gap_violation,
        increasing: first_non_increase.is_none(),
        first_non_increase,
        gap_label: Label::ProvedExact,
        profile: profile(a, prefix_len, 0, bits)?,
        shifted: profile(a, prefix_len, shift, bits)?,
        growth_label: Label::EvidenceOnly,
    })
}
