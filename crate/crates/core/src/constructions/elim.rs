//! Countable elimination of arithmetic progressions with prescribed differences.
//!
//! For each index `n` with `φ(n) = (i, j)` the open interval
//! `I_n = J_j + m_n Δ_i`, `J_j = ((j-1)ε/2, (j+1)ε/2)`, is removed from
//! `[0, ∞)`. The anchors `m_n` are the least positive integers keeping
//! consecutive intervals more than one unit apart.

use std::sync::{Arc, Mutex};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::enumerate::{Pairing, RationalOrder};
use super::Construction;
use crate::error::{Error, Result};
use crate::sets::{Endpoint, Interval, IntervalSet, LazyIntervalStream, Rational, TailBound};

/// Source of the differences `Δ_1, Δ_2, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaSource {
    /// A finite list, reused cyclically so that every index is paired.
    List(Vec<Rational>),
    /// An enumeration of all positive rationals.
    Enumeration(RationalOrder),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElimSchedule {
    pub deltas: DeltaSource,
    pub epsilon: Rational,
    pub pairing: Pairing,
    /// Largest anchor accepted before giving up.
    pub anchor_cap: u64,
}

impl ElimSchedule {
    pub fn new(deltas: DeltaSource, epsilon: Rational) -> Result<Self> {
        if !epsilon.is_positive() || epsilon >= Rational::one() {
            return Err(Error::param("epsilon", format!("must lie in (0, 1), got {epsilon}")));
        }
        if let DeltaSource::List(v) = &deltas {
            if v.is_empty() {
                return Err(Error::param("deltas", "list is empty"));
            }
            if let Some(bad) = v.iter().find(|d| !d.is_positive()) {
                return Err(Error::param("deltas", format!("differences must be positive, got {bad}")));
            }
        }
        Ok(ElimSchedule { deltas, epsilon, pairing: Pairing::Cantor, anchor_cap: 1 << 40 })
    }
}

/// One removed interval with its provenance in the schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElimInterval {
    pub index: u64,
    pub phi1: u64,
    pub phi2: u64,
    pub delta: Rational,
    pub anchor: u64,
    pub lo: Rational,
    pub hi: Rational,
}

impl ElimInterval {
    pub fn interval(&self) -> Interval {
        Interval::open(self.lo.clone(), self.hi.clone()).expect("positive length")
    }
}

#[derive(Default)]
struct State {
    intervals: Vec<ElimInterval>,
    deltas: Vec<Rational>,
}

/// Lazily extended, memoized list of the removed intervals `I_1, I_2, ...`.
#[derive(Clone)]
pub struct ElimGenerator {
    schedule: Arc<ElimSchedule>,
    state: Arc<Mutex<State>>,
}

impl ElimGenerator {
    pub fn new(schedule: ElimSchedule) -> Self {
        ElimGenerator { schedule: Arc::new(schedule), state: Arc::new(Mutex::new(State::default())) }
    }

    pub fn schedule(&self) -> &ElimSchedule {
        &self.schedule
    }

    fn delta(&self, st: &mut State, i: u64) -> Rational {
        match &self.schedule.deltas {
            DeltaSource::List(v) => v[((i - 1) % v.len() as u64) as usize].clone(),
            DeltaSource::Enumeration(order) => {
                if st.deltas.len() < i as usize {
                    st.deltas = order.prefix((i as usize).max(2 * st.deltas.len()));
                }
                st.deltas[(i - 1) as usize].clone()
            }
        }
    }

    fn extend(&self, st: &mut State) -> Result<()> {
        let s = &self.schedule;
        let n = st.intervals.len() as u64 + 1;
        let (i, j) = s.pairing.unpair(n);
        let delta = self.delta(st, i);
        let half = s.epsilon.mul_pow2(-1);
        let j_lo = &half * Rational::int(j as i64 - 1);
        let j_hi = &half * Rational::int(j as i64 + 1);
        let anchor = match st.intervals.last() {
            None => 1,
            Some(prev) => {
                // least m >= 1 with j_lo + mΔ > prev.hi + 1
                let need = (&prev.hi + Rational::one() - &j_lo).checked_div(&delta)?;
                let m = need.floor() + 1u32;
                let m = m.to_u64().filter(|&m| m <= s.anchor_cap).ok_or_else(|| {
                    Error::Schedule(format!("anchor for index {n} exceeds cap {}", s.anchor_cap))
                })?;
                m.max(1)
            }
        };
        let shift = &delta * Rational::int(anchor);
        st.intervals.push(ElimInterval {
            index: n,
            phi1: i,
            phi2: j,
            delta,
            anchor,
            lo: &j_lo + &shift,
            hi: &j_hi + &shift,
        });
        Ok(())
    }

    /// `I_n` for `n >= 1`.
    pub fn get(&self, n: u64) -> Result<ElimInterval> {
        assert!(n >= 1, "intervals are indexed from 1");
        let mut st = self.state.lock().expect("generator lock");
        while (st.intervals.len() as u64) < n {
            self.extend(&mut st)?;
        }
        Ok(st.intervals[(n - 1) as usize].clone())
    }

    /// All intervals meeting `[lo, hi)`, in index order.
    pub fn meeting(&self, lo: &Rational, hi: &Rational) -> Result<Vec<ElimInterval>> {
        let mut st = self.state.lock().expect("generator lock");
        while st.intervals.last().is_none_or(|last| &last.lo < hi) {
            self.extend(&mut st)?;
        }
        let start = st.intervals.partition_point(|iv| &iv.hi <= lo);
        Ok(st.intervals[start..].iter().take_while(|iv| &iv.lo < hi).cloned().collect())
    }

    /// Every generated interval with `lo < horizon`.
    pub fn up_to(&self, horizon: &Rational) -> Result<Vec<ElimInterval>> {
        let mut st = self.state.lock().expect("generator lock");
        while st.intervals.last().is_none_or(|last| &last.lo < horizon) {
            self.extend(&mut st)?;
        }
        Ok(st.intervals.iter().take_while(|iv| &iv.lo < horizon).cloned().collect())
    }
}

/// The elimination construction; batch `n` of the removed stream is `{I_n}`
/// (batch 0 is empty).
pub fn countable_elim_set(schedule: ElimSchedule) -> Result<(Construction, ElimGenerator)> {
    if !schedule.pairing.covers_prefix(8) {
        return Err(Error::Schedule("pairing does not cover the 8x8 prefix".into()));
    }
    let generator = ElimGenerator::new(schedule.clone());
    let g = generator.clone();
    let g2 = generator.clone();
    let removed = LazyIntervalStream::new(
        move |d| {
            if d == 0 {
                return Ok(IntervalSet::empty());
            }
            Ok(IntervalSet::from_interval(g.get(d)?.interval()))
        },
        |_| Ok(TailBound::Unbounded),
    )
    .with_frontier(move |d| {
        let next = g2.get(d + 1).ok()?;
        Interval::new(Endpoint::NegInf, next.lo.into(), false, true).ok()
    });
    let c = Construction {
        kind: "elim".into(),
        params: json!({
            "epsilon": schedule.epsilon,
            "deltas": schedule.deltas,
            "pairing": schedule.pairing,
        }),
        domain: Interval::closed_ray(Rational::zero()),
        removed,
    };
    Ok((c, generator))
}
