use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::interval::Interval;
use super::rational::Rational;
use super::set::IntervalSet;
use crate::error::{Error, Result};

/// What a stream's tail bound measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    /// Total Lebesgue measure of all later batches.
    Length,
    /// Total of `log v - log u` over all later intervals `(u, v)`.
    LogLength,
}

/// Upper bound on what lies beyond a given depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailBound {
    Finite(Rational),
    /// The remaining batches have infinite total measure (e.g. a periodic
    /// family on a half-line). Such streams are still usable wherever only
    /// a bounded window is inspected.
    Unbounded,
}

impl TailBound {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            TailBound::Finite(r) => Some(r),
            TailBound::Unbounded => None,
        }
    }
}

impl fmt::Display for TailBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailBound::Finite(r) => write!(f, "{r}"),
            TailBound::Unbounded => f.write_str("unbounded"),
        }
    }
}

type BatchFn = Arc<dyn Fn(u64) -> Result<IntervalSet> + Send + Sync>;
type TailFn = Arc<dyn Fn(u64) -> Result<TailBound> + Send + Sync>;
type FrontierFn = Arc<dyn Fn(u64) -> Option<Interval> + Send + Sync>;

/// A countable interval family, produced one depth at a time.
///
/// Batches at distinct depths must be disjoint and `tail(d)` must bound
/// everything in batches `d+1, d+2, ...`. The optional frontier reports a
/// region on which batches `0..=d` already equal the whole family.
#[derive(Clone)]
pub struct LazyIntervalStream {
    batch: BatchFn,
    tail: TailFn,
    frontier: Option<FrontierFn>,
    kind: TailKind,
}

impl LazyIntervalStream {
    pub fn new(
        batch: impl Fn(u64) -> Result<IntervalSet> + Send + Sync + 'static,
        tail: impl Fn(u64) -> Result<TailBound> + Send + Sync + 'static,
    ) -> Self {
        LazyIntervalStream { batch: Arc::new(batch), tail: Arc::new(tail), frontier: None, kind: TailKind::Length }
    }

    pub fn with_frontier(mut self, f: impl Fn(u64) -> Option<Interval> + Send + Sync + 'static) -> Self {
        self.frontier = Some(Arc::new(f));
        self
    }

    pub fn with_kind(mut self, kind: TailKind) -> Self {
        self.kind = kind;
        self
    }

    /// A stream with finitely many batches; everything after is empty.
    pub fn finite(batches: Vec<IntervalSet>) -> Self {
        let batches = Arc::new(batches);
        let b = batches.clone();
        LazyIntervalStream::new(
            move |d| Ok(b.get(d as usize).cloned().unwrap_or_default()),
            |_| Ok(TailBound::Finite(Rational::zero())),
        )
        .with_frontier(|_| Some(Interval::everything()))
    }

    pub fn empty() -> Self {
        LazyIntervalStream::finite(Vec::new())
    }

    pub fn kind(&self) -> TailKind {
        self.kind
    }

    pub fn batch(&self, depth: u64) -> Result<IntervalSet> {
        (self.batch)(depth)
    }

    pub fn tail_bound(&self, depth: u64) -> Result<TailBound> {
        (self.tail)(depth)
    }

    pub fn frontier(&self, depth: u64) -> Option<Interval> {
        self.frontier.as_ref().and_then(|f| f(depth))
    }

    pub fn batches(&self, depth: i64) -> Result<Vec<IntervalSet>> {
        let depth = check_depth(depth)?;
        (0..=depth).map(|d| self.batch(d)).collect()
    }

    /// Union of batches `0..=depth` together with the tail bound beyond it.
    pub fn take(&self, depth: i64) -> Result<(IntervalSet, TailBound)> {
        let batches = self.batches(depth)?;
        let parts = batches.into_iter().flat_map(IntervalSet::into_parts).collect();
        Ok((IntervalSet::normalize(parts), self.tail_bound(depth as u64)?))
    }

    /// Like [`take`](Self::take), but fails unless the frontier at `depth`
    /// covers `region`.
    pub fn take_covering(&self, depth: i64, region: &Interval) -> Result<(IntervalSet, TailBound)> {
        let d = check_depth(depth)?;
        match self.frontier(d) {
            Some(f) if f.contains_interval(region) => self.take(depth),
            Some(f) => Err(Error::HorizonShortfall(format!("depth {d} is complete on {f}, need {region}"))),
            None => Err(Error::HorizonShortfall(format!("stream declares no frontier; need {region}"))),
        }
    }
}

impl fmt::Debug for LazyIntervalStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyIntervalStream").field("kind", &self.kind).finish_non_exhaustive()
    }
}

fn check_depth(depth: i64) -> Result<u64> {
    u64::try_from(depth).map_err(|_| Error::NegativeDepth(depth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_depth_rejected() {
        assert_eq!(LazyIntervalStream::empty().take(-1).unwrap_err(), Error::NegativeDepth(-1));
    }

    #[test]
    fn finite_stream_take() {
        let one = IntervalSet::from_interval(Interval::open(Rational::zero(), Rational::one()).unwrap());
        let s = LazyIntervalStream::finite(vec![IntervalSet::empty(), one.clone()]);
        let (set, tail) = s.take(5).unwrap();
        assert_eq!(set, one);
        assert_eq!(tail, TailBound::Finite(Rational::zero()));
        assert!(s.take(0).unwrap().0.is_empty());
    }
}
