//! Builders for the explicit sets: each returns the removed part as a
//! [`LazyIntervalStream`] together with the domain it is removed from.

pub mod bradford;
pub mod cantor;
pub mod elim;
pub mod enumerate;
pub mod equidistribute;
pub mod glue;
pub mod kp;
pub mod manifest;
pub mod monster;
pub mod sequence;
pub mod theorem11;
pub mod theorem13;

use std::fmt;

use crate::error::{Error, Result};
use crate::sets::{Interval, IntervalSet, LazyIntervalStream, Rational};

pub use bradford::{bradford_set, ApKillChecker, Bradford};
pub use cantor::{symmetric_cantor, CantorSpec};
pub use elim::{countable_elim_set, DeltaSource, ElimSchedule};
pub use enumerate::{Pairing, RationalOrder};
pub use equidistribute::equidistribute_set;
pub use glue::{glue_cover_region, glue_cover_search, GlueCertificate, GlueOptions, GlueRegion};
pub use kp::{kp_condition_check, KpReport};
pub use manifest::ConstructionManifest;
pub use monster::{density_monster, DensityMonster, DensityTarget};
pub use sequence::SequenceSpec;
pub use theorem11::{theorem11_set, Theorem11};
pub use theorem13::{theorem13_set, Theorem13};

/// A kept set described as `domain` minus the union of a removed stream.
#[derive(Clone)]
pub struct Construction {
    pub kind: String,
    pub params: serde_json::Value,
    pub domain: Interval,
    pub removed: LazyIntervalStream,
}

impl Construction {
    /// Kept set restricted to `region`, using removed batches up to `depth`.
    /// Fails unless the stream is complete on `region` at that depth.
    pub fn kept_on(&self, region: &Interval, depth: i64) -> Result<IntervalSet> {
        let (removed, _) = self.removed.take_covering(depth, region)?;
        let base = IntervalSet::from_interval(self.domain.clone()).clip(region);
        Ok(base.difference(&removed))
    }

    /// Smallest depth whose frontier covers `region`, searching up to `max_depth`.
    pub fn depth_covering(&self, region: &Interval, max_depth: u64) -> Result<u64> {
        let covers = |d: u64| self.removed.frontier(d).is_some_and(|f| f.contains_interval(region));
        if !covers(max_depth) {
            return Err(Error::HorizonShortfall(format!("no depth up to {max_depth} covers {region}")));
        }
        let (mut lo, mut hi) = (0u64, max_depth);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if covers(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }

    /// Kept set on `region` at the least depth that covers it.
    pub fn kept_covering(&self, region: &Interval, max_depth: u64) -> Result<IntervalSet> {
        let d = self.depth_covering(region, max_depth)?;
        self.kept_on(region, d as i64)
    }

    pub fn domain_contains(&self, x: &Rational) -> bool {
        self.domain.contains(x)
    }
}

impl fmt::Debug for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Construction").field("kind", &self.kind).field("params", &self.params).finish_non_exhaustive()
    }
}
