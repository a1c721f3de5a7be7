use serde::{Deserialize, Serialize};

use super::Construction;
use crate::error::{Error, Result};
use crate::sets::{Interval, IntervalSet, TailBound};
use crate::transforms::EnclosedSet;

/// Serialized form of a construction materialized to a number of batches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionManifest {
    pub kind: String,
    pub params: serde_json::Value,
    pub domain: Interval,
    /// Number of batches written.
    pub depth: u64,
    pub removed: Vec<IntervalSet>,
    /// Bound on the measure of all later batches, `"p/q"` or `"unbounded"`.
    pub tail_bound: String,
    /// Region on which the written batches are the whole removed family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete_on: Option<Interval>,
    /// Kept set with explicit inner and outer sides, for images under transcendental maps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kept: Option<EnclosedSet>,
    pub certificates: Vec<serde_json::Value>,
}

impl ConstructionManifest {
    pub fn build(c: &Construction, depth: u64, certificates: Vec<serde_json::Value>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::param("depth", "need at least one batch"));
        }
        let removed = c.removed.batches(depth as i64 - 1)?;
        Ok(ConstructionManifest {
            kind: c.kind.clone(),
            params: c.params.clone(),
            domain: c.domain.clone(),
            depth,
            removed,
            tail_bound: c.removed.tail_bound(depth - 1)?.to_string(),
            complete_on: c.removed.frontier(depth - 1),
            kept: None,
            certificates,
        })
    }

    pub fn with_kept(mut self, kept: EnclosedSet) -> Self {
        self.kept = Some(kept);
        self
    }

    pub fn tail(&self) -> Result<TailBound> {
        if self.tail_bound == "unbounded" {
            return Ok(TailBound::Unbounded);
        }
        Ok(TailBound::Finite(self.tail_bound.parse()?))
    }

    /// Kept set on `region`: `domain ∩ region` minus the written batches.
    /// Fails unless the batches are complete on `region`.
    pub fn kept_on(&self, region: &Interval) -> Result<IntervalSet> {
        match &self.complete_on {
            Some(c) if c.contains_interval(region) => {}
            _ => {
                return Err(Error::HorizonShortfall(format!(
                    "written batches are not known to be complete on {region}"
                )))
            }
        }
        Ok(IntervalSet::from_interval(self.domain.clone()).clip(region).difference(&self.removed_union()))
    }

    /// Union of all written batches.
    pub fn removed_union(&self) -> IntervalSet {
        IntervalSet::normalize(self.removed.iter().flat_map(|b| b.parts().iter().cloned()).collect())
    }

    pub fn interval_count(&self) -> usize {
        self.removed.iter().map(IntervalSet::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::cantor::{cantor_construction, CantorSpec};
    use crate::sets::Rational;

    #[test]
    fn cantor_depth_eight_has_255_intervals() {
        let spec = CantorSpec::middle_a(Rational::frac(1, 4)).unwrap();
        let m = ConstructionManifest::build(&cantor_construction(&spec), 8, vec![]).unwrap();
        assert_eq!(m.interval_count(), 255);
        let back: ConstructionManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(m.tail_bound, "1/512");
    }
}
