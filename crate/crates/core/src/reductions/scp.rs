//! Segments Containing Points and its encoding as a two-stream instance.
//!
//! Coordinates are doubled so that each point becomes a unit-width peak at
//! an even tick: a peak at `[2p, 2p+1)` fits inside `[2a, 2b)` exactly when
//! `p` lies in `[a, b)`.

use serde::{Deserialize, Serialize};

use super::ReductionError;
use crate::admission::min_displacement_morph;
use crate::envelope::{normalize, Bandwidth, Peak, StreamEnvelope, Tick};

/// Points `P` and pairwise-disjoint half-open intervals `Q`, both sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScpFile", into = "ScpFile")]
pub struct ScpInstance {
    points: Vec<i64>,
    intervals: Vec<(i64, i64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScpFile {
    points: Vec<i64>,
    intervals: Vec<[i64; 2]>,
}

impl TryFrom<ScpFile> for ScpInstance {
    type Error = ReductionError;

    fn try_from(f: ScpFile) -> Result<Self, Self::Error> {
        ScpInstance::new(
            f.points,
            f.intervals.into_iter().map(|[a, b]| (a, b)).collect(),
        )
    }
}

impl From<ScpInstance> for ScpFile {
    fn from(s: ScpInstance) -> Self {
        ScpFile {
            points: s.points,
            intervals: s.intervals.into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl ScpInstance {
    /// Sorts both inputs and drops duplicate points. Intervals must be
    /// non-empty and pairwise disjoint.
    pub fn new(
        mut points: Vec<i64>,
        mut intervals: Vec<(i64, i64)>,
    ) -> Result<Self, ReductionError> {
        if points.is_empty() || intervals.is_empty() {
            return Err(ReductionError::Invalid(
                "need at least one point and one interval".into(),
            ));
        }
        points.sort_unstable();
        points.dedup();
        intervals.sort_unstable();
        if let Some(&(a, b)) = intervals.iter().find(|(a, b)| a >= b) {
            return Err(ReductionError::Invalid(format!(
                "empty interval [{a}, {b})"
            )));
        }
        if let Some(w) = intervals.windows(2).find(|w| w[1].0 < w[0].1) {
            return Err(ReductionError::Invalid(format!(
                "intervals [{}, {}) and [{}, {}) overlap",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
        Ok(Self { points, intervals })
    }

    pub fn points(&self) -> &[i64] {
        &self.points
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.intervals
    }

    pub fn contains(&self, x: i64) -> bool {
        let i = self.intervals.partition_point(|&(_, b)| b <= x);
        self.intervals.get(i).is_some_and(|&(a, _)| a <= x)
    }

    /// True iff every translated point lands inside some interval.
    pub fn is_translation(&self, u: i64) -> bool {
        self.points.iter().all(|&p| self.contains(p + u))
    }
}

/// Smallest `u` with `P + u ⊆ Q`. Any valid translation can slide left until
/// a point meets an interval start, so only `a - p` needs testing.
pub fn scp_brute(scp: &ScpInstance) -> Option<i64> {
    let mut candidates: Vec<i64> = scp
        .intervals
        .iter()
        .flat_map(|&(a, _)| scp.points.iter().map(move |&p| a - p))
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    candidates.into_iter().find(|&u| scp.is_translation(u))
}

/// Two-stream encoding of an SCP instance on a unit-bandwidth channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScpReduction {
    /// Height 0 on the scaled intervals, 1 elsewhere.
    pub committed: StreamEnvelope,
    /// Unit peaks at the scaled points.
    pub requested: StreamEnvelope,
    pub bandwidth: Bandwidth,
    /// `L1 - L2`; a displacement strictly below it encodes a translation.
    pub threshold: Tick,
    /// `s1 - p1`, so that `u = T/2 + offset_base`.
    pub offset_base: i64,
}

impl ScpReduction {
    /// The requested stream is longer than the committed one, so no
    /// translation can exist.
    pub fn trivially_unsolvable(&self) -> bool {
        self.requested.len() > self.committed.len()
    }

    /// Translation encoded by a two-stream displacement, if it is below the
    /// threshold.
    pub fn translation_for(&self, displacement: Tick) -> Option<i64> {
        (displacement >= 0 && displacement < self.threshold)
            .then(|| displacement.div_euclid(2) + self.offset_base)
    }

    /// Solve the SCP instance through the morphology-sensitive admission
    /// solver.
    pub fn solve(&self) -> (Tick, Option<i64>) {
        let t = min_displacement_morph(&self.committed, &self.requested, self.bandwidth)
            .expect("all heights are at most 1")
            .displacement;
        (t, self.translation_for(t))
    }
}

pub fn scp_to_2ss(scp: &ScpInstance) -> ScpReduction {
    let s1 = scp.intervals[0].0;
    let p1 = scp.points[0];

    let mut raw = Vec::with_capacity(2 * scp.intervals.len());
    let mut cursor = 0;
    for &(a, b) in &scp.intervals {
        let (a, b) = (2 * (a - s1), 2 * (b - s1));
        if a > cursor {
            raw.push(Peak::new(1, cursor, a));
        }
        raw.push(Peak::new(0, a, b));
        cursor = b;
    }
    let committed = normalize(raw).expect("sorted disjoint intervals");

    let requested = normalize(scp.points.iter().map(|&p| {
        let at = 2 * (p - p1);
        Peak::new(1, at, at + 1)
    }))
    .expect("distinct sorted points");

    ScpReduction {
        threshold: committed.len() - requested.len(),
        committed,
        requested,
        bandwidth: Bandwidth(1),
        offset_base: s1 - p1,
    }
}
