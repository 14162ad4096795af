//! Minimal displacement of a requested stream against committed traffic.
//!
//! Three independent solvers are provided. [`min_displacement_naive`] looks
//! at every peak pair, [`min_displacement_morph`] walks both envelopes in
//! height order and only touches the pairs that actually exceed the channel,
//! and [`min_displacement_oracle`] tests candidate displacements directly
//! against the summed envelope.

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envelope::{max_combined_height, Bandwidth, Peak, Rate, StreamEnvelope, Tick};

/// Open set `(lo, hi)` of displacements at which one peak pair overlaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ForbiddenInterval {
    pub lo: Tick,
    pub hi: Tick,
}

impl ForbiddenInterval {
    pub fn contains(&self, t: Tick) -> bool {
        self.lo < t && t < self.hi
    }
}

impl fmt::Display for ForbiddenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Outcome of one admission computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdmissionResult {
    pub displacement: Tick,
    /// Number of peak pairs whose heights sum above the channel.
    pub pair_count: usize,
    /// Intervals absorbed into the aggregate interval before the first gap.
    /// The oracle does not merge and reports 0.
    pub intervals_merged: usize,
    pub aggregate_end: Tick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Committed,
    Requested,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Committed => "committed",
            Side::Requested => "requested",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AdmissionError {
    #[error("{side} stream peak {index} has height {height} above channel bandwidth {bandwidth}")]
    PeakExceedsBandwidth {
        side: Side,
        index: usize,
        height: Rate,
        bandwidth: Rate,
    },
    #[error("negative displacement {0}")]
    NegativeDisplacement(Tick),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Naive,
    #[default]
    Morph,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Naive, Algorithm::Morph, Algorithm::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Morph => "morph",
            Algorithm::Oracle => "oracle",
        }
    }

    pub fn run(
        self,
        committed: &StreamEnvelope,
        requested: &StreamEnvelope,
        bandwidth: Bandwidth,
    ) -> Result<AdmissionResult, AdmissionError> {
        match self {
            Algorithm::Naive => min_displacement_naive(committed, requested, bandwidth),
            Algorithm::Morph => min_displacement_morph(committed, requested, bandwidth),
            Algorithm::Oracle => min_displacement_oracle(committed, requested, bandwidth),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Algorithm::Naive),
            "morph" => Ok(Algorithm::Morph),
            "oracle" => Ok(Algorithm::Oracle),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

/// Displacements of `p2` that would overlap `p1` while their heights exceed
/// the channel. Returns the whole interval, including any negative part.
pub fn forbidden_interval(p1: &Peak, p2: &Peak, bandwidth: Bandwidth) -> Option<ForbiddenInterval> {
    if p1.height + p2.height <= bandwidth.get() {
        return None;
    }
    Some(ForbiddenInterval {
        lo: p1.start - p2.end,
        hi: p1.end - p2.start,
    })
}

/// True iff the committed envelope plus `requested` delayed by `displacement`
/// never exceeds the channel.
pub fn feasible(
    committed: &StreamEnvelope,
    requested: &StreamEnvelope,
    displacement: Tick,
    bandwidth: Bandwidth,
) -> Result<bool, AdmissionError> {
    if displacement < 0 {
        return Err(AdmissionError::NegativeDisplacement(displacement));
    }
    Ok(max_combined_height(committed, requested, displacement) <= bandwidth.get())
}

fn check_inputs(
    committed: &StreamEnvelope,
    requested: &StreamEnvelope,
    bandwidth: Bandwidth,
) -> Result<(), AdmissionError> {
    for (side, env) in [(Side::Committed, committed), (Side::Requested, requested)] {
        if let Some((index, p)) = env
            .peaks()
            .iter()
            .enumerate()
            .find(|(_, p)| p.height > bandwidth.get())
        {
            return Err(AdmissionError::PeakExceedsBandwidth {
                side,
                index,
                height: p.height,
                bandwidth: bandwidth.get(),
            });
        }
    }
    Ok(())
}

/// Sweep intervals sorted by `(lo, hi)` from displacement 0 and stop at the
/// first point not covered by the running aggregate.
fn first_gap(intervals: &mut [ForbiddenInterval]) -> (Tick, usize) {
    intervals.sort_unstable();
    let mut aggregate_end: Tick = 0;
    let mut merged = 0;
    for iv in intervals.iter() {
        if iv.lo >= aggregate_end {
            break;
        }
        aggregate_end = aggregate_end.max(iv.hi);
        merged += 1;
    }
    (aggregate_end, merged)
}

/// Enumerate every pair of peaks, collect the conflicting ones, merge.
pub fn min_displacement_naive(
    committed: &StreamEnvelope,
    requested: &StreamEnvelope,
    bandwidth: Bandwidth,
) -> Result<AdmissionResult, AdmissionError> {
    check_inputs(committed, requested, bandwidth)?;
    let mut pair_count = 0;
    let mut intervals = Vec::new();
    for p1 in committed.peaks() {
        for p2 in requested.peaks() {
            if let Some(iv) = forbidden_interval(p1, p2, bandwidth) {
                pair_count += 1;
                if iv.hi > 0 {
                    intervals.push(iv);
                }
            }
        }
    }
    let (aggregate_end, intervals_merged) = first_gap(&mut intervals);
    Ok(AdmissionResult {
        displacement: aggregate_end,
        pair_count,
        intervals_merged,
        aggregate_end,
    })
}

/// Height-ordered solver: both envelopes are sorted by descending height, so
/// for each committed peak the conflicting requested peaks form a prefix,
/// and the outer walk ends at the first committed peak that cannot conflict
/// even with the tallest requested peak. Exactly `pair_count` intervals are
/// computed.
pub fn min_displacement_morph(
    committed: &StreamEnvelope,
    requested: &StreamEnvelope,
    bandwidth: Bandwidth,
) -> Result<AdmissionResult, AdmissionError> {
    check_inputs(committed, requested, bandwidth)?;
    let b = bandwidth.get();

    let mut by_height_1: Vec<&Peak> = committed.peaks().iter().collect();
    let mut by_height_2: Vec<&Peak> = requested.peaks().iter().collect();
    by_height_1.sort_unstable_by_key(|p| Reverse(p.height));
    by_height_2.sort_unstable_by_key(|p| Reverse(p.height));

    let tallest_2 = by_height_2.first().map_or(0, |p| p.height);
    let mut pair_count = 0;
    let mut intervals = Vec::new();
    for p1 in &by_height_1 {
        if p1.height + tallest_2 <= b {
            break;
        }
        for p2 in &by_height_2 {
            if p1.height + p2.height <= b {
                break;
            }
            pair_count += 1;
            let hi = p1.end - p2.start;
            if hi > 0 {
                intervals.push(ForbiddenInterval {
                    lo: p1.start - p2.end,
                    hi,
                });
            }
        }
    }
    let (aggregate_end, intervals_merged) = first_gap(&mut intervals);
    Ok(AdmissionResult {
        displacement: aggregate_end,
        pair_count,
        intervals_merged,
        aggregate_end,
    })
}

/// Direct search: try 0, then every `e1 - s2 > 0` in increasing order, and
/// return the first displacement whose summed envelope fits the channel.
/// The forbidden set is a finite union of open intervals with right
/// endpoints of that form, so the minimum is always among the candidates.
pub fn min_displacement_oracle(
    committed: &StreamEnvelope,
    requested: &StreamEnvelope,
    bandwidth: Bandwidth,
) -> Result<AdmissionResult, AdmissionError> {
    check_inputs(committed, requested, bandwidth)?;
    let b = bandwidth.get();
    let pair_count = committed
        .peaks()
        .iter()
        .map(|p1| {
            requested
                .peaks()
                .iter()
                .filter(|p2| p1.height + p2.height > b)
                .count()
        })
        .sum();
    let found = |t: Tick| AdmissionResult {
        displacement: t,
        pair_count,
        intervals_merged: 0,
        aggregate_end: t,
    };

    if max_combined_height(committed, requested, 0) <= b {
        return Ok(found(0));
    }
    let mut candidates: Vec<Tick> = committed
        .peaks()
        .iter()
        .flat_map(|p1| requested.peaks().iter().map(move |p2| p1.end - p2.start))
        .filter(|&t| t > 0)
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    let t = candidates
        .into_iter()
        .find(|&t| max_combined_height(committed, requested, t) <= b)
        // Past the end of the committed envelope nothing can conflict.
        .unwrap_or(committed.len());
    Ok(found(t))
}
