//! Piecewise-constant traffic envelopes over integer time.
//!
//! An envelope is a gap-free sequence of half-open segments `[start, end)`
//! covering `[0, L)`. Idle stretches are explicit height-0 segments, and two
//! neighbouring segments never carry the same height.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Time in integer ticks. Signed so displacement arithmetic can go negative.
pub type Tick = i64;

/// Bandwidth in integer units.
pub type Rate = u64;

/// One constant-rate segment `[start, end)` of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Peak {
    pub height: Rate,
    pub start: Tick,
    pub end: Tick,
}

impl Peak {
    pub const fn new(height: Rate, start: Tick, end: Tick) -> Self {
        Self { height, start, end }
    }

    pub const fn len(&self) -> Tick {
        self.end - self.start
    }

    pub const fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Bandwidth-time product of the segment.
    pub fn area(&self) -> u128 {
        self.height as u128 * self.len().max(0) as u128
    }
}

impl fmt::Display for Peak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.height, self.start, self.end)
    }
}

impl From<(Rate, Tick, Tick)> for Peak {
    fn from((height, start, end): (Rate, Tick, Tick)) -> Self {
        Self::new(height, start, end)
    }
}

/// Channel capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bandwidth(pub Rate);

impl Bandwidth {
    pub const fn get(self) -> Rate {
        self.0
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A single broken invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyPeak { index: usize },
    NotAnchoredAtZero { start: Tick },
    Gap { index: usize, from: Tick, to: Tick },
    Overlap { index: usize, previous_end: Tick },
    AdjacentEqualHeights { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyPeak { index } => write!(f, "peak {index}: non-positive length"),
            Violation::NotAnchoredAtZero { start } => {
                write!(f, "peak 0: envelope starts at {start}, not 0")
            }
            Violation::Gap { index, from, to } => write!(f, "peak {index}: gap at [{from},{to})"),
            Violation::Overlap {
                index,
                previous_end,
            } => write!(
                f,
                "peak {index}: overlaps previous peak ending at {previous_end}"
            ),
            Violation::AdjacentEqualHeights { index } => {
                write!(f, "peak {index}: adjacent equal heights")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("invalid envelope: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("peaks {first} and {second} overlap")]
    Overlap { first: usize, second: usize },
    #[error("peak {index} has non-positive length")]
    EmptyPeak { index: usize },
    #[error("peak {index} starts before time 0")]
    NegativeStart { index: usize },
    #[error("negative displacement {0}")]
    NegativeShift(Tick),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Check every envelope invariant on a raw peak list.
pub fn validate(peaks: &[Peak]) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    for (index, p) in peaks.iter().enumerate() {
        if p.is_empty() {
            violations.push(Violation::EmptyPeak { index });
        }
    }
    if let Some(first) = peaks.first() {
        if first.start != 0 {
            violations.push(Violation::NotAnchoredAtZero { start: first.start });
        }
    }
    for (index, pair) in peaks.windows(2).enumerate() {
        let (prev, next) = (pair[0], pair[1]);
        let index = index + 1;
        if next.start > prev.end {
            violations.push(Violation::Gap {
                index,
                from: prev.end,
                to: next.start,
            });
        } else if next.start < prev.end {
            violations.push(Violation::Overlap {
                index,
                previous_end: prev.end,
            });
        }
        if next.height == prev.height {
            violations.push(Violation::AdjacentEqualHeights { index });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// A validated, normalized step function over `[0, L)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct StreamEnvelope {
    peaks: Vec<Peak>,
}

impl StreamEnvelope {
    /// Wrap an already-normalized peak list, rejecting anything that fails
    /// [`validate`].
    pub fn new(peaks: Vec<Peak>) -> Result<Self, EnvelopeError> {
        validate(&peaks).map_err(EnvelopeError::Invalid)?;
        Ok(Self { peaks })
    }

    /// The zero-length envelope.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from `(height, start, end)` triples, normalizing on the way in.
    pub fn from_triples<I>(triples: I) -> Result<Self, EnvelopeError>
    where
        I: IntoIterator<Item = (Rate, Tick, Tick)>,
    {
        normalize(triples.into_iter().map(Peak::from))
    }

    /// Unit-tick envelope from per-tick heights (`heights[t]` holds on `[t, t+1)`).
    pub fn from_ticks(heights: &[Rate]) -> Self {
        let raw = heights
            .iter()
            .enumerate()
            .map(|(t, &h)| Peak::new(h, t as Tick, t as Tick + 1));
        normalize(raw).expect("unit ticks are contiguous")
    }

    pub fn peaks(&self) -> &[Peak] {
        &self.peaks
    }

    pub fn len(&self) -> Tick {
        self.peaks.last().map_or(0, |p| p.end)
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn max_height(&self) -> Rate {
        self.peaks.iter().map(|p| p.height).max().unwrap_or(0)
    }

    pub fn area(&self) -> u128 {
        self.peaks.iter().map(Peak::area).sum()
    }

    /// Time points where the height changes: `0`, every segment end, `L`.
    pub fn breakpoints(&self) -> impl Iterator<Item = Tick> + '_ {
        self.peaks
            .first()
            .map(|p| p.start)
            .into_iter()
            .chain(self.peaks.iter().map(|p| p.end))
    }

    pub fn height_at(&self, t: Tick) -> Rate {
        height_at(self, t)
    }

    pub fn shifted(&self, by: Tick) -> Result<Self, EnvelopeError> {
        shift(self, by)
    }

    pub fn into_peaks(self) -> Vec<Peak> {
        self.peaks
    }
}

impl fmt::Display for StreamEnvelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.peaks.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            p.fmt(f)?;
        }
        f.write_str("]")
    }
}

/// Turn a sorted, non-overlapping peak list into a valid envelope: gaps
/// (including a leading one) become height-0 segments and neighbours with
/// equal height are merged.
pub fn normalize<I>(raw: I) -> Result<StreamEnvelope, EnvelopeError>
where
    I: IntoIterator<Item = Peak>,
{
    let mut out: Vec<Peak> = Vec::new();
    let mut cursor: Tick = 0;
    for (index, p) in raw.into_iter().enumerate() {
        if p.is_empty() {
            return Err(EnvelopeError::EmptyPeak { index });
        }
        if p.start < 0 {
            return Err(EnvelopeError::NegativeStart { index });
        }
        if p.start < cursor {
            return Err(EnvelopeError::Overlap {
                first: index - 1,
                second: index,
            });
        }
        if p.start > cursor {
            push_merged(&mut out, Peak::new(0, cursor, p.start));
        }
        push_merged(&mut out, p);
        cursor = p.end;
    }
    Ok(StreamEnvelope { peaks: out })
}

fn push_merged(out: &mut Vec<Peak>, p: Peak) {
    match out.last_mut() {
        Some(last) if last.height == p.height && last.end == p.start => last.end = p.end,
        _ => out.push(p),
    }
}

/// Delay an envelope by `by` ticks, idling at height 0 in the meantime.
pub fn shift(env: &StreamEnvelope, by: Tick) -> Result<StreamEnvelope, EnvelopeError> {
    if by < 0 {
        return Err(EnvelopeError::NegativeShift(by));
    }
    if by == 0 {
        return Ok(env.clone());
    }
    let mut peaks = Vec::with_capacity(env.peaks.len() + 1);
    push_merged(&mut peaks, Peak::new(0, 0, by));
    for p in &env.peaks {
        push_merged(&mut peaks, Peak::new(p.height, p.start + by, p.end + by));
    }
    Ok(StreamEnvelope { peaks })
}

/// Pointwise sum. The shorter envelope counts as height 0 past its end.
pub fn sum(a: &StreamEnvelope, b: &StreamEnvelope) -> StreamEnvelope {
    let mut out = Vec::with_capacity(a.peaks.len() + b.peaks.len());
    let (mut i, mut j) = (0, 0);
    let mut t: Tick = 0;
    let end = a.len().max(b.len());
    while t < end {
        while i < a.peaks.len() && a.peaks[i].end <= t {
            i += 1;
        }
        while j < b.peaks.len() && b.peaks[j].end <= t {
            j += 1;
        }
        let (ha, na) = a.peaks.get(i).map_or((0, end), |p| (p.height, p.end));
        let (hb, nb) = b.peaks.get(j).map_or((0, end), |p| (p.height, p.end));
        let next = na.min(nb);
        push_merged(&mut out, Peak::new(ha + hb, t, next));
        t = next;
    }
    StreamEnvelope { peaks: out }
}

/// Sum of any number of envelopes.
pub fn sum_all<'a, I>(envs: I) -> StreamEnvelope
where
    I: IntoIterator<Item = &'a StreamEnvelope>,
{
    envs.into_iter()
        .fold(StreamEnvelope::empty(), |acc, e| sum(&acc, e))
}

/// Height at `t`; zero outside `[0, L)`.
pub fn height_at(env: &StreamEnvelope, t: Tick) -> Rate {
    if t < 0 || t >= env.len() {
        return 0;
    }
    let idx = env.peaks.partition_point(|p| p.end <= t);
    env.peaks[idx].height
}

/// Largest value of `a(t) + b(t - by)` over all `t`, without materializing
/// the shifted sum.
pub fn max_combined_height(a: &StreamEnvelope, b: &StreamEnvelope, by: Tick) -> Rate {
    let (pa, pb) = (a.peaks(), b.peaks());
    let end = a.len().max(if pb.is_empty() { 0 } else { b.len() + by });
    let (mut i, mut j) = (0, 0);
    let mut t: Tick = 0;
    let mut best = 0;
    while t < end {
        while i < pa.len() && pa[i].end <= t {
            i += 1;
        }
        while j < pb.len() && pb[j].end + by <= t {
            j += 1;
        }
        let (ha, next_a) = pa.get(i).map_or((0, end), |p| (p.height, p.end));
        let (hb, next_b) = match pb.get(j) {
            Some(p) if p.start + by <= t => (p.height, p.end + by),
            Some(p) => (0, p.start + by),
            None => (0, end),
        };
        best = best.max(ha + hb);
        t = next_a.min(next_b);
    }
    best
}
