//! String Pack: slide equal-length binary strings so that no column holds
//! two 1s, minimizing the total span.

use serde::{Deserialize, Serialize};

use super::{BitString, ReductionError};
use crate::envelope::{Bandwidth, Rate, StreamEnvelope};
use crate::multistream::MultiInstance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StringPackFile", into = "StringPackFile")]
pub struct StringPackInstance {
    strings: Vec<BitString>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StringPackFile {
    strings: Vec<String>,
}

impl TryFrom<StringPackFile> for StringPackInstance {
    type Error = ReductionError;

    fn try_from(f: StringPackFile) -> Result<Self, Self::Error> {
        let strings = f
            .strings
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.parse::<BitString>()
                    .map_err(|e| ReductionError::Invalid(format!("string {i}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        StringPackInstance::new(strings)
    }
}

impl From<StringPackInstance> for StringPackFile {
    fn from(sp: StringPackInstance) -> Self {
        StringPackFile {
            strings: sp.strings.iter().map(ToString::to_string).collect(),
        }
    }
}

impl StringPackInstance {
    pub fn new(strings: Vec<BitString>) -> Result<Self, ReductionError> {
        let Some(first) = strings.first() else {
            return Err(ReductionError::Invalid("no strings".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(ReductionError::Invalid("strings are empty".into()));
        }
        if let Some((i, s)) = strings.iter().enumerate().find(|(_, s)| s.len() != n) {
            return Err(ReductionError::Invalid(format!(
                "string {i} has length {}, expected {n}",
                s.len()
            )));
        }
        Ok(Self { strings })
    }

    pub fn from_strs(strings: &[&str]) -> Result<Self, ReductionError> {
        StringPackFile {
            strings: strings.iter().map(|s| s.to_string()).collect(),
        }
        .try_into()
    }

    pub fn strings(&self) -> &[BitString] {
        &self.strings
    }

    /// Number of strings `m`.
    pub fn count(&self) -> usize {
        self.strings.len()
    }

    /// Common string length `n`.
    pub fn width(&self) -> usize {
        self.strings[0].len()
    }

    /// Span of the packing given by `offsets`, or `None` if two 1s share a
    /// column or an offset is negative.
    pub fn packing_length(&self, offsets: &[i64]) -> Option<usize> {
        if offsets.len() != self.count() || offsets.iter().any(|&o| o < 0) {
            return None;
        }
        for i in 0..self.count() {
            for j in i + 1..self.count() {
                if self.strings[i].collides_at(&self.strings[j], offsets[j] - offsets[i]) {
                    return None;
                }
            }
        }
        let lo = *offsets.iter().min()?;
        let hi = *offsets.iter().max()?;
        Some((hi - lo) as usize + self.width())
    }
}

/// One unit-width peak per character: height 1 for '1', 0 for '0', on a
/// unit-bandwidth channel.
pub fn stringpack_to_mss(sp: &StringPackInstance) -> MultiInstance {
    let streams = sp
        .strings
        .iter()
        .map(|s| {
            let heights: Vec<Rate> = (0..s.len()).map(|i| s.get(i) as Rate).collect();
            StreamEnvelope::from_ticks(&heights)
        })
        .collect();
    MultiInstance::new(streams, Bandwidth(1)).expect("instance has at least one string")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packing {
    pub length: usize,
    pub offsets: Vec<i64>,
}

/// Exhaustive search for the shortest packing no longer than `max_len`
/// (default `m * n`, which always fits). Refuses instances whose offset
/// space exceeds `budget` tuples.
pub fn stringpack_brute(
    sp: &StringPackInstance,
    max_len: Option<usize>,
    budget: u128,
) -> Result<Option<Packing>, ReductionError> {
    let (m, n) = (sp.count(), sp.width());
    let max_len = max_len.unwrap_or(m * n);
    if max_len < n {
        return Ok(None);
    }
    let needed = (max_len - n + 1) as u128;
    let needed = needed.saturating_pow(m as u32);
    if needed > budget {
        return Err(ReductionError::Budget { needed, budget });
    }
    for length in n..=max_len {
        let mut offsets = Vec::with_capacity(m);
        if place(sp, (length - n) as i64, &mut offsets) {
            return Ok(Some(Packing { length, offsets }));
        }
    }
    Ok(None)
}

fn place(sp: &StringPackInstance, max_offset: i64, offsets: &mut Vec<i64>) -> bool {
    let k = offsets.len();
    if k == sp.count() {
        return true;
    }
    for o in 0..=max_offset {
        let clash = offsets
            .iter()
            .enumerate()
            .any(|(i, &oi)| sp.strings[i].collides_at(&sp.strings[k], o - oi));
        if clash {
            continue;
        }
        offsets.push(o);
        if place(sp, max_offset, offsets) {
            return true;
        }
        offsets.pop();
    }
    false
}
