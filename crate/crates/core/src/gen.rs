//! Seeded random envelopes.
//!
//! All randomness goes through ChaCha8 seeded with `seed_from_u64`, so a
//! seed fixes the output on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::envelope::{Bandwidth, Peak, Rate, StreamEnvelope, Tick};
use crate::io::{EnvelopeSet, NamedStream};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("peak count must be positive")]
    NoPeaks,
    #[error("maximum peak length must be positive")]
    NoLength,
    #[error("height range [{min}, {max}] cannot give adjacent peaks distinct heights")]
    NarrowHeights { min: Rate, max: Rate },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvelopeParams {
    pub peaks: usize,
    pub min_height: Rate,
    pub max_height: Rate,
    pub max_len: Tick,
}

impl EnvelopeParams {
    pub fn new(
        peaks: usize,
        min_height: Rate,
        max_height: Rate,
        max_len: Tick,
    ) -> Result<Self, GenError> {
        if peaks == 0 {
            return Err(GenError::NoPeaks);
        }
        if max_len < 1 {
            return Err(GenError::NoLength);
        }
        if min_height > max_height || (peaks > 1 && min_height == max_height) {
            return Err(GenError::NarrowHeights {
                min: min_height,
                max: max_height,
            });
        }
        Ok(Self {
            peaks,
            min_height,
            max_height,
            max_len,
        })
    }
}

/// Exactly `params.peaks` peaks with lengths in `[1, max_len]` and heights
/// in `[min_height, max_height]`, neighbours distinct.
pub fn random_envelope<R: Rng>(rng: &mut R, params: &EnvelopeParams) -> StreamEnvelope {
    let mut peaks = Vec::with_capacity(params.peaks);
    let mut t = 0;
    let mut prev = None;
    for _ in 0..params.peaks {
        let h = loop {
            let h = rng.gen_range(params.min_height..=params.max_height);
            if Some(h) != prev {
                break h;
            }
        };
        let len = rng.gen_range(1..=params.max_len);
        peaks.push(Peak::new(h, t, t + len));
        t += len;
        prev = Some(h);
    }
    StreamEnvelope::new(peaks).expect("generated peaks are contiguous with distinct neighbours")
}

/// `streams` envelopes named `s0, s1, …` from one seed.
pub fn generate_set(
    seed: u64,
    streams: usize,
    params: &EnvelopeParams,
    bandwidth: Bandwidth,
) -> EnvelopeSet {
    let mut rng = rng(seed);
    let streams = (0..streams)
        .map(|i| NamedStream {
            id: format!("s{i}"),
            envelope: random_envelope(&mut rng, params),
        })
        .collect();
    EnvelopeSet::new(bandwidth, streams).expect("ids are distinct")
}
