//! JSON envelope files and result reports.

use std::collections::HashSet;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::admission::AdmissionResult;
use crate::envelope::{normalize, Bandwidth, EnvelopeError, Peak, Rate, StreamEnvelope, Tick};
use crate::multistream::MultiScheduleResult;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("stream {id:?} (line {line}): {error}")]
    Stream {
        id: String,
        line: usize,
        error: EnvelopeError,
    },
    #[error("stream {id:?} (line {line}): {message}")]
    Value {
        id: String,
        line: usize,
        message: String,
    },
    #[error("duplicate stream id {0:?}")]
    DuplicateId(String),
    #[error("no stream with id {0:?}")]
    UnknownId(String),
    #[error("bandwidth must be positive")]
    ZeroBandwidth,
}

/// Named envelopes sharing one channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvelopeSet {
    pub bandwidth: Bandwidth,
    pub streams: Vec<NamedStream>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedStream {
    pub id: String,
    pub envelope: StreamEnvelope,
}

#[derive(Deserialize)]
struct RawSet<H, T> {
    bandwidth: H,
    streams: Vec<RawStream<H, T>>,
}

#[derive(Deserialize)]
struct RawStream<H, T> {
    id: String,
    peaks: Vec<(H, T, T)>,
}

fn parse_json<V: DeserializeOwned>(text: &str) -> Result<V, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// 1-based line of the first occurrence of `"id"` in the text, or 0.
fn line_of_id(text: &str, id: &str) -> usize {
    let needle = serde_json::to_string(id).unwrap_or_default();
    text.find(&needle)
        .map_or(0, |at| text[..at].matches('\n').count() + 1)
}

impl EnvelopeSet {
    pub fn new(bandwidth: Bandwidth, streams: Vec<NamedStream>) -> Result<Self, IoError> {
        if bandwidth.get() == 0 {
            return Err(IoError::ZeroBandwidth);
        }
        let mut seen = HashSet::new();
        for s in &streams {
            if !seen.insert(s.id.as_str()) {
                return Err(IoError::DuplicateId(s.id.clone()));
            }
        }
        Ok(Self { bandwidth, streams })
    }

    /// Parse an integer-valued file. Peaks may arrive unsorted, with gaps
    /// and with equal neighbours; they are normalized here.
    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let raw: RawSet<Rate, Tick> = parse_json(text)?;
        let streams = raw
            .streams
            .into_iter()
            .map(|s| build_stream(text, s.id, s.peaks.into_iter().map(Peak::from).collect()))
            .collect::<Result<_, _>>()?;
        Self::new(Bandwidth(raw.bandwidth), streams)
    }

    /// Parse a file with decimal times and rates. Times are multiplied by
    /// `time_scale` and rates by `rate_scale`; every product must be an
    /// integer.
    pub fn from_json_scaled(text: &str, time_scale: f64, rate_scale: f64) -> Result<Self, IoError> {
        let raw: RawSet<f64, f64> = parse_json(text)?;
        let bandwidth = to_integer(raw.bandwidth * rate_scale)
            .filter(|&b| b >= 0)
            .ok_or_else(|| IoError::Value {
                id: String::new(),
                line: 0,
                message: format!(
                    "bandwidth {} is not an integer after scaling",
                    raw.bandwidth
                ),
            })?;
        let mut streams = Vec::with_capacity(raw.streams.len());
        for s in raw.streams {
            let mut peaks = Vec::with_capacity(s.peaks.len());
            for (i, &(h, a, b)) in s.peaks.iter().enumerate() {
                let scaled = (
                    to_integer(h * rate_scale).filter(|&h| h >= 0),
                    to_integer(a * time_scale),
                    to_integer(b * time_scale),
                );
                let (Some(h), Some(a), Some(b)) = scaled else {
                    return Err(IoError::Value {
                        line: line_of_id(text, &s.id),
                        id: s.id,
                        message: format!("peak {i} [{h}, {a}, {b}] is not integral after scaling"),
                    });
                };
                peaks.push(Peak::new(h as Rate, a, b));
            }
            streams.push(build_stream(text, s.id, peaks)?);
        }
        Self::new(Bandwidth(bandwidth as Rate), streams)
    }

    /// JSON of the normalized envelopes, one stream per line.
    pub fn to_json(&self) -> String {
        let mut out = format!(
            "{{\n  \"bandwidth\": {},\n  \"streams\": [",
            self.bandwidth.get()
        );
        for (i, s) in self.streams.iter().enumerate() {
            let peaks = s
                .envelope
                .peaks()
                .iter()
                .map(|p| format!("[{}, {}, {}]", p.height, p.start, p.end))
                .collect::<Vec<_>>()
                .join(", ");
            let id = serde_json::to_string(&s.id).expect("strings serialize");
            let sep = if i + 1 < self.streams.len() { "," } else { "" };
            out.push_str(&format!(
                "\n    {{\"id\": {id}, \"peaks\": [{peaks}]}}{sep}"
            ));
        }
        out.push_str(if self.streams.is_empty() {
            "]\n}\n"
        } else {
            "\n  ]\n}\n"
        });
        out
    }

    pub fn get(&self, id: &str) -> Result<&StreamEnvelope, IoError> {
        self.streams
            .iter()
            .find(|s| s.id == id)
            .map(|s| &s.envelope)
            .ok_or_else(|| IoError::UnknownId(id.to_owned()))
    }

    pub fn envelopes(&self) -> Vec<StreamEnvelope> {
        self.streams.iter().map(|s| s.envelope.clone()).collect()
    }
}

fn build_stream(text: &str, id: String, mut peaks: Vec<Peak>) -> Result<NamedStream, IoError> {
    peaks.sort_by_key(|p| p.start);
    match normalize(peaks) {
        Ok(envelope) => Ok(NamedStream { id, envelope }),
        Err(error) => Err(IoError::Stream {
            line: line_of_id(text, &id),
            id,
            error,
        }),
    }
}

fn to_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < 1e-9 && r.abs() < 9.0e15).then_some(r as i64)
}

/// Result of the `admit` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissionReport {
    pub displacement: Option<Tick>,
    pub pair_count: usize,
    pub intervals_merged: usize,
    pub feasible: bool,
}

impl From<AdmissionResult> for AdmissionReport {
    fn from(r: AdmissionResult) -> Self {
        Self {
            displacement: Some(r.displacement),
            pair_count: r.pair_count,
            intervals_merged: r.intervals_merged,
            feasible: true,
        }
    }
}

impl AdmissionReport {
    /// A request that cannot be admitted at any displacement.
    pub fn infeasible() -> Self {
        Self {
            displacement: None,
            pair_count: 0,
            intervals_merged: 0,
            feasible: false,
        }
    }
}

/// Result of the `schedule` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub displacements: Vec<Tick>,
    pub makespan: Tick,
    pub last_displacement: Tick,
    pub optimal: bool,
}

impl ScheduleReport {
    pub fn new(r: MultiScheduleResult, optimal: bool) -> Self {
        Self {
            displacements: r.displacements,
            makespan: r.makespan,
            last_displacement: r.last_displacement,
            optimal,
        }
    }
}
