//! Timing harness comparing the admission solvers on random instances.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::admission::{AdmissionError, Algorithm};
use crate::envelope::{Bandwidth, Rate, StreamEnvelope, Tick};
use crate::gen::{random_envelope, rng, EnvelopeParams};
use crate::io::{EnvelopeSet, NamedStream};

/// Height distribution of generated peaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Heights in `[0, B/2]`: no pair conflicts.
    #[default]
    Low,
    /// Heights in `(B/2, B]`: every pair conflicts.
    Adversarial,
    /// Heights in `[0, B]`.
    Mixed,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Low, Regime::Adversarial, Regime::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Low => "low",
            Regime::Adversarial => "adversarial",
            Regime::Mixed => "mixed",
        }
    }

    fn heights(self, b: Rate) -> (Rate, Rate) {
        match self {
            Regime::Low => (0, b / 2),
            Regime::Adversarial => (b / 2 + 1, b),
            Regime::Mixed => (0, b),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown regime {s:?} (expected low, adversarial or mixed)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub regime: Regime,
    pub bandwidth: Rate,
    pub max_len: Tick,
    /// The oracle is skipped on instances with more peak pairs than this.
    pub oracle_max_pairs: u128,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![100, 1000],
            trials: 3,
            seed: 0,
            regime: Regime::Low,
            bandwidth: 100,
            max_len: 10,
            oracle_max_pairs: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Timing {
    pub algo: Algorithm,
    pub displacement: Tick,
    pub pair_count: usize,
    pub micros: u128,
}

/// One generated instance, timed under each solver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    /// Conflicting pairs, counted independently of every solver.
    pub conflicts: usize,
    pub displacement: Tick,
    pub timings: Vec<Timing>,
}

impl BenchRow {
    pub fn timing(&self, algo: Algorithm) -> Option<&Timing> {
        self.timings.iter().find(|t| t.algo == algo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Median {
    pub n: usize,
    pub algo: Algorithm,
    pub micros: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub regime: Regime,
    pub rows: Vec<BenchRow>,
    pub medians: Vec<Median>,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("solvers disagree at n={n}, trial {trial}: {found}\ninstance:\n{instance}")]
    Disagreement {
        n: usize,
        trial: usize,
        found: String,
        instance: String,
    },
    #[error(transparent)]
    Admission(#[from] AdmissionError),
    #[error("invalid benchmark parameters: {0}")]
    Config(String),
}

/// `|{(i, j) : h1_i + h2_j > B}|` by sorting one side and binary searching.
pub fn count_conflicts(
    committed: &StreamEnvelope,
    requested: &StreamEnvelope,
    bandwidth: Bandwidth,
) -> usize {
    let mut hs: Vec<Rate> = requested.peaks().iter().map(|p| p.height).collect();
    hs.sort_unstable();
    committed
        .peaks()
        .iter()
        .map(|p| {
            let limit = bandwidth.get().saturating_sub(p.height);
            if p.height > bandwidth.get() {
                hs.len()
            } else {
                hs.len() - hs.partition_point(|&h| h <= limit)
            }
        })
        .sum()
}

/// Committed and requested envelopes with `n` peaks each for one trial.
pub fn bench_instance(
    cfg: &BenchConfig,
    n: usize,
    trial: usize,
) -> Result<(StreamEnvelope, StreamEnvelope), BenchError> {
    let (lo, hi) = cfg.regime.heights(cfg.bandwidth);
    let params = EnvelopeParams::new(n, lo, hi, cfg.max_len)
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let mut r: ChaCha8Rng = rng(cfg.seed);
    // Independent stream per (size, trial) so rows do not depend on order.
    r.set_stream(((n as u64) << 20) ^ trial as u64);
    Ok((
        random_envelope(&mut r, &params),
        random_envelope(&mut r, &params),
    ))
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    let b = Bandwidth(cfg.bandwidth);
    let mut rows = Vec::with_capacity(cfg.sizes.len() * cfg.trials);
    for &n in &cfg.sizes {
        for trial in 0..cfg.trials {
            let (s1, s2) = bench_instance(cfg, n, trial)?;
            let conflicts = count_conflicts(&s1, &s2, b);
            let mut timings = Vec::new();
            for algo in Algorithm::ALL {
                if algo == Algorithm::Oracle && (n as u128) * (n as u128) > cfg.oracle_max_pairs {
                    continue;
                }
                let start = Instant::now();
                let res = algo.run(&s1, &s2, b)?;
                let micros = start.elapsed().as_micros();
                timings.push(Timing {
                    algo,
                    displacement: res.displacement,
                    pair_count: res.pair_count,
                    micros,
                });
            }
            let displacement = timings[0].displacement;
            if timings.iter().any(|t| t.displacement != displacement) {
                let found = timings
                    .iter()
                    .map(|t| format!("{}={}", t.algo, t.displacement))
                    .collect::<Vec<_>>()
                    .join(", ");
                let set = EnvelopeSet::new(
                    b,
                    vec![
                        NamedStream {
                            id: "committed".into(),
                            envelope: s1,
                        },
                        NamedStream {
                            id: "requested".into(),
                            envelope: s2,
                        },
                    ],
                )
                .expect("distinct ids");
                return Err(BenchError::Disagreement {
                    n,
                    trial,
                    found,
                    instance: set.to_json(),
                });
            }
            rows.push(BenchRow {
                n,
                m: n,
                trial,
                conflicts,
                displacement,
                timings,
            });
        }
    }
    let medians = medians(&cfg.sizes, &rows);
    Ok(BenchReport {
        regime: cfg.regime,
        rows,
        medians,
    })
}

fn medians(sizes: &[usize], rows: &[BenchRow]) -> Vec<Median> {
    let mut out = Vec::new();
    for &n in sizes {
        for algo in Algorithm::ALL {
            let mut xs: Vec<u128> = rows
                .iter()
                .filter(|r| r.n == n)
                .filter_map(|r| r.timing(algo))
                .map(|t| t.micros)
                .collect();
            if xs.is_empty() {
                continue;
            }
            xs.sort_unstable();
            let mid = xs.len() / 2;
            let micros = if xs.len() % 2 == 1 {
                xs[mid] as f64
            } else {
                (xs[mid - 1] + xs[mid]) as f64 / 2.0
            };
            out.push(Median { n, algo, micros });
        }
    }
    out
}

impl BenchReport {
    pub fn median(&self, n: usize, algo: Algorithm) -> Option<f64> {
        self.medians
            .iter()
            .find(|m| m.n == n && m.algo == algo)
            .map(|m| m.micros)
    }

    /// `n,m,P,algo,displacement,micros`, one line per row and solver.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,m,P,algo,displacement,micros\n");
        for r in &self.rows {
            for t in &r.timings {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.n, r.m, r.conflicts, t.algo, t.displacement, t.micros
                ));
            }
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = format!("regime {}\n", self.regime);
        let mut sizes: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        sizes.dedup();
        for n in sizes {
            let nm = (n * n) as u128;
            let p = self
                .rows
                .iter()
                .find(|r| r.n == n)
                .map_or(0, |r| r.conflicts);
            out.push_str(&format!("n={n} n*m={nm} P(first trial)={p}"));
            for algo in Algorithm::ALL {
                if let Some(us) = self.median(n, algo) {
                    out.push_str(&format!(" {algo}={us:.0}us"));
                }
            }
            out.push('\n');
        }
        out
    }
}
