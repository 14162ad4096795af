//! Scheduling several streams over one channel.
//!
//! [`greedy_sequential`] admits streams one at a time against the running
//! load. [`exact_small`] finds a provably optimal schedule for small
//! instances by branch and bound.
//!
//! The exact search relies on left-justified schedules. Take an optimal
//! schedule that is lexicographically smallest. No group of streams can move
//! one tick earlier together, otherwise a smaller optimum would exist. When
//! a group `U` (none of it at displacement 0) cannot move, some time `t+1`
//! is a breakpoint of both a stream in `U` and a stream outside it. So every
//! stream is linked, through a chain of coinciding breakpoints, to a stream
//! at displacement 0. Placing streams in the order of such a chain means each
//! new displacement is `0` or `T_i + b_i - b_k` for a placed stream `i`, a
//! breakpoint `b_i` of `i` and a breakpoint `b_k` of the new stream.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::admission::min_displacement_morph;
use crate::envelope::{max_combined_height, shift, sum, Bandwidth, Rate, StreamEnvelope, Tick};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiInstance {
    streams: Vec<StreamEnvelope>,
    bandwidth: Bandwidth,
}

impl MultiInstance {
    pub fn new(streams: Vec<StreamEnvelope>, bandwidth: Bandwidth) -> Result<Self, ScheduleError> {
        if streams.is_empty() {
            return Err(ScheduleError::NoStreams);
        }
        Ok(Self { streams, bandwidth })
    }

    pub fn streams(&self) -> &[StreamEnvelope] {
        &self.streams
    }

    pub fn bandwidth(&self) -> Bandwidth {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.streams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.streams.is_empty()
    }

    fn check_heights(&self) -> Result<(), ScheduleError> {
        let b = self.bandwidth.get();
        match self
            .streams
            .iter()
            .enumerate()
            .find(|(_, s)| s.max_height() > b)
        {
            Some((stream, s)) => Err(ScheduleError::StreamTooTall {
                stream,
                height: s.max_height(),
                bandwidth: b,
            }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Latest completion time over all streams.
    #[default]
    Makespan,
    /// Largest displacement.
    LastDisplacement,
}

impl Objective {
    pub fn value(self, inst: &MultiInstance, displacements: &[Tick]) -> Tick {
        match self {
            Objective::Makespan => makespan(inst, displacements),
            Objective::LastDisplacement => displacements.iter().copied().max().unwrap_or(0),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Makespan => "makespan",
            Objective::LastDisplacement => "last_displacement",
        })
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "makespan" => Ok(Objective::Makespan),
            "last_displacement" | "last-displacement" => Ok(Objective::LastDisplacement),
            other => Err(format!("unknown objective `{other}`")),
        }
    }
}

fn makespan(inst: &MultiInstance, displacements: &[Tick]) -> Tick {
    inst.streams
        .iter()
        .zip(displacements)
        .map(|(s, &t)| t + s.len())
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiScheduleResult {
    pub displacements: Vec<Tick>,
    pub makespan: Tick,
    pub last_displacement: Tick,
}

impl MultiScheduleResult {
    pub fn from_displacements(inst: &MultiInstance, displacements: Vec<Tick>) -> Self {
        Self {
            makespan: makespan(inst, &displacements),
            last_displacement: displacements.iter().copied().max().unwrap_or(0),
            displacements,
        }
    }

    pub fn objective(&self, objective: Objective) -> Tick {
        match objective {
            Objective::Makespan => self.makespan,
            Objective::LastDisplacement => self.last_displacement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("instance has no streams")]
    NoStreams,
    #[error("stream {stream} peaks at {height}, above channel bandwidth {bandwidth}")]
    StreamTooTall {
        stream: usize,
        height: Rate,
        bandwidth: Rate,
    },
    #[error("order is not a permutation of 0..{0}")]
    BadOrder(usize),
    #[error("search budget of {budget} nodes exhausted before optimality was proven")]
    BudgetExceeded {
        budget: u64,
        incumbent: MultiScheduleResult,
    },
}

/// Problems found by [`verify_schedule`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleViolation {
    #[error("expected {expected} displacements, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("stream {stream} has negative displacement {displacement}")]
    NegativeDisplacement { stream: usize, displacement: Tick },
    #[error("load {load} exceeds bandwidth {bandwidth} at t={time}")]
    Overallocation {
        time: Tick,
        load: Rate,
        bandwidth: Rate,
    },
    #[error("reported {field} is {reported}, schedule gives {actual}")]
    ObjectiveMismatch {
        field: &'static str,
        reported: Tick,
        actual: Tick,
    },
}

/// Streams by decreasing area, ties by index.
pub fn default_order(inst: &MultiInstance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(inst.streams[i].area()));
    order
}

/// Admit streams in `order`, each at its minimal displacement against the
/// sum of the ones already placed.
pub fn greedy_sequential(
    inst: &MultiInstance,
    order: &[usize],
) -> Result<MultiScheduleResult, ScheduleError> {
    let m = inst.len();
    let mut seen = vec![false; m];
    if order.len() != m
        || order
            .iter()
            .any(|&i| i >= m || std::mem::replace(&mut seen[i], true))
    {
        return Err(ScheduleError::BadOrder(m));
    }
    inst.check_heights()?;

    let mut load = StreamEnvelope::empty();
    let mut displacements = vec![0; m];
    for &k in order {
        let stream = &inst.streams[k];
        let t = min_displacement_morph(&load, stream, inst.bandwidth)
            .expect("load and stream heights already checked against bandwidth")
            .displacement;
        displacements[k] = t;
        load = sum(&load, &shift(stream, t).expect("non-negative"));
    }
    Ok(MultiScheduleResult::from_displacements(inst, displacements))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOutcome {
    pub result: MultiScheduleResult,
    pub nodes: u64,
}

/// Optimal schedule by depth-first branch and bound. Ties on the objective
/// go to the lexicographically smallest displacement vector.
pub fn exact_small(
    inst: &MultiInstance,
    objective: Objective,
    budget: u64,
) -> Result<ExactOutcome, ScheduleError> {
    let incumbent = greedy_sequential(inst, &default_order(inst))?;
    let mut search = Search {
        inst,
        objective,
        budget,
        nodes: 0,
        best_value: incumbent.objective(objective),
        best: incumbent.displacements,
        visited: HashSet::new(),
        breakpoints: inst
            .streams
            .iter()
            .map(|s| {
                let mut b: Vec<Tick> = s.breakpoints().collect();
                if b.is_empty() {
                    b.push(0);
                }
                b
            })
            .collect(),
    };
    let mut placed = vec![None; inst.len()];
    let finished = search.descend(&mut placed, &StreamEnvelope::empty(), 0);
    let result = MultiScheduleResult::from_displacements(inst, search.best);
    if finished {
        Ok(ExactOutcome {
            result,
            nodes: search.nodes,
        })
    } else {
        Err(ScheduleError::BudgetExceeded {
            budget,
            incumbent: result,
        })
    }
}

struct Search<'a> {
    inst: &'a MultiInstance,
    objective: Objective,
    budget: u64,
    nodes: u64,
    best_value: Tick,
    best: Vec<Tick>,
    visited: HashSet<Vec<Option<Tick>>>,
    breakpoints: Vec<Vec<Tick>>,
}

impl Search<'_> {
    fn lower_bound(&self, placed: &[Option<Tick>]) -> Tick {
        let streams = &self.inst.streams;
        match self.objective {
            Objective::Makespan => placed
                .iter()
                .enumerate()
                .map(|(i, t)| match t {
                    Some(t) => t + streams[i].len(),
                    None => streams[i].len(),
                })
                .max()
                .unwrap_or(0),
            Objective::LastDisplacement => placed.iter().flatten().copied().max().unwrap_or(0),
        }
    }

    fn candidates(&self, placed: &[Option<Tick>], k: usize) -> Vec<Tick> {
        let mut out = vec![0];
        for (i, t) in placed.iter().enumerate() {
            let Some(t) = t else { continue };
            for &bi in &self.breakpoints[i] {
                for &bk in &self.breakpoints[k] {
                    let c = t + bi - bk;
                    if c > 0 {
                        out.push(c);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Returns false once the node budget runs out.
    fn descend(
        &mut self,
        placed: &mut Vec<Option<Tick>>,
        load: &StreamEnvelope,
        count: usize,
    ) -> bool {
        let m = placed.len();
        if count == m {
            let ds: Vec<Tick> = placed.iter().map(|t| t.expect("complete")).collect();
            let value = self.objective.value(self.inst, &ds);
            if (value, &ds) < (self.best_value, &self.best) {
                self.best_value = value;
                self.best = ds;
            }
            return true;
        }
        if self.lower_bound(placed) > self.best_value {
            return true;
        }
        let b = self.inst.bandwidth.get();
        for k in 0..m {
            if placed[k].is_some() {
                continue;
            }
            let stream = &self.inst.streams[k];
            let cands = if count == 0 {
                vec![0]
            } else {
                self.candidates(placed, k)
            };
            for t in cands {
                let own = match self.objective {
                    Objective::Makespan => t + stream.len(),
                    Objective::LastDisplacement => t,
                };
                if own > self.best_value {
                    break;
                }
                if max_combined_height(load, stream, t) > b {
                    continue;
                }
                placed[k] = Some(t);
                if self.visited.insert(placed.clone()) {
                    self.nodes += 1;
                    if self.nodes > self.budget {
                        placed[k] = None;
                        return false;
                    }
                    let next = sum(load, &shift(stream, t).expect("non-negative"));
                    if !self.descend(placed, &next, count + 1) {
                        placed[k] = None;
                        return false;
                    }
                }
                placed[k] = None;
            }
        }
        true
    }
}

/// Check a schedule against its instance: one non-negative displacement per
/// stream, channel never overallocated, reported objectives consistent.
pub fn verify_schedule(
    inst: &MultiInstance,
    result: &MultiScheduleResult,
) -> Result<(), ScheduleViolation> {
    let ds = &result.displacements;
    if ds.len() != inst.len() {
        return Err(ScheduleViolation::WrongLength {
            expected: inst.len(),
            got: ds.len(),
        });
    }
    if let Some((stream, &displacement)) = ds.iter().enumerate().find(|(_, &t)| t < 0) {
        return Err(ScheduleViolation::NegativeDisplacement {
            stream,
            displacement,
        });
    }

    let mut events: Vec<(Tick, i128)> = Vec::new();
    for (s, &t) in inst.streams.iter().zip(ds) {
        for p in s.peaks().iter().filter(|p| p.height > 0) {
            events.push((p.start + t, p.height as i128));
            events.push((p.end + t, -(p.height as i128)));
        }
    }
    events.sort_unstable();
    let b = inst.bandwidth.get();
    let mut load: i128 = 0;
    let mut i = 0;
    while i < events.len() {
        let time = events[i].0;
        while i < events.len() && events[i].0 == time {
            load += events[i].1;
            i += 1;
        }
        if load > b as i128 {
            return Err(ScheduleViolation::Overallocation {
                time,
                load: load as Rate,
                bandwidth: b,
            });
        }
    }

    let actual = makespan(inst, ds);
    if result.makespan != actual {
        return Err(ScheduleViolation::ObjectiveMismatch {
            field: "makespan",
            reported: result.makespan,
            actual,
        });
    }
    let actual = ds.iter().copied().max().unwrap_or(0);
    if result.last_displacement != actual {
        return Err(ScheduleViolation::ObjectiveMismatch {
            field: "last_displacement",
            reported: result.last_displacement,
            actual,
        });
    }
    Ok(())
}
