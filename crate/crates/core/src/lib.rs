//! Admission control and displacement scheduling for pre-smoothed VBR
//! streams over a shared constant-bandwidth channel.
//!
//! Envelopes are integer step functions. [`admission`] finds the smallest
//! delay that lets a new stream join a committed load, [`multistream`]
//! schedules several streams together, and [`reductions`] builds the
//! hardness constructions with brute-force checkers.

pub mod admission;
pub mod bench;
pub mod envelope;
pub mod gen;
pub mod io;
pub mod multistream;
pub mod reductions;

pub use admission::{
    feasible, forbidden_interval, min_displacement_morph, min_displacement_naive,
    min_displacement_oracle, AdmissionError, AdmissionResult, Algorithm, ForbiddenInterval,
};
pub use envelope::{
    max_combined_height, normalize, shift, sum, validate, Bandwidth, EnvelopeError, Peak, Rate,
    StreamEnvelope, Tick, Violation,
};
pub use multistream::{
    exact_small, greedy_sequential, verify_schedule, MultiInstance, MultiScheduleResult, Objective,
    ScheduleError,
};
