//! Instance constructors linking SCP, two-stream scheduling, String Pack,
//! multi-stream scheduling and Vertex Color, each paired with a brute-force
//! solver so the round trips can be checked mechanically.

mod bits;
pub mod coloring;
pub mod scp;
pub mod selfalign;
pub mod stringpack;

pub use bits::BitString;
pub use coloring::{
    colors_from_span, graph_to_stringpack, group_respecting_span, min_group_respecting_span,
    vertex_color_brute, ColoringReduction, Graph, GroupPacking,
};
pub use scp::{scp_brute, scp_to_2ss, ScpInstance, ScpReduction};
pub use selfalign::{self_aligning, verify_self_aligning, AlignmentViolation, SelfAligningSet};
pub use stringpack::{stringpack_brute, stringpack_to_mss, Packing, StringPackInstance};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("search budget exceeded: {needed} > {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("graph has {vertices} vertices, above the brute-force limit of {limit}")]
    TooManyVertices { vertices: usize, limit: usize },
    #[error("flank repetition l={l} too small: {reason}; try l >= {suggested}")]
    FlankTooShort {
        l: usize,
        reason: String,
        suggested: usize,
    },
    #[error(
        "span {span} matches no group count for string length {string_length} and slack {slack}"
    )]
    MalformedSpan {
        span: usize,
        string_length: usize,
        slack: usize,
    },
}
