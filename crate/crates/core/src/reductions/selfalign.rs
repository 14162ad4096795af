//! Self-aligning string sets.
//!
//! Row `i` of the set is the concatenation of
//!
//! * `n` blocks of width `n`, where block `i` is all 1s and the rest are 0,
//! * `l` copies of the `n x n` identity row `e_i`,
//! * `n²` blocks of width `n²`, one per ordered pair `(a, b)`: row `a` gets
//!   `100…0`, row `b` gets `011…1`, all other rows are 0 (for `a == b` the
//!   two patterns are OR-ed into a run of 1s).
//!
//! Any two rows are compatible when aligned, and shifting one against
//! another by anything from 1 to `l·n` creates a collision. The leftover
//! overlap is bounded by `k = n² + n⁴`.

use std::fmt;

use super::{BitString, ReductionError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfAligningSet {
    strings: Vec<BitString>,
    slack: usize,
    repeats: usize,
}

impl SelfAligningSet {
    /// Wrap arbitrary equal-length strings with a claimed slack `k`.
    pub fn from_parts(strings: Vec<BitString>, slack: usize) -> Result<Self, ReductionError> {
        let len = strings.first().map_or(0, BitString::len);
        if strings.iter().any(|s| s.len() != len) {
            return Err(ReductionError::Invalid("strings differ in length".into()));
        }
        Ok(Self {
            strings,
            slack,
            repeats: 0,
        })
    }

    pub fn strings(&self) -> &[BitString] {
        &self.strings
    }

    pub fn row(&self, i: usize) -> &BitString {
        &self.strings[i]
    }

    pub fn count(&self) -> usize {
        self.strings.len()
    }

    /// Common length `L`.
    pub fn length(&self) -> usize {
        self.strings.first().map_or(0, BitString::len)
    }

    /// Maximum overlap `k` a shifted pair may still have.
    pub fn slack(&self) -> usize {
        self.slack
    }

    /// Number of identity blocks `l`.
    pub fn repeats(&self) -> usize {
        self.repeats
    }
}

/// Build the `n`-row set with `l` identity blocks. Length is
/// `n² + l·n + n⁴`.
pub fn self_aligning(n: usize, l: usize) -> Result<SelfAligningSet, ReductionError> {
    if n < 2 {
        return Err(ReductionError::Invalid(format!(
            "need at least 2 rows, got {n}"
        )));
    }
    if l < 1 {
        return Err(ReductionError::Invalid(
            "need at least one identity block".into(),
        ));
    }
    let n2 = n * n;
    let len = n2 + l * n + n2 * n2;
    let mut strings = vec![BitString::zeros(len); n];

    for (i, s) in strings.iter_mut().enumerate() {
        for c in i * n..(i + 1) * n {
            s.set(c, true);
        }
        for rep in 0..l {
            s.set(n2 + rep * n + i, true);
        }
    }
    let pair_base = n2 + l * n;
    for a in 0..n {
        for b in 0..n {
            let base = pair_base + (a * n + b) * n2;
            strings[a].set(base, true);
            for c in base + 1..base + n2 {
                strings[b].set(c, true);
            }
        }
    }
    Ok(SelfAligningSet {
        strings,
        slack: n2 + n2 * n2,
        repeats: l,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignmentViolation {
    /// Rows `i` and `j` already share a 1 at `column` when aligned.
    AlignedCollision { i: usize, j: usize, column: usize },
    /// Row `j` shifted right by `shift` against row `i` is collision-free.
    FeasibleShift { i: usize, j: usize, shift: usize },
}

impl fmt::Display for AlignmentViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlignmentViolation::AlignedCollision { i, j, column } => {
                write!(
                    f,
                    "rows {i} and {j} collide at column {column} with no shift"
                )
            }
            AlignmentViolation::FeasibleShift { i, j, shift } => {
                write!(
                    f,
                    "row {j} shifted by {shift} against row {i} does not collide"
                )
            }
        }
    }
}

/// Exhaustively check that distinct rows are compatible at shift 0 and
/// incompatible at every shift `1..=L-k`. Reports the lexicographically
/// first failing `(i, j, shift)`.
pub fn verify_self_aligning(sa: &SelfAligningSet) -> Result<(), AlignmentViolation> {
    let n = sa.count();
    for i in 0..n {
        for j in i + 1..n {
            if sa.strings[i].collides_at(&sa.strings[j], 0) {
                let column = sa.strings[i]
                    .ones()
                    .find(|&c| sa.strings[j].get(c))
                    .expect("collision has a column");
                return Err(AlignmentViolation::AlignedCollision { i, j, column });
            }
        }
    }
    let max_shift = sa.length().saturating_sub(sa.slack);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for shift in 1..=max_shift {
                if !sa.strings[i].collides_at(&sa.strings[j], shift as i64) {
                    return Err(AlignmentViolation::FeasibleShift { i, j, shift });
                }
            }
        }
    }
    Ok(())
}
