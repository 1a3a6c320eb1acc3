//! Violation reports for the lazily checked sequence contracts.

use std::fmt;

/// What went wrong at a single index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ViolationKind {
    /// A weight below zero (or NaN).
    Negative { value: f64 },
    /// A partial sum above `1 + SUM_TOLERANCE`.
    Summability { partial_sum: f64 },
    /// A declared non-increasing sequence went up.
    Increasing { previous: f64, value: f64 },
    /// `l_i > i - 1`.
    LagExceedsIndex { lag: usize },
    /// `l_i > l_{i-1} + 1`.
    LagGrowth { previous: usize, lag: usize },
    /// A graph edge pointing backwards or to itself.
    BackwardEdge { target: usize },
}

impl ViolationKind {
    fn discriminant(&self) -> u8 {
        match self {
            ViolationKind::Negative { .. } => 0,
            ViolationKind::Summability { .. } => 1,
            ViolationKind::Increasing { .. } => 2,
            ViolationKind::LagExceedsIndex { .. } => 3,
            ViolationKind::LagGrowth { .. } => 4,
            ViolationKind::BackwardEdge { .. } => 5,
        }
    }

    /// True when both values are the same kind of violation, ignoring payloads.
    pub fn same_kind(&self, other: &ViolationKind) -> bool {
        self.discriminant() == other.discriminant()
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::Negative { value } => write!(f, "negative weight {value}"),
            ViolationKind::Summability { partial_sum } => {
                write!(f, "partial sum {partial_sum} exceeds 1")
            }
            ViolationKind::Increasing { previous, value } => {
                write!(f, "weight {value} exceeds its predecessor {previous}")
            }
            ViolationKind::LagExceedsIndex { lag } => write!(f, "lag {lag} exceeds i - 1"),
            ViolationKind::LagGrowth { previous, lag } => {
                write!(f, "lag {lag} exceeds the previous lag {previous} plus one")
            }
            ViolationKind::BackwardEdge { target } => {
                write!(f, "edge to target {target} does not point forward")
            }
        }
    }
}

/// A violation located at a 1-based index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub index: usize,
    pub kind: ViolationKind,
}

/// The first offending index for each kind of violation, in discovery order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `kind` at `index` unless a violation of the same kind is already present.
    pub fn record(&mut self, index: usize, kind: ViolationKind) {
        if !self.violations.iter().any(|v| v.kind.same_kind(&kind)) {
            self.violations.push(Violation { index, kind });
        }
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}
