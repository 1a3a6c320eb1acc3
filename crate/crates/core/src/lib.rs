//! Online multiple testing with familywise error rate control.
//!
//! Hypotheses arrive one at a time and each must be decided before the next
//! is seen. The crate provides
//!
//! - the shared domain types: spending weights ([`GammaSequence`]),
//!   local-dependence lags ([`LagStructure`]), forward graph weights
//!   ([`GraphWeights`]) and the append-only stream history
//!   ([`ProcedureState`]);
//! - the online closure principle in [`closure`]: intersection-test
//!   families, the exhaustive closed procedure used as an oracle, the
//!   one-test-per-step short-cut, and falsifiers for predictability and
//!   consonance;
//! - concrete procedures in [`procedures`]: Alpha-Spending, closed
//!   Alpha-Spending, the online graph, ADDIS-Spending under local
//!   dependence and closed ADDIS-Spending, each with its intersection family;
//! - a seeded, parallel Monte Carlo harness in [`simulation`].

pub mod closure;
pub mod error;
pub mod gamma;
pub mod graph;
pub mod lags;
pub mod procedures;
pub mod simulation;
pub mod state;
pub mod validation;

pub use error::{Error, Result};
pub use gamma::{validate_gamma, GammaCache, GammaSequence};
pub use graph::GraphWeights;
pub use lags::{validate_lags, LagStructure};
pub use state::{ProcedureId, ProcedureState, StepPlan, StepRecord};
pub use validation::{ValidationReport, Violation, ViolationKind};
