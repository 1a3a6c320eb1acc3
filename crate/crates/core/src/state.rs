//! Per-stream history shared by every procedure.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProcedureId {
    AlphaSpending,
    ClosedAlphaSpending,
    OnlineGraph,
    Addis,
    ClosedAddis,
}

impl ProcedureId {
    pub const ALL: [ProcedureId; 5] = [
        ProcedureId::AlphaSpending,
        ProcedureId::ClosedAlphaSpending,
        ProcedureId::OnlineGraph,
        ProcedureId::Addis,
        ProcedureId::ClosedAddis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProcedureId::AlphaSpending => "alpha-spending",
            ProcedureId::ClosedAlphaSpending => "closed-alpha-spending",
            ProcedureId::OnlineGraph => "online-graph",
            ProcedureId::Addis => "addis",
            ProcedureId::ClosedAddis => "closed-addis",
        }
    }
}

impl fmt::Display for ProcedureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProcedureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProcedureId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown procedure `{s}`")))
    }
}

/// The planned test of the next hypothesis, fixed before its p-value is seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub alpha_i: f64,
    pub tau: f64,
    pub lambda: f64,
    pub lag: usize,
}

/// One tested hypothesis.
///
/// Procedures without discarding record `tau = 1` and `lambda = α`, so the
/// candidate flags are still well defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub index: usize,
    pub p_value: f64,
    pub alpha_i: f64,
    /// `r_i = 1{P_i ≤ α_i}`.
    pub rejected: bool,
    /// `s_i = 1{P_i ≤ τ_i}`.
    pub candidate: bool,
    /// `c_i = 1{P_i ≤ λ_i}`.
    pub below_lambda: bool,
    pub tau: f64,
    pub lambda: f64,
    pub lag: usize,
}

impl StepRecord {
    fn from_plan(index: usize, p_value: f64, plan: StepPlan) -> Self {
        Self {
            index,
            p_value,
            alpha_i: plan.alpha_i,
            rejected: p_value <= plan.alpha_i,
            candidate: p_value <= plan.tau,
            below_lambda: p_value <= plan.lambda,
            tau: plan.tau,
            lambda: plan.lambda,
            lag: plan.lag,
        }
    }
}

/// Append-only history of a single stream.
///
/// Besides the records it keeps prefix counts of `s_j - c_j` and `1 - r_j`,
/// which every counter `t(i)` is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcedureState {
    procedure: ProcedureId,
    alpha: f64,
    records: Vec<StepRecord>,
    pvalues: Vec<f64>,
    // prefix[k] = sum over j ≤ k; prefix[0] = 0
    spend_prefix: Vec<usize>,
    nonrejection_prefix: Vec<usize>,
}

impl ProcedureState {
    pub fn new(procedure: ProcedureId, alpha: f64) -> Result<Self> {
        validate_alpha(alpha)?;
        Ok(Self {
            procedure,
            alpha,
            records: Vec::new(),
            pvalues: Vec::new(),
            spend_prefix: vec![0],
            nonrejection_prefix: vec![0],
        })
    }

    pub fn procedure(&self) -> ProcedureId {
        self.procedure
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    /// `P_1, ..., P_k` for the `k` tested hypotheses.
    pub fn pvalues(&self) -> &[f64] {
        &self.pvalues
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn next_index(&self) -> usize {
        self.records.len() + 1
    }

    /// `Σ_{j ≤ k} (s_j − c_j)`.
    pub fn spent_candidates(&self, k: usize) -> usize {
        self.spend_prefix[k]
    }

    /// `Σ_{j=from}^{to} (1 − r_j)`; zero for an empty range.
    pub fn non_rejections(&self, from: usize, to: usize) -> usize {
        if from > to {
            return 0;
        }
        self.nonrejection_prefix[to] - self.nonrejection_prefix[from - 1]
    }

    /// Indices rejected so far, ascending.
    pub fn rejections(&self) -> impl Iterator<Item = usize> + '_ {
        self.records.iter().filter(|r| r.rejected).map(|r| r.index)
    }

    pub fn rejected_flags(&self) -> Vec<bool> {
        self.records.iter().map(|r| r.rejected).collect()
    }

    pub(crate) fn append(&mut self, p_value: f64, plan: StepPlan) -> Result<&StepRecord> {
        let index = self.next_index();
        if !(0.0..=1.0).contains(&p_value) {
            return Err(Error::InvalidPValue {
                index,
                value: p_value,
            });
        }
        if !(0.0..1.0).contains(&plan.alpha_i) {
            return Err(Error::InvalidLevel {
                index,
                value: plan.alpha_i,
            });
        }
        let record = StepRecord::from_plan(index, p_value, plan);
        let spend = usize::from(record.candidate) - usize::from(record.below_lambda);
        self.spend_prefix.push(self.spend_prefix[index - 1] + spend);
        self.nonrejection_prefix
            .push(self.nonrejection_prefix[index - 1] + usize::from(!record.rejected));
        self.pvalues.push(p_value);
        self.records.push(record);
        Ok(self.records.last().expect("just pushed"))
    }
}

pub(crate) fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "overall alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(alpha_i: f64) -> StepPlan {
        StepPlan {
            alpha_i,
            tau: 0.8,
            lambda: 0.3,
            lag: 0,
        }
    }

    #[test]
    fn rejection_is_inclusive_even_at_zero_level() {
        let mut state = ProcedureState::new(ProcedureId::Addis, 0.2).unwrap();
        let r = *state.append(0.0, plan(0.0)).unwrap();
        assert!(r.rejected);
        let r = *state.append(0.05, plan(0.05)).unwrap();
        assert!(r.rejected);
        let r = *state
            .append(f64::from_bits(0.05f64.to_bits() + 1), plan(0.05))
            .unwrap();
        assert!(!r.rejected);
    }

    #[test]
    fn prefix_counts_track_flags() {
        let mut state = ProcedureState::new(ProcedureId::Addis, 0.2).unwrap();
        for p in [0.9, 0.5, 0.1, 0.01, 0.5] {
            state.append(p, plan(0.02)).unwrap();
        }
        // s - c: 0.9 -> 0, 0.5 -> 1, 0.1 -> 0, 0.01 -> 0, 0.5 -> 1
        assert_eq!(state.spent_candidates(5), 2);
        assert_eq!(state.spent_candidates(2), 1);
        assert_eq!(state.non_rejections(1, 5), 4);
        assert_eq!(state.non_rejections(4, 4), 0);
        assert_eq!(state.non_rejections(3, 2), 0);
        assert_eq!(state.rejections().collect::<Vec<_>>(), vec![4]);
    }

    #[test]
    fn invalid_inputs_are_refused() {
        assert!(ProcedureState::new(ProcedureId::Addis, 1.0).is_err());
        let mut state = ProcedureState::new(ProcedureId::Addis, 0.2).unwrap();
        assert!(state.append(1.5, plan(0.01)).is_err());
        assert!(state.append(0.5, plan(1.0)).is_err());
        assert!(state.is_empty());
    }

    #[test]
    fn procedure_names_round_trip() {
        for id in ProcedureId::ALL {
            assert_eq!(id.name().parse::<ProcedureId>().unwrap(), id);
        }
        assert!("fallback".parse::<ProcedureId>().is_err());
    }
}
