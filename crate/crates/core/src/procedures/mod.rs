//! Online α-adjustment procedures and the intersection-test families they
//! are the short-cuts of.
//!
//! A procedure is a [`LevelRule`] driven by an [`OnlineTester`]: the rule
//! plans the level of the next hypothesis from the history alone, the tester
//! then compares the arriving p-value against it and appends the record.

mod addis;
mod alpha_spending;
mod online_graph;

pub use addis::{AddisFamily, AddisParams, AddisSpending, ClosedAddisSpending};
pub use alpha_spending::{AlphaSpending, AlphaSpendingFamily, ClosedAlphaSpending};
pub use online_graph::{
    offline_graph, BackwardAllocatingFamily, GraphVariant, OnlineGraph, OnlineGraphFamily,
};

use crate::error::{Error, Result};
use crate::gamma::GammaSequence;
use crate::graph::GraphWeights;
use crate::lags::LagStructure;
use crate::state::{ProcedureId, ProcedureState, StepPlan, StepRecord};

/// Computes the plan for the next hypothesis of a stream.
///
/// `plan` must be a pure function of the history: calling it twice for the
/// same state returns the same plan.
pub trait LevelRule: Send {
    fn id(&self) -> ProcedureId;
    fn alpha(&self) -> f64;
    fn plan(&mut self, history: &ProcedureState) -> Result<StepPlan>;
}

impl<R: LevelRule + ?Sized> LevelRule for Box<R> {
    fn id(&self) -> ProcedureId {
        (**self).id()
    }

    fn alpha(&self) -> f64 {
        (**self).alpha()
    }

    fn plan(&mut self, history: &ProcedureState) -> Result<StepPlan> {
        (**self).plan(history)
    }
}

/// Plan for procedures without discarding.
pub(crate) fn plain_plan(alpha_i: f64, alpha: f64) -> StepPlan {
    StepPlan {
        alpha_i,
        tau: 1.0,
        lambda: alpha,
        lag: 0,
    }
}

/// A single stream tested by one procedure.
#[derive(Debug, Clone)]
pub struct OnlineTester<R> {
    rule: R,
    state: ProcedureState,
}

impl<R: LevelRule> OnlineTester<R> {
    pub fn new(rule: R) -> Result<Self> {
        let state = ProcedureState::new(rule.id(), rule.alpha())?;
        Ok(Self { rule, state })
    }

    /// Level the next hypothesis will be tested at.
    pub fn next_level(&mut self) -> Result<f64> {
        Ok(self.rule.plan(&self.state)?.alpha_i)
    }

    /// Tests the next hypothesis.
    pub fn test(&mut self, p_value: f64) -> Result<StepRecord> {
        let plan = self.rule.plan(&self.state)?;
        self.state.append(p_value, plan).copied()
    }

    /// Tests every p-value in order and returns their rejection flags.
    pub fn run(&mut self, pvalues: &[f64]) -> Result<Vec<bool>> {
        pvalues
            .iter()
            .map(|&p| self.test(p).map(|r| r.rejected))
            .collect()
    }

    pub fn state(&self) -> &ProcedureState {
        &self.state
    }

    pub fn rule(&self) -> &R {
        &self.rule
    }

    pub fn into_state(self) -> ProcedureState {
        self.state
    }
}

/// Which procedure to build, with its procedure-specific parameters.
#[derive(Debug, Clone)]
pub enum ProcedureSpec {
    AlphaSpending,
    ClosedAlphaSpending,
    OnlineGraph {
        weights: GraphWeights,
        variant: GraphVariant,
    },
    Addis,
    ClosedAddis,
}

/// Parameters shared by every procedure of an experiment.
#[derive(Debug, Clone)]
pub struct ProcedureSettings {
    pub alpha: f64,
    pub gamma: GammaSequence,
    pub lags: LagStructure,
    pub addis: AddisParams,
}

impl ProcedureSpec {
    pub fn id(&self) -> ProcedureId {
        match self {
            ProcedureSpec::AlphaSpending => ProcedureId::AlphaSpending,
            ProcedureSpec::ClosedAlphaSpending => ProcedureId::ClosedAlphaSpending,
            ProcedureSpec::OnlineGraph { .. } => ProcedureId::OnlineGraph,
            ProcedureSpec::Addis => ProcedureId::Addis,
            ProcedureSpec::ClosedAddis => ProcedureId::ClosedAddis,
        }
    }

    /// Spec with default procedure-specific parameters (zero graph weights).
    pub fn from_id(id: ProcedureId) -> Self {
        match id {
            ProcedureId::AlphaSpending => ProcedureSpec::AlphaSpending,
            ProcedureId::ClosedAlphaSpending => ProcedureSpec::ClosedAlphaSpending,
            ProcedureId::OnlineGraph => ProcedureSpec::OnlineGraph {
                weights: GraphWeights::Zero,
                variant: GraphVariant::default(),
            },
            ProcedureId::Addis => ProcedureSpec::Addis,
            ProcedureId::ClosedAddis => ProcedureSpec::ClosedAddis,
        }
    }

    pub fn build(&self, settings: &ProcedureSettings) -> Result<OnlineTester<Box<dyn LevelRule>>> {
        let s = settings;
        let rule: Box<dyn LevelRule> = match self {
            ProcedureSpec::AlphaSpending => Box::new(AlphaSpending::new(s.alpha, s.gamma.clone())?),
            ProcedureSpec::ClosedAlphaSpending => {
                Box::new(ClosedAlphaSpending::new(s.alpha, s.gamma.clone())?)
            }
            ProcedureSpec::OnlineGraph { weights, variant } => Box::new(OnlineGraph::new(
                s.alpha,
                s.gamma.clone(),
                weights.clone(),
                *variant,
            )?),
            ProcedureSpec::Addis => Box::new(AddisSpending::new(
                s.alpha,
                s.gamma.clone(),
                s.lags.clone(),
                s.addis.clone(),
            )?),
            ProcedureSpec::ClosedAddis => Box::new(ClosedAddisSpending::new(
                s.alpha,
                s.gamma.clone(),
                s.lags.clone(),
                s.addis.clone(),
            )?),
        };
        OnlineTester::new(rule)
    }
}

pub(crate) fn require_nonincreasing(gamma: &GammaSequence, procedure: ProcedureId) -> Result<()> {
    if gamma.declared_nonincreasing() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{procedure} requires a non-increasing gamma sequence"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> ProcedureSettings {
        ProcedureSettings {
            alpha: 0.2,
            gamma: GammaSequence::inverse_square(),
            lags: LagStructure::batch(3).unwrap(),
            addis: AddisParams::constant(0.8, 0.3).unwrap(),
        }
    }

    #[test]
    fn replay_reproduces_records() {
        let ps = crate::closure::mixed_pvectors(60, 1, 3).remove(0);
        for id in ProcedureId::ALL {
            let spec = ProcedureSpec::from_id(id);
            let mut a = spec.build(&settings()).unwrap();
            a.run(&ps).unwrap();
            let mut b = spec.build(&settings()).unwrap();
            for &p in &ps {
                b.next_level().unwrap();
                b.test(p).unwrap();
            }
            assert_eq!(a.state(), b.state(), "{id}");
            assert_eq!(a.state().procedure(), id);
        }
    }

    #[test]
    fn records_are_consistent() {
        let ps = crate::closure::mixed_pvectors(200, 1, 4).remove(0);
        for id in ProcedureId::ALL {
            let mut t = ProcedureSpec::from_id(id).build(&settings()).unwrap();
            t.run(&ps).unwrap();
            for (k, r) in t.state().records().iter().enumerate() {
                assert_eq!(r.index, k + 1);
                assert_eq!(r.rejected, r.p_value <= r.alpha_i);
                assert!(!r.below_lambda || r.candidate);
                assert!((0.0..1.0).contains(&r.alpha_i));
            }
        }
    }

    #[test]
    fn closed_procedures_refuse_increasing_gamma() {
        let mut s = settings();
        s.gamma = GammaSequence::from_list(vec![0.0, 1.0]);
        assert!(ProcedureSpec::ClosedAlphaSpending.build(&s).is_err());
        assert!(ProcedureSpec::Addis.build(&s).is_err());
        assert!(ProcedureSpec::ClosedAddis.build(&s).is_err());
        assert!(ProcedureSpec::AlphaSpending.build(&s).is_ok());
    }
}
