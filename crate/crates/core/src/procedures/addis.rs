//! ADDIS-Spending under local dependence and its closure.
//!
//! Both procedures test `H_i` at `α (τ_i − λ_i) γ_{t(i)}` and differ only in
//! the counter. Outside the lag window `{i − l_i, ..., i − 1}` each p-value in
//! `(λ_j, τ_j]` advances the counter while p-values above `τ_j` (discarded) or
//! at most `λ_j` (likely discoveries) do not. Inside the window ADDIS-Spending
//! counts every index, the closed variant only the accepted ones.

use std::fmt;
use std::sync::Arc;

use super::{require_nonincreasing, LevelRule};
use crate::closure::LevelFamily;
use crate::error::{Error, Result};
use crate::gamma::{GammaCache, GammaSequence};
use crate::lags::{LagCache, LagStructure};
use crate::state::{validate_alpha, ProcedureId, ProcedureState, StepPlan};

type ParamFn = dyn Fn(usize, &[f64]) -> f64 + Send + Sync;

/// Discarding threshold `τ_i` and candidate threshold `λ_i`.
///
/// Generators receive the index `i` and only the p-values
/// `P_1, ..., P_{i − l_i − 1}`.
#[derive(Clone)]
pub struct AddisParams {
    tau: Arc<ParamFn>,
    lambda: Arc<ParamFn>,
    constant: Option<(f64, f64)>,
}

impl fmt::Debug for AddisParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.constant {
            Some((tau, lambda)) => write!(f, "AddisParams {{ tau: {tau}, lambda: {lambda} }}"),
            None => write!(f, "AddisParams {{ .. }}"),
        }
    }
}

impl AddisParams {
    pub fn constant(tau: f64, lambda: f64) -> Result<Self> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::InvalidParameter("tau must lie in (0, 1]".into()));
        }
        if !(lambda >= 0.0 && lambda < tau) {
            return Err(Error::InvalidParameter(
                "lambda must lie in [alpha*tau, tau)".into(),
            ));
        }
        Ok(Self {
            tau: Arc::new(move |_, _| tau),
            lambda: Arc::new(move |_, _| lambda),
            constant: Some((tau, lambda)),
        })
    }

    pub fn from_fn<T, L>(tau: T, lambda: L) -> Self
    where
        T: Fn(usize, &[f64]) -> f64 + Send + Sync + 'static,
        L: Fn(usize, &[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            tau: Arc::new(tau),
            lambda: Arc::new(lambda),
            constant: None,
        }
    }

    pub fn as_constant(&self) -> Option<(f64, f64)> {
        self.constant
    }

    /// Validated `(τ_i, λ_i)` with `α τ_i ≤ λ_i < τ_i ≤ 1`.
    pub fn evaluate(&self, i: usize, visible: &[f64], alpha: f64) -> Result<(f64, f64)> {
        let tau = (self.tau)(i, visible);
        let lambda = (self.lambda)(i, visible);
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must lie in (0, 1], got {tau} at index {i}"
            )));
        }
        if !(lambda >= alpha * tau && lambda < tau) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in [alpha*tau, tau), got {lambda} with tau {tau} at index {i}"
            )));
        }
        Ok((tau, lambda))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Counter {
    Addis,
    Closed,
}

#[derive(Debug, Clone)]
struct AddisCore {
    alpha: f64,
    gamma: GammaCache,
    lags: LagCache,
    params: AddisParams,
}

impl AddisCore {
    fn new(
        id: ProcedureId,
        alpha: f64,
        gamma: GammaSequence,
        lags: LagStructure,
        params: AddisParams,
    ) -> Result<Self> {
        validate_alpha(alpha)?;
        require_nonincreasing(&gamma, id)?;
        Ok(Self {
            alpha,
            gamma: GammaCache::new(gamma),
            lags: LagCache::new(lags),
            params,
        })
    }

    fn plan(&mut self, history: &ProcedureState, counter: Counter) -> Result<StepPlan> {
        let i = history.next_index();
        let lag = self.lags.get(i)?;
        let independent_upto = i - lag - 1;
        let (tau, lambda) =
            self.params
                .evaluate(i, &history.pvalues()[..independent_upto], self.alpha)?;
        let spent = history.spent_candidates(independent_upto);
        let t = match counter {
            Counter::Addis => 1 + lag + spent,
            Counter::Closed => 1 + spent + history.non_rejections(independent_upto + 1, i - 1),
        };
        Ok(StepPlan {
            alpha_i: self.alpha * (tau - lambda) * self.gamma.get(t)?,
            tau,
            lambda,
            lag,
        })
    }
}

/// ADDIS-Spending: `t(i) = 1 + l_i + Σ_{j ≤ i − l_i − 1} (s_j − c_j)`.
#[derive(Debug, Clone)]
pub struct AddisSpending(AddisCore);

impl AddisSpending {
    pub fn new(
        alpha: f64,
        gamma: GammaSequence,
        lags: LagStructure,
        params: AddisParams,
    ) -> Result<Self> {
        AddisCore::new(ProcedureId::Addis, alpha, gamma, lags, params).map(Self)
    }
}

impl LevelRule for AddisSpending {
    fn id(&self) -> ProcedureId {
        ProcedureId::Addis
    }

    fn alpha(&self) -> f64 {
        self.0.alpha
    }

    fn plan(&mut self, history: &ProcedureState) -> Result<StepPlan> {
        self.0.plan(history, Counter::Addis)
    }
}

/// Closed ADDIS-Spending:
/// `t(i) = 1 + Σ_{j ≤ i − l_i − 1} (s_j − c_j) + Σ_{j = i − l_i}^{i − 1} (1 − r_j)`.
#[derive(Debug, Clone)]
pub struct ClosedAddisSpending(AddisCore);

impl ClosedAddisSpending {
    pub fn new(
        alpha: f64,
        gamma: GammaSequence,
        lags: LagStructure,
        params: AddisParams,
    ) -> Result<Self> {
        AddisCore::new(ProcedureId::ClosedAddis, alpha, gamma, lags, params).map(Self)
    }
}

impl LevelRule for ClosedAddisSpending {
    fn id(&self) -> ProcedureId {
        ProcedureId::ClosedAddis
    }

    fn alpha(&self) -> f64 {
        self.0.alpha
    }

    fn plan(&mut self, history: &ProcedureState) -> Result<StepPlan> {
        self.0.plan(history, Counter::Closed)
    }
}

/// ADDIS-Spending intersection tests:
/// `α_i^I = α (τ_i − λ_i) γ_{t_I(i)}` with
/// `t_I(i) = 1 + |L_i ∩ I| + Σ_{j ∈ I, j ≤ i − l_i − 1} (s_j − c_j)` and
/// `L_i = {i − l_i, ..., i − 1}`.
#[derive(Debug, Clone)]
pub struct AddisFamily {
    pub alpha: f64,
    pub gamma: GammaSequence,
    pub lags: LagStructure,
    pub params: AddisParams,
}

impl AddisFamily {
    pub fn new(
        alpha: f64,
        gamma: GammaSequence,
        lags: LagStructure,
        params: AddisParams,
    ) -> Result<Self> {
        validate_alpha(alpha)?;
        Ok(Self {
            alpha,
            gamma,
            lags,
            params,
        })
    }

    fn window_start(&self, i: usize) -> Result<usize> {
        let lag = self.lags.lag(i);
        if lag > i - 1 {
            return Err(Error::InvalidParameter(format!(
                "lag {lag} at index {i} exceeds i - 1"
            )));
        }
        Ok(i - lag)
    }

    /// `α_i^I` for a member `i` of `set`; `pvalues` covers at least `1..i`.
    pub fn level_of(&self, set: &[usize], i: usize, pvalues: &[f64]) -> Result<f64> {
        let pos = set.partition_point(|&j| j < i);
        if set.get(pos) != Some(&i) {
            return Err(Error::NotMember { index: i });
        }
        if pvalues.len() < i - 1 {
            return Err(Error::InvalidParameter(format!(
                "level of index {i} needs {} earlier p-values",
                i - 1
            )));
        }
        let start = self.window_start(i)?;
        let mut t = 1;
        for &j in &set[..pos] {
            if j >= start {
                t += 1;
            } else {
                let visible = &pvalues[..self.window_start(j)? - 1];
                let (tau, lambda) = self.params.evaluate(j, visible, self.alpha)?;
                let p = pvalues[j - 1];
                if p <= tau && p > lambda {
                    t += 1;
                }
            }
        }
        let (tau, lambda) = self.params.evaluate(i, &pvalues[..start - 1], self.alpha)?;
        let weight = self.gamma.weight(t);
        if weight.is_nan() || weight < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma weight {weight} at index {t} is negative"
            )));
        }
        Ok(self.alpha * (tau - lambda) * weight)
    }
}

impl LevelFamily for AddisFamily {
    fn level(&self, prefix: &[usize], earlier: &[f64]) -> Result<f64> {
        let i = *prefix
            .last()
            .ok_or(Error::InvalidIndexSet("empty prefix".into()))?;
        self.level_of(prefix, i, earlier)
    }

    fn critical_values(&self, n: usize) -> Vec<f64> {
        let Some((tau, lambda)) = self.params.as_constant() else {
            return Vec::new();
        };
        let mut values: Vec<f64> = (1..=n)
            .map(|k| self.alpha * (tau - lambda) * self.gamma.weight(k))
            .collect();
        values.extend([tau, lambda]);
        values
    }
}
