use super::{plain_plan, require_nonincreasing, LevelRule};
use crate::closure::LevelFamily;
use crate::error::{Error, Result};
use crate::gamma::{GammaCache, GammaSequence};
use crate::state::{validate_alpha, ProcedureId, ProcedureState, StepPlan};

/// Online weighted Bonferroni: `α_i = α γ_i`.
#[derive(Debug, Clone)]
pub struct AlphaSpending {
    alpha: f64,
    gamma: GammaCache,
}

impl AlphaSpending {
    pub fn new(alpha: f64, gamma: GammaSequence) -> Result<Self> {
        validate_alpha(alpha)?;
        Ok(Self {
            alpha,
            gamma: GammaCache::new(gamma),
        })
    }
}

impl LevelRule for AlphaSpending {
    fn id(&self) -> ProcedureId {
        ProcedureId::AlphaSpending
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn plan(&mut self, history: &ProcedureState) -> Result<StepPlan> {
        let i = history.next_index();
        Ok(plain_plan(self.alpha * self.gamma.get(i)?, self.alpha))
    }
}

/// Short-cut of the closure of Alpha-Spending: `α_i = α γ_{t(i)}` with
/// `t(i) = 1 + #{j < i : H_j accepted}`, so every rejection hands its weight
/// on to the next hypothesis.
#[derive(Debug, Clone)]
pub struct ClosedAlphaSpending {
    alpha: f64,
    gamma: GammaCache,
}

impl ClosedAlphaSpending {
    pub fn new(alpha: f64, gamma: GammaSequence) -> Result<Self> {
        validate_alpha(alpha)?;
        require_nonincreasing(&gamma, ProcedureId::ClosedAlphaSpending)?;
        Ok(Self {
            alpha,
            gamma: GammaCache::new(gamma),
        })
    }
}

impl LevelRule for ClosedAlphaSpending {
    fn id(&self) -> ProcedureId {
        ProcedureId::ClosedAlphaSpending
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn plan(&mut self, history: &ProcedureState) -> Result<StepPlan> {
        let i = history.next_index();
        let t = 1 + history.non_rejections(1, i - 1);
        Ok(plain_plan(self.alpha * self.gamma.get(t)?, self.alpha))
    }
}

/// Alpha-Spending applied to the subsequence `I`:
/// `α_i^I = α γ_{t_I(i)}` with `t_I(i) = |{j ∈ I : j ≤ i}|`.
///
/// Predictable for any `γ`; consonant when `γ` is non-increasing.
#[derive(Debug, Clone)]
pub struct AlphaSpendingFamily {
    pub alpha: f64,
    pub gamma: GammaSequence,
}

impl AlphaSpendingFamily {
    pub fn new(alpha: f64, gamma: GammaSequence) -> Result<Self> {
        validate_alpha(alpha)?;
        Ok(Self { alpha, gamma })
    }

    /// `α_i^I` for a member `i` of the sorted set `set`.
    pub fn level_of(&self, set: &[usize], i: usize) -> Result<f64> {
        let rank = set.partition_point(|&j| j < i);
        if set.get(rank) != Some(&i) {
            return Err(Error::NotMember { index: i });
        }
        let weight = self.gamma.weight(rank + 1);
        if weight.is_nan() || weight < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma weight {weight} at index {} is negative",
                rank + 1
            )));
        }
        Ok(self.alpha * weight)
    }
}

impl LevelFamily for AlphaSpendingFamily {
    fn level(&self, prefix: &[usize], _earlier: &[f64]) -> Result<f64> {
        let i = *prefix
            .last()
            .ok_or(Error::InvalidIndexSet("empty prefix".into()))?;
        self.level_of(prefix, i)
    }

    fn critical_values(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.alpha * self.gamma.weight(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procedures::OnlineTester;

    const ALPHA: f64 = 0.2;

    fn gamma1() -> f64 {
        6.0 / (std::f64::consts::PI * std::f64::consts::PI)
    }

    #[test]
    fn plain_levels() {
        let mut t =
            OnlineTester::new(AlphaSpending::new(ALPHA, GammaSequence::inverse_square()).unwrap())
                .unwrap();
        let a1 = t.next_level().unwrap();
        assert!((a1 - 0.121585).abs() < 1e-6);
        assert_eq!(a1, ALPHA * gamma1());
        t.test(0.5).unwrap();
        let a2 = t.next_level().unwrap();
        assert!((a2 - 0.030396).abs() < 1e-6);

        let mut t = OnlineTester::new(
            AlphaSpending::new(ALPHA, GammaSequence::from_list(vec![1.0])).unwrap(),
        )
        .unwrap();
        t.test(0.5).unwrap();
        assert_eq!(t.next_level().unwrap(), 0.0);
    }

    #[test]
    fn closed_levels_follow_rejections() {
        let gamma = GammaSequence::inverse_square();
        let mut t =
            OnlineTester::new(ClosedAlphaSpending::new(ALPHA, gamma.clone()).unwrap()).unwrap();
        assert_eq!(t.next_level().unwrap(), ALPHA * gamma.weight(1));
        assert!(t.test(0.05).unwrap().rejected);
        assert!((t.next_level().unwrap() - 0.121585).abs() < 1e-6);

        let mut t =
            OnlineTester::new(ClosedAlphaSpending::new(ALPHA, gamma.clone()).unwrap()).unwrap();
        assert!(!t.test(0.9).unwrap().rejected);
        assert!((t.next_level().unwrap() - 0.030396).abs() < 1e-6);
    }

    #[test]
    fn intersection_levels_use_rank_in_set() {
        let f = AlphaSpendingFamily::new(ALPHA, GammaSequence::inverse_square()).unwrap();
        let g = &f.gamma;
        assert_eq!(f.level_of(&[1, 3], 3).unwrap(), ALPHA * g.weight(2));
        assert_eq!(f.level_of(&[5], 5).unwrap(), ALPHA * g.weight(1));
        assert_eq!(f.level_of(&[1, 2, 3], 3).unwrap(), ALPHA * g.weight(3));
        assert!(matches!(
            f.level_of(&[1, 3], 2),
            Err(Error::NotMember { index: 2 })
        ));
    }
}
