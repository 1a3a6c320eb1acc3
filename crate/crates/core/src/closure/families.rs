//! Families that are not built from a shared online level rule.

use super::{validate_set, IntersectionFamily};
use crate::error::Result;

/// Offline Bonferroni intersection tests: `φ_I = 1 ⇔ ∃ i ∈ I: P_i ≤ α / |I|`.
///
/// Each `φ_I` is an online test, yet adding a future index halves the level
/// of the others, so the family is not predictable and its closure is not an
/// online procedure. On two hypotheses it is the smallest such example.
#[derive(Debug, Clone, Copy)]
pub struct BonferroniFamily {
    pub alpha: f64,
}

impl IntersectionFamily for BonferroniFamily {
    fn reject(&self, set: &[usize], pvalues: &[f64]) -> Result<bool> {
        validate_set(set, pvalues.len())?;
        let level = self.alpha / set.len() as f64;
        Ok(set.iter().any(|&i| pvalues[i - 1] <= level))
    }

    fn critical_values(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.alpha / k as f64).collect()
    }
}

/// The family `φ_I = 1 ⇔ ∃ i ∈ I: φ_i = 1` induced by an online procedure.
///
/// Its closed procedure reproduces the procedure's own decisions, and it is
/// predictable since `φ_I = 1` forces `φ_K = 1` for every `K ⊇ I`.
pub struct ProcedureClosure<R> {
    run: R,
}

/// Wraps `run`, which maps a p-value prefix to the procedure's per-index
/// decisions on that prefix.
pub fn closure_of_procedure<R>(run: R) -> ProcedureClosure<R>
where
    R: Fn(&[f64]) -> Result<Vec<bool>>,
{
    ProcedureClosure { run }
}

impl<R> IntersectionFamily for ProcedureClosure<R>
where
    R: Fn(&[f64]) -> Result<Vec<bool>>,
{
    fn reject(&self, set: &[usize], pvalues: &[f64]) -> Result<bool> {
        validate_set(set, pvalues.len())?;
        let max = *set.last().expect("validated nonempty");
        let decisions = (self.run)(&pvalues[..max])?;
        Ok(set.iter().any(|&i| decisions[i - 1]))
    }
}
