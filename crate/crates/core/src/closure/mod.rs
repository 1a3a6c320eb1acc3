//! The online closure principle.
//!
//! A family of intersection tests assigns a decision `φ_I` to every finite,
//! nonempty index set `I`. The closed procedure rejects `H_i` when every `φ_I`
//! with `i ∈ I` rejects. [`brute_force_closed`] evaluates that definition
//! literally over all subsets of a finite universe and serves as the oracle.
//! For predictable families with the consonance property the closed procedure
//! collapses to a single test per step, `I_i = {j < i : H_j accepted} ∪ {i}`;
//! [`Shortcut`] and [`shortcut_run`] implement that recursion.
//!
//! Index sets are sorted, 1-based slices. P-values are passed as slices where
//! `pvalues[k - 1]` is `P_k`.

mod check;
mod families;
mod grid;

pub use check::{check_consonance, check_predictability, SetViolation, ViolationReport};
pub use families::{closure_of_procedure, BonferroniFamily, ProcedureClosure};
pub use grid::{boundary_grid, mixed_pvectors};

use crate::error::{Error, Result};

/// Largest universe the brute-force closed procedure enumerates.
pub const ORACLE_LIMIT: usize = 20;
/// Largest universe the predictability and consonance checkers enumerate.
pub const CHECKER_LIMIT: usize = 12;

/// `I ↦ φ_I` on finite nonempty index sets.
pub trait IntersectionFamily {
    /// `φ_I`. `pvalues` covers at least `1..=max(set)`.
    fn reject(&self, set: &[usize], pvalues: &[f64]) -> Result<bool>;

    /// Thresholds near which the family's decisions flip on a universe of
    /// size `n`. Used to build adversarial grids.
    fn critical_values(&self, _n: usize) -> Vec<f64> {
        Vec::new()
    }
}

/// A family defined through per-index levels `α_i^I`, with
/// `φ_I = 1 ⇔ ∃ i ∈ I: P_i ≤ α_i^I`.
///
/// The level for `i` only ever sees `I ∩ {1..i}` and `P_1, ..., P_{i-1}`, so
/// it cannot depend on later members of `I` or on `P_i` itself.
pub trait LevelFamily {
    /// `α_i^I` where `prefix = I ∩ {1..i}` (its last element is `i`) and
    /// `earlier = P_1, ..., P_{i-1}`.
    fn level(&self, prefix: &[usize], earlier: &[f64]) -> Result<f64>;

    fn critical_values(&self, _n: usize) -> Vec<f64> {
        Vec::new()
    }
}

impl<F: LevelFamily + ?Sized> IntersectionFamily for F {
    fn reject(&self, set: &[usize], pvalues: &[f64]) -> Result<bool> {
        validate_set(set, pvalues.len())?;
        for (pos, &i) in set.iter().enumerate() {
            let level = self.level(&set[..=pos], &pvalues[..i - 1])?;
            if pvalues[i - 1] <= level {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn critical_values(&self, n: usize) -> Vec<f64> {
        LevelFamily::critical_values(self, n)
    }
}

pub(crate) fn validate_set(set: &[usize], available: usize) -> Result<()> {
    if set.is_empty() {
        return Err(Error::InvalidIndexSet("index set is empty".into()));
    }
    if set[0] == 0 {
        return Err(Error::InvalidIndexSet("indices are 1-based".into()));
    }
    if set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidIndexSet(
            "indices must be strictly increasing".into(),
        ));
    }
    let max = *set.last().expect("nonempty");
    if max > available {
        return Err(Error::InvalidIndexSet(format!(
            "index {max} has no p-value ({available} supplied)"
        )));
    }
    Ok(())
}

/// One step of the short-cut.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortcutStep {
    pub index: usize,
    /// `I_i`.
    pub active_set: Vec<usize>,
    /// `α_i^{I_i}`.
    pub level: f64,
    pub rejected: bool,
}

/// Per-index decisions of a closed procedure.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClosureDecisions {
    pub rejected: Vec<bool>,
    /// Filled by the short-cut only.
    pub steps: Vec<ShortcutStep>,
}

impl ClosureDecisions {
    pub fn rejections(&self) -> Vec<usize> {
        self.rejected
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(k, _)| k + 1)
            .collect()
    }
}

/// Subset of `{1..n}` encoded as a bitmask (bit `k - 1` is index `k`).
pub(crate) fn mask_to_set(mask: u32) -> Vec<usize> {
    (0..32)
        .filter(|b| mask & (1 << b) != 0)
        .map(|b| b + 1)
        .collect()
}

/// `φ_I` for every nonempty `I ⊆ {1..n}`, indexed by mask (entry 0 unused).
pub(crate) fn decision_table<F>(family: &F, pvalues: &[f64], n: usize) -> Result<Vec<bool>>
where
    F: IntersectionFamily + ?Sized,
{
    let mut table = vec![false; 1 << n];
    let mut set = Vec::with_capacity(n);
    for mask in 1u32..(1 << n) {
        set.clear();
        set.extend((0..n).filter(|b| mask & (1 << b) != 0).map(|b| b + 1));
        table[mask as usize] = family.reject(&set, pvalues)?;
    }
    Ok(table)
}

/// The closed procedure by exhaustive enumeration: `H_i` is rejected iff
/// `φ_I = 1` for every nonempty `I ⊆ {1..n}` containing `i`.
///
/// For predictable families this agrees with the online closed procedure on
/// the prefix `1..=n`.
pub fn brute_force_closed<F>(family: &F, pvalues: &[f64]) -> Result<ClosureDecisions>
where
    F: IntersectionFamily + ?Sized,
{
    let n = pvalues.len();
    if n > ORACLE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: ORACLE_LIMIT,
        });
    }
    let table = decision_table(family, pvalues, n)?;
    let mut blocked = 0u32;
    for (mask, &phi) in table.iter().enumerate().skip(1) {
        if !phi {
            blocked |= mask as u32;
        }
    }
    Ok(ClosureDecisions {
        rejected: (0..n).map(|b| blocked & (1 << b) == 0).collect(),
        steps: Vec::new(),
    })
}

/// Streaming short-cut of the closed procedure of a predictable, consonant
/// level family: one level evaluation per step.
#[derive(Debug, Clone)]
pub struct Shortcut<'a, F: ?Sized> {
    family: &'a F,
    pvalues: Vec<f64>,
    // indices accepted so far; I_i = accepted ∪ {i}
    accepted: Vec<usize>,
}

impl<'a, F: LevelFamily + ?Sized> Shortcut<'a, F> {
    pub fn new(family: &'a F) -> Self {
        Self {
            family,
            pvalues: Vec::new(),
            accepted: Vec::new(),
        }
    }

    /// Active set the next index will be tested in.
    pub fn next_active_set(&self) -> Vec<usize> {
        let mut set = self.accepted.clone();
        set.push(self.pvalues.len() + 1);
        set
    }

    /// `α_i^{I_i}` of the next index.
    pub fn next_level(&self) -> Result<f64> {
        self.family.level(&self.next_active_set(), &self.pvalues)
    }

    pub fn push(&mut self, p_value: f64) -> Result<ShortcutStep> {
        let index = self.pvalues.len() + 1;
        if !(0.0..=1.0).contains(&p_value) {
            return Err(Error::InvalidPValue {
                index,
                value: p_value,
            });
        }
        let active_set = self.next_active_set();
        let level = self.family.level(&active_set, &self.pvalues)?;
        let rejected = p_value <= level;
        self.pvalues.push(p_value);
        if !rejected {
            self.accepted.push(index);
        }
        Ok(ShortcutStep {
            index,
            active_set,
            level,
            rejected,
        })
    }

    /// P-values consumed so far.
    pub fn pvalues(&self) -> &[f64] {
        &self.pvalues
    }
}

/// Runs the short-cut over a whole stream, keeping every step.
pub fn shortcut_run<F>(family: &F, pvalues: &[f64]) -> Result<ClosureDecisions>
where
    F: LevelFamily + ?Sized,
{
    let mut shortcut = Shortcut::new(family);
    let mut decisions = ClosureDecisions {
        rejected: Vec::with_capacity(pvalues.len()),
        steps: Vec::with_capacity(pvalues.len()),
    };
    for &p in pvalues {
        let step = shortcut.push(p)?;
        decisions.rejected.push(step.rejected);
        decisions.steps.push(step);
    }
    Ok(decisions)
}
