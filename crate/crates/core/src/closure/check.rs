//! Grid-based falsifiers for predictability and consonance.
//!
//! Both properties quantify over every outcome, so an empty report only says
//! that no counterexample exists on the supplied grid.

use std::cmp::Ordering;

use super::{decision_table, mask_to_set, IntersectionFamily, CHECKER_LIMIT};
use crate::error::{Error, Result};

/// Violations retained verbatim in a report; the rest are only counted.
pub const MAX_RECORDED: usize = 32;

/// A concrete counterexample.
#[derive(Debug, Clone, PartialEq)]
pub struct SetViolation {
    /// `I` with `φ_I = 1`.
    pub subset: Vec<usize>,
    /// For predictability, the superset `K = I ∪ J` with `φ_K = 0`.
    pub superset: Option<Vec<usize>>,
    pub pvalues: Vec<f64>,
}

impl SetViolation {
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.subset
            .cmp(&other.subset)
            .then_with(|| self.superset.cmp(&other.superset))
            .then_with(|| {
                let a = self.pvalues.iter().map(|p| p.to_bits());
                let b = other.pvalues.iter().map(|p| p.to_bits());
                a.cmp(b)
            })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ViolationReport {
    /// Up to [`MAX_RECORDED`] violations, in canonical order.
    pub violations: Vec<SetViolation>,
    /// Total number of violations found.
    pub total: usize,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    fn push(&mut self, violation: SetViolation) {
        self.total += 1;
        self.violations.push(violation);
        if self.violations.len() > 2 * MAX_RECORDED {
            self.normalize();
        }
    }

    fn normalize(&mut self) {
        self.violations.sort_by(SetViolation::canonical_cmp);
        self.violations.truncate(MAX_RECORDED);
    }

    /// Combines reports from disjoint grid partitions; the result does not
    /// depend on merge order.
    pub fn merge(mut self, other: ViolationReport) -> ViolationReport {
        self.total += other.total;
        self.violations.extend(other.violations);
        self.normalize();
        self
    }
}

fn guard(n: usize, grid: &[Vec<f64>]) -> Result<()> {
    if n > CHECKER_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: CHECKER_LIMIT,
        });
    }
    if let Some(short) = grid.iter().find(|p| p.len() < n) {
        return Err(Error::InvalidParameter(format!(
            "grid vector of length {} is shorter than the universe {n}",
            short.len()
        )));
    }
    Ok(())
}

/// Reports every `(I, K = I ∪ J, p)` on the grid where `I ⊆ {1..i}`,
/// `∅ ≠ J ⊆ {i+1..n}`, `φ_I = 1` and `φ_K = 0`.
///
/// Taking `i = max(I)` covers every admissible `i`: a larger `i` only shrinks
/// the set of admissible `J`.
pub fn check_predictability<F>(family: &F, n: usize, grid: &[Vec<f64>]) -> Result<ViolationReport>
where
    F: IntersectionFamily + ?Sized,
{
    guard(n, grid)?;
    let full = (1u32 << n) - 1;
    let mut report = ViolationReport::default();
    for p in grid {
        let p = &p[..n];
        let table = decision_table(family, p, n)?;
        for mask in 1u32..=full {
            if !table[mask as usize] {
                continue;
            }
            let top = 31 - mask.leading_zeros();
            let future = full & !((2u32 << top) - 1);
            let mut extra = future;
            while extra != 0 {
                let superset = mask | extra;
                if !table[superset as usize] {
                    report.push(SetViolation {
                        subset: mask_to_set(mask),
                        superset: Some(mask_to_set(superset)),
                        pvalues: p.to_vec(),
                    });
                }
                extra = (extra - 1) & future;
            }
        }
    }
    report.normalize();
    Ok(report)
}

/// Reports every `(I, p)` on the grid where `φ_I = 1` but no `i ∈ I` has
/// `φ_J = 1` for all `J ⊆ I` containing `i`.
pub fn check_consonance<F>(family: &F, n: usize, grid: &[Vec<f64>]) -> Result<ViolationReport>
where
    F: IntersectionFamily + ?Sized,
{
    guard(n, grid)?;
    let full = (1u32 << n) - 1;
    let mut report = ViolationReport::default();
    for p in grid {
        let p = &p[..n];
        let table = decision_table(family, p, n)?;
        for mask in 1u32..=full {
            if !table[mask as usize] {
                continue;
            }
            let witnessed = (0..n).filter(|b| mask & (1 << b) != 0).any(|b| {
                let bit = 1u32 << b;
                let rest = mask & !bit;
                let mut sub = rest;
                loop {
                    if !table[(sub | bit) as usize] {
                        return false;
                    }
                    if sub == 0 {
                        return true;
                    }
                    sub = (sub - 1) & rest;
                }
            });
            if !witnessed {
                report.push(SetViolation {
                    subset: mask_to_set(mask),
                    superset: None,
                    pvalues: p.to_vec(),
                });
            }
        }
    }
    report.normalize();
    Ok(report)
}
