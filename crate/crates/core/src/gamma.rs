//! Spending weights `γ_1, γ_2, ...`.
//!
//! A [`GammaSequence`] is a generator rather than a stored list so that the
//! unbounded stream of an online experiment is representable. Its contract
//! (non-negative weights, partial sums at most one, and optionally
//! non-increasing) is checked lazily: [`validate_gamma`] inspects a finite
//! horizon, and [`GammaCache`] checks each index the first time a procedure
//! reads it.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::validation::{ValidationReport, ViolationKind};

/// Absolute tolerance on partial sums.
pub const SUM_TOLERANCE: f64 = 1e-12;

type WeightFn = dyn Fn(usize) -> f64 + Send + Sync;

#[derive(Clone)]
pub struct GammaSequence {
    generator: Arc<WeightFn>,
    declared_nonincreasing: bool,
    tail_bound_after: Option<usize>,
}

impl fmt::Debug for GammaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GammaSequence")
            .field("declared_nonincreasing", &self.declared_nonincreasing)
            .field("tail_bound_after", &self.tail_bound_after)
            .finish_non_exhaustive()
    }
}

impl GammaSequence {
    /// Wraps an arbitrary generator `i ↦ γ_i` (1-based).
    pub fn from_fn<F>(generator: F, declared_nonincreasing: bool) -> Self
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        Self {
            generator: Arc::new(generator),
            declared_nonincreasing,
            tail_bound_after: None,
        }
    }

    /// `γ_i = 6 / (π² i²)`, which sums to one and is decreasing.
    pub fn inverse_square() -> Self {
        Self::from_fn(|i| 6.0 / (PI * PI * (i as f64) * (i as f64)), true)
    }

    /// A finite list followed by zeros. The list is declared non-increasing
    /// exactly when it is.
    pub fn from_list(values: Vec<f64>) -> Self {
        let nonincreasing = values.windows(2).all(|w| w[1] <= w[0]);
        let len = values.len();
        let values: Arc<[f64]> = values.into();
        Self {
            generator: Arc::new(move |i| values.get(i.wrapping_sub(1)).copied().unwrap_or(0.0)),
            declared_nonincreasing: nonincreasing,
            tail_bound_after: Some(len),
        }
    }

    /// Overrides the declared monotonicity.
    pub fn declare_nonincreasing(mut self, declared: bool) -> Self {
        self.declared_nonincreasing = declared;
        self
    }

    /// Guarantees that partial sums beyond `n` never exceed one, so
    /// summability is no longer re-checked past that index.
    pub fn with_tail_bound_after(mut self, n: usize) -> Self {
        self.tail_bound_after = Some(n);
        self
    }

    /// Raw weight `γ_i` for `i ≥ 1`, without validation.
    pub fn weight(&self, i: usize) -> f64 {
        debug_assert!(i >= 1, "gamma is 1-based");
        (self.generator)(i)
    }

    pub fn declared_nonincreasing(&self) -> bool {
        self.declared_nonincreasing
    }

    pub fn tail_bound_after(&self) -> Option<usize> {
        self.tail_bound_after
    }
}

/// Checks the sequence contract on `1..=horizon`.
pub fn validate_gamma(seq: &GammaSequence, horizon: usize) -> ValidationReport {
    let mut report = ValidationReport::new();
    let mut cache = GammaCache::new(seq.clone());
    for i in 1..=horizon {
        cache.extend_to(i, |index, kind| report.record(index, kind));
    }
    report
}

/// Memoized, incrementally validated view of a [`GammaSequence`].
#[derive(Debug, Clone)]
pub struct GammaCache {
    seq: GammaSequence,
    values: Vec<f64>,
    partial_sum: f64,
    first_violation: Option<(usize, ViolationKind)>,
}

impl GammaCache {
    pub fn new(seq: GammaSequence) -> Self {
        Self {
            seq,
            values: Vec::new(),
            partial_sum: 0.0,
            first_violation: None,
        }
    }

    pub fn sequence(&self) -> &GammaSequence {
        &self.seq
    }

    /// Validated `γ_i`. Fails on the first contract violation at or below `i`.
    pub fn get(&mut self, i: usize) -> Result<f64> {
        if i == 0 {
            return Err(Error::InvalidParameter(
                "gamma index must be at least 1".into(),
            ));
        }
        if i > self.values.len() {
            let mut found = self.first_violation;
            self.extend_to(i, |index, kind| {
                if found.is_none() {
                    found = Some((index, kind));
                }
            });
            self.first_violation = found;
        }
        if let Some((index, kind)) = self.first_violation {
            if index <= i {
                return Err(Error::Gamma { index, kind });
            }
        }
        Ok(self.values[i - 1])
    }

    fn extend_to(&mut self, i: usize, mut on_violation: impl FnMut(usize, ViolationKind)) {
        while self.values.len() < i {
            let index = self.values.len() + 1;
            let value = self.seq.weight(index);
            if value.is_nan() || value < 0.0 {
                on_violation(index, ViolationKind::Negative { value });
            }
            if self.seq.declared_nonincreasing {
                if let Some(&previous) = self.values.last() {
                    if value > previous {
                        on_violation(index, ViolationKind::Increasing { previous, value });
                    }
                }
            }
            let checked = self.seq.tail_bound_after.is_none_or(|n| index <= n);
            if checked {
                self.partial_sum += value;
                if self.partial_sum > 1.0 + SUM_TOLERANCE {
                    on_violation(
                        index,
                        ViolationKind::Summability {
                            partial_sum: self.partial_sum,
                        },
                    );
                }
            }
            self.values.push(value);
        }
    }
}
