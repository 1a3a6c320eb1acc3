//! Local-dependence lags `l_i`: `P_i` is independent of every p-value more
//! than `l_i` steps in the past.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::validation::{ValidationReport, ViolationKind};

type LagFn = dyn Fn(usize) -> usize + Send + Sync;

#[derive(Clone)]
pub struct LagStructure {
    generator: Arc<LagFn>,
}

impl fmt::Debug for LagStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LagStructure").finish_non_exhaustive()
    }
}

impl LagStructure {
    pub fn from_fn<F>(generator: F) -> Self
    where
        F: Fn(usize) -> usize + Send + Sync + 'static,
    {
        Self {
            generator: Arc::new(generator),
        }
    }

    /// `l_i = 0`: independent p-values.
    pub fn independent() -> Self {
        Self::from_fn(|_| 0)
    }

    /// `l_i = i - 1`: arbitrary dependence.
    pub fn full() -> Self {
        Self::from_fn(|i| i.saturating_sub(1))
    }

    /// `l_i = (i - 1) mod b`: batches of size `b`, independent across batches.
    pub fn batch(b: usize) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidParameter(
                "batch size must be at least 1".into(),
            ));
        }
        Ok(Self::from_fn(move |i| (i - 1) % b))
    }

    /// Explicit lags for the first indices, zero afterwards.
    pub fn from_list(lags: Vec<usize>) -> Self {
        let lags: Arc<[usize]> = lags.into();
        Self::from_fn(move |i| lags.get(i.wrapping_sub(1)).copied().unwrap_or(0))
    }

    /// Raw `l_i` for `i ≥ 1`, without validation.
    pub fn lag(&self, i: usize) -> usize {
        (self.generator)(i)
    }
}

/// Checks `l_i ≤ i - 1` and `l_{i+1} ≤ l_i + 1` on `1..=horizon`.
pub fn validate_lags(lags: &LagStructure, horizon: usize) -> ValidationReport {
    let mut report = ValidationReport::new();
    let mut previous = None;
    for i in 1..=horizon {
        let lag = lags.lag(i);
        if let Err(kind) = check_lag(i, lag, previous) {
            for k in kind.into_iter().flatten() {
                report.record(i, k);
            }
        }
        previous = Some(lag);
    }
    report
}

fn check_lag(
    i: usize,
    lag: usize,
    previous: Option<usize>,
) -> std::result::Result<(), [Option<ViolationKind>; 2]> {
    let exceeds = (lag > i - 1).then_some(ViolationKind::LagExceedsIndex { lag });
    let grows = previous
        .filter(|&p| lag > p + 1)
        .map(|previous| ViolationKind::LagGrowth { previous, lag });
    if exceeds.is_none() && grows.is_none() {
        Ok(())
    } else {
        Err([exceeds, grows])
    }
}

/// Memoized, incrementally validated view of a [`LagStructure`].
#[derive(Debug, Clone)]
pub(crate) struct LagCache {
    lags: LagStructure,
    values: Vec<usize>,
    failure: Option<Error>,
}

impl LagCache {
    pub(crate) fn new(lags: LagStructure) -> Self {
        Self {
            lags,
            values: Vec::new(),
            failure: None,
        }
    }

    /// Validated `l_i`. Fails once any index up to `i` violates the contract.
    pub(crate) fn get(&mut self, i: usize) -> Result<usize> {
        while self.values.len() < i && self.failure.is_none() {
            let index = self.values.len() + 1;
            let lag = self.lags.lag(index);
            if let Err(kinds) = check_lag(index, lag, self.values.last().copied()) {
                let kind = kinds
                    .into_iter()
                    .flatten()
                    .next()
                    .expect("at least one violation");
                self.failure = Some(Error::Lag { index, kind });
            } else {
                self.values.push(lag);
            }
        }
        match self.values.get(i.wrapping_sub(1)) {
            Some(&lag) => Ok(lag),
            None => Err(self
                .failure
                .clone()
                .unwrap_or_else(|| Error::InvalidParameter("lag index must be at least 1".into()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independence_and_full_dependence_are_valid() {
        assert!(validate_lags(&LagStructure::independent(), 100).is_empty());
        assert!(validate_lags(&LagStructure::full(), 100).is_empty());
    }

    #[test]
    fn jump_to_two_violates_both_constraints() {
        let report = validate_lags(&LagStructure::from_list(vec![0, 2]), 2);
        assert_eq!(report.violations().len(), 2);
        assert!(report.violations().iter().all(|v| v.index == 2));
        assert!(matches!(
            report.violations()[0].kind,
            ViolationKind::LagExceedsIndex { lag: 2 }
        ));
        assert!(matches!(
            report.violations()[1].kind,
            ViolationKind::LagGrowth {
                previous: 0,
                lag: 2
            }
        ));
    }

    #[test]
    fn batch_lags_are_valid() {
        for b in [1, 10, 25, 100] {
            let lags = LagStructure::batch(b).unwrap();
            assert!(validate_lags(&lags, 1000).is_empty(), "b = {b}");
            assert_eq!(lags.lag(1), 0);
            assert_eq!(lags.lag(b.min(1000)), b.min(1000) - 1);
        }
        assert!(LagStructure::batch(0).is_err());
    }

    #[test]
    fn cache_rejects_bad_lag() {
        let mut cache = LagCache::new(LagStructure::from_list(vec![0, 1, 3]));
        assert_eq!(cache.get(2).unwrap(), 1);
        assert_eq!(cache.get(1).unwrap(), 0);
        assert!(matches!(cache.get(3), Err(Error::Lag { index: 3, .. })));
        assert!(cache.get(4).is_err());
        assert_eq!(cache.get(2).unwrap(), 1);
    }
}
