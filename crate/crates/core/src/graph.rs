//! Forward weights `g_{j,i}` (`j < i`) that pass the level of a rejected
//! hypothesis `j` on to later hypotheses.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gamma::SUM_TOLERANCE;
use crate::validation::{ValidationReport, ViolationKind};

type WeightFn = dyn Fn(usize, usize) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum GraphWeights {
    /// No edges.
    Zero,
    /// `g_{j,j+1} = w`, every other weight zero.
    Lag1(f64),
    /// Explicit edges keyed by `(source, target)`.
    Sparse(BTreeMap<(usize, usize), f64>),
    /// Arbitrary `(j, i) ↦ g_{j,i}`, queried only for `j < i`.
    Fn(Arc<WeightFn>),
}

impl fmt::Debug for GraphWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphWeights::Zero => write!(f, "Zero"),
            GraphWeights::Lag1(w) => write!(f, "Lag1({w})"),
            GraphWeights::Sparse(m) => f.debug_tuple("Sparse").field(m).finish(),
            GraphWeights::Fn(_) => write!(f, "Fn(..)"),
        }
    }
}

impl GraphWeights {
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Send + Sync + 'static,
    {
        GraphWeights::Fn(Arc::new(f))
    }

    /// Builds explicit edges, rejecting backward edges, negative weights and
    /// rows summing above one.
    pub fn from_triples(triples: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut rows: HashMap<usize, f64> = HashMap::new();
        for (j, i, w) in triples {
            if j == 0 || i <= j {
                return Err(Error::Graph {
                    source_index: j,
                    kind: ViolationKind::BackwardEdge { target: i },
                });
            }
            if w.is_nan() || w < 0.0 {
                return Err(Error::Graph {
                    source_index: j,
                    kind: ViolationKind::Negative { value: w },
                });
            }
            let row = rows.entry(j).or_insert(0.0);
            *row += w;
            if *row > 1.0 + SUM_TOLERANCE {
                return Err(Error::Graph {
                    source_index: j,
                    kind: ViolationKind::Summability { partial_sum: *row },
                });
            }
            *map.entry((j, i)).or_insert(0.0) += w;
        }
        Ok(GraphWeights::Sparse(map))
    }

    /// Raw `g_{j,i}`; zero for `i ≤ j`.
    pub fn weight(&self, j: usize, i: usize) -> f64 {
        if i <= j {
            return 0.0;
        }
        match self {
            GraphWeights::Zero => 0.0,
            GraphWeights::Lag1(w) => {
                if i == j + 1 {
                    *w
                } else {
                    0.0
                }
            }
            GraphWeights::Sparse(map) => map.get(&(j, i)).copied().unwrap_or(0.0),
            GraphWeights::Fn(f) => f(j, i),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            GraphWeights::Zero => true,
            GraphWeights::Lag1(w) => *w == 0.0,
            GraphWeights::Sparse(map) => map.values().all(|&w| w == 0.0),
            GraphWeights::Fn(_) => false,
        }
    }

    /// Checks every row `j ≤ horizon` over targets `j+1..=horizon`.
    pub fn validate(&self, horizon: usize) -> ValidationReport {
        let mut report = ValidationReport::new();
        let mut tracker = RowSumTracker::default();
        for i in 2..=horizon {
            for j in 1..i {
                if let Err(Error::Graph { source_index, kind }) = tracker.query(self, j, i) {
                    report.record(source_index, kind);
                }
            }
        }
        report
    }
}

/// Running row sums over the targets queried so far.
#[derive(Debug, Clone, Default)]
pub(crate) struct RowSumTracker {
    rows: HashMap<usize, f64>,
}

impl RowSumTracker {
    /// Validated `g_{j,i}`. Each pair must be queried at most once.
    pub(crate) fn query(&mut self, weights: &GraphWeights, j: usize, i: usize) -> Result<f64> {
        let w = weights.weight(j, i);
        if w.is_nan() || w < 0.0 {
            return Err(Error::Graph {
                source_index: j,
                kind: ViolationKind::Negative { value: w },
            });
        }
        if w == 0.0 {
            return Ok(0.0);
        }
        let row = self.rows.entry(j).or_insert(0.0);
        *row += w;
        if *row > 1.0 + SUM_TOLERANCE {
            return Err(Error::Graph {
                source_index: j,
                kind: ViolationKind::Summability { partial_sum: *row },
            });
        }
        Ok(w)
    }
}
