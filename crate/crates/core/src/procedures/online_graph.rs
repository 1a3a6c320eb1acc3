//! Graphical procedures: the offline reference algorithm and the online
//! graph, whose weights only point forward.

use super::{plain_plan, LevelRule};
use crate::closure::{validate_set, IntersectionFamily, LevelFamily};
use crate::error::{Error, Result};
use crate::gamma::{GammaCache, GammaSequence, SUM_TOLERANCE};
use crate::graph::{GraphWeights, RowSumTracker};
use crate::state::{validate_alpha, ProcedureId, ProcedureState, StepPlan};
use crate::validation::ViolationKind;

/// How inherited level enters the online graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GraphVariant {
    /// `α_i = α (γ_i + Σ_{j<i} g_{j,i} α_j r_j)`.
    #[default]
    PaperLiteral,
    /// `α_i = α γ_i + Σ_{j<i} g_{j,i} α_j r_j`, the usual online fallback.
    FallbackStandard,
}

impl GraphVariant {
    fn combine(self, alpha: f64, gamma_i: f64, inherited: f64) -> f64 {
        match self {
            GraphVariant::PaperLiteral => alpha * (gamma_i + inherited),
            GraphVariant::FallbackStandard => alpha * gamma_i + inherited,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OnlineGraph {
    alpha: f64,
    gamma: GammaCache,
    weights: GraphWeights,
    variant: GraphVariant,
    rows: RowSumTracker,
    // each (j, i) weight is queried once, so a plan is memoized per index
    planned: Option<(usize, StepPlan)>,
}

impl OnlineGraph {
    pub fn new(
        alpha: f64,
        gamma: GammaSequence,
        weights: GraphWeights,
        variant: GraphVariant,
    ) -> Result<Self> {
        validate_alpha(alpha)?;
        Ok(Self {
            alpha,
            gamma: GammaCache::new(gamma),
            weights,
            variant,
            rows: RowSumTracker::default(),
            planned: None,
        })
    }
}

impl LevelRule for OnlineGraph {
    fn id(&self) -> ProcedureId {
        ProcedureId::OnlineGraph
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn plan(&mut self, history: &ProcedureState) -> Result<StepPlan> {
        let i = history.next_index();
        if let Some((index, plan)) = self.planned {
            if index == i {
                return Ok(plan);
            }
        }
        let gamma_i = self.gamma.get(i)?;
        let mut inherited = 0.0;
        for record in history.records().iter().filter(|r| r.rejected) {
            let g = self.rows.query(&self.weights, record.index, i)?;
            inherited += g * record.alpha_i;
        }
        let plan = plain_plan(
            self.variant.combine(self.alpha, gamma_i, inherited),
            self.alpha,
        );
        self.planned = Some((i, plan));
        Ok(plan)
    }
}

/// Intersection tests whose short-cut is the online graph.
///
/// For `j ∉ I` the level `α_j^{I ∪ {j}}` is passed on unconditionally, so
/// with `A_k` the level of an excluded `k` the levels are
/// `α_i^I = α (γ_i + Σ_{k<i, k∉I} g_{k,i} A_k)` (paper-literal) or
/// `α γ_i + Σ g_{k,i} A_k` (fallback), with `A_k` following the same
/// recursion over excluded indices below `k`.
#[derive(Debug, Clone)]
pub struct OnlineGraphFamily {
    pub alpha: f64,
    pub gamma: GammaSequence,
    pub weights: GraphWeights,
    pub variant: GraphVariant,
}

impl OnlineGraphFamily {
    pub fn new(
        alpha: f64,
        gamma: GammaSequence,
        weights: GraphWeights,
        variant: GraphVariant,
    ) -> Result<Self> {
        validate_alpha(alpha)?;
        Ok(Self {
            alpha,
            gamma,
            weights,
            variant,
        })
    }
}

impl LevelFamily for OnlineGraphFamily {
    fn level(&self, prefix: &[usize], _earlier: &[f64]) -> Result<f64> {
        let i = *prefix
            .last()
            .ok_or(Error::InvalidIndexSet("empty prefix".into()))?;
        let mut excluded: Vec<(usize, f64)> = Vec::new();
        let mut members = prefix.iter().peekable();
        for k in 1..=i {
            let inherited: f64 = excluded
                .iter()
                .map(|&(m, level)| self.weights.weight(m, k) * level)
                .sum();
            let level = self
                .variant
                .combine(self.alpha, self.gamma.weight(k), inherited);
            if members.peek() == Some(&&k) {
                members.next();
                if k == i {
                    return Ok(level);
                }
            } else {
                excluded.push((k, level));
            }
        }
        unreachable!("prefix ends with i")
    }

    fn critical_values(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.alpha * self.gamma.weight(k)).collect()
    }
}

fn ratio(p: f64, level: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else if level == 0.0 {
        f64::INFINITY
    } else {
        p / level
    }
}

/// Offline graphical procedure on `m` hypotheses; returns the rejected
/// indices (1-based, ascending).
///
/// After rejecting `H_i`, `α_j += α_i g_{i,j}` and
/// `g_{j,k} ← (g_{j,k} + g_{j,i} g_{i,k}) / (1 − g_{j,i} g_{i,j})`; a zero
/// denominator sets the weight to zero. Ties in `P_j / α_j` go to the smaller
/// index.
pub fn offline_graph(
    pvalues: &[f64],
    gammas: &[f64],
    weights: &[Vec<f64>],
    alpha: f64,
) -> Result<Vec<usize>> {
    let m = pvalues.len();
    validate_alpha(alpha)?;
    if m == 0 {
        return Err(Error::InvalidParameter(
            "graph needs at least one hypothesis".into(),
        ));
    }
    if gammas.len() != m || weights.len() != m || weights.iter().any(|row| row.len() != m) {
        return Err(Error::InvalidParameter(format!(
            "graph dimensions do not match {m} hypotheses"
        )));
    }
    if let Some((k, &p)) = pvalues
        .iter()
        .enumerate()
        .find(|(_, p)| !(0.0..=1.0).contains(*p))
    {
        return Err(Error::InvalidPValue {
            index: k + 1,
            value: p,
        });
    }
    let mut total = 0.0;
    for (k, &g) in gammas.iter().enumerate() {
        if g.is_nan() || g < 0.0 {
            return Err(Error::Gamma {
                index: k + 1,
                kind: ViolationKind::Negative { value: g },
            });
        }
        total += g;
        if total > 1.0 + SUM_TOLERANCE {
            return Err(Error::Gamma {
                index: k + 1,
                kind: ViolationKind::Summability { partial_sum: total },
            });
        }
    }
    for (j, row) in weights.iter().enumerate() {
        if row[j] != 0.0 {
            return Err(Error::Graph {
                source_index: j + 1,
                kind: ViolationKind::BackwardEdge { target: j + 1 },
            });
        }
        if let Some(&w) = row.iter().find(|w| w.is_nan() || **w < 0.0) {
            return Err(Error::Graph {
                source_index: j + 1,
                kind: ViolationKind::Negative { value: w },
            });
        }
        let sum: f64 = row.iter().sum();
        if sum > 1.0 + SUM_TOLERANCE {
            return Err(Error::Graph {
                source_index: j + 1,
                kind: ViolationKind::Summability { partial_sum: sum },
            });
        }
    }

    let mut active = vec![true; m];
    let mut levels: Vec<f64> = gammas.iter().map(|g| alpha * g).collect();
    let mut g: Vec<Vec<f64>> = weights.to_vec();
    let mut rejected = Vec::new();
    while let Some(i) = (0..m).filter(|&j| active[j]).min_by(|&a, &b| {
        ratio(pvalues[a], levels[a])
            .total_cmp(&ratio(pvalues[b], levels[b]))
            .then(a.cmp(&b))
    }) {
        if pvalues[i] > levels[i] {
            break;
        }
        rejected.push(i + 1);
        active[i] = false;
        let mut next_levels = vec![0.0; m];
        let mut next_g = vec![vec![0.0; m]; m];
        for j in (0..m).filter(|&j| active[j]) {
            next_levels[j] = levels[j] + levels[i] * g[i][j];
            for k in (0..m).filter(|&k| active[k] && k != j) {
                let denom = 1.0 - g[j][i] * g[i][j];
                next_g[j][k] = if denom == 0.0 {
                    0.0
                } else {
                    (g[j][k] + g[j][i] * g[i][k]) / denom
                };
            }
        }
        levels = next_levels;
        g = next_g;
    }
    rejected.sort_unstable();
    Ok(rejected)
}

/// A graph that sends the level of every excluded hypothesis back to `H_1`:
/// `φ_I = 1` if `1 ∈ I` and `P_1 ≤ α (γ_1 + Σ_{k ∉ I} γ_k)`, or
/// `P_i ≤ α γ_i` for some `i ∈ I`. The complement is taken within
/// `{1..universe}`.
///
/// The closure is a valid offline procedure but not an online one: adding a
/// later index to `I` can withdraw level from `H_1`.
#[derive(Debug, Clone)]
pub struct BackwardAllocatingFamily {
    pub alpha: f64,
    pub gamma: GammaSequence,
    pub universe: usize,
}

impl IntersectionFamily for BackwardAllocatingFamily {
    fn reject(&self, set: &[usize], pvalues: &[f64]) -> Result<bool> {
        validate_set(set, pvalues.len())?;
        if set
            .iter()
            .any(|&i| pvalues[i - 1] <= self.alpha * self.gamma.weight(i))
        {
            return Ok(true);
        }
        if set[0] != 1 {
            return Ok(false);
        }
        let returned: f64 = (1..=self.universe)
            .filter(|k| set.binary_search(k).is_err())
            .map(|k| self.gamma.weight(k))
            .sum();
        Ok(pvalues[0] <= self.alpha * (self.gamma.weight(1) + returned))
    }

    fn critical_values(&self, n: usize) -> Vec<f64> {
        let n = n.min(self.universe);
        let mut values: Vec<f64> = (1..=n).map(|k| self.alpha * self.gamma.weight(k)).collect();
        // H_1 with all later and all but the second later hypotheses excluded
        let tail: f64 = (2..=self.universe).map(|k| self.gamma.weight(k)).sum();
        values.push(self.alpha * (self.gamma.weight(1) + tail));
        if self.universe >= 2 {
            values.push(self.alpha * (self.gamma.weight(1) + tail - self.gamma.weight(2)));
        }
        values
    }
}
