//! Executable checks of the closure machinery on seeded and adversarial
//! inputs. Each returns a report whose verdict is the last line.

use onlinefwer::closure::{
    boundary_grid, brute_force_closed, check_consonance, check_predictability,
    closure_of_procedure, mixed_pvectors, shortcut_run, BonferroniFamily, IntersectionFamily,
    LevelFamily, SetViolation, ViolationReport, CHECKER_LIMIT, ORACLE_LIMIT,
};
use onlinefwer::procedures::{
    AddisFamily, AddisParams, AlphaSpendingFamily, BackwardAllocatingFamily, GraphVariant,
    OnlineGraphFamily, ProcedureSettings, ProcedureSpec,
};
use onlinefwer::{GammaSequence, GraphWeights, LagStructure, ProcedureId};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyKind {
    AlphaSpending,
    Addis,
    OnlineGraph,
    /// `φ_I = 1` iff some `P_i ≤ α / |I|`; its closure is Holm's procedure.
    #[value(alias = "section3-counterexample")]
    Bonferroni,
    /// Gives level of hypotheses outside `I` back to the first hypothesis.
    BackwardGraph,
    /// The intersection tests induced by an online procedure's decisions.
    ProcedureClosure,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub family: FamilyKind,
    pub n: usize,
    pub vectors: usize,
    pub seed: u64,
    pub alpha: f64,
    pub gamma: GammaSequence,
    pub tau: f64,
    pub lambda: f64,
    pub batch: usize,
    pub graph: GraphWeights,
    pub variant: GraphVariant,
    /// The procedure wrapped by [`FamilyKind::ProcedureClosure`].
    pub procedure: ProcedureId,
    pub streams: usize,
    pub length: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            family: FamilyKind::AlphaSpending,
            n: 6,
            vectors: 200,
            seed: 1,
            alpha: 0.2,
            gamma: GammaSequence::inverse_square(),
            tau: 0.8,
            lambda: 0.3,
            batch: 1,
            graph: GraphWeights::Lag1(1.0),
            variant: GraphVariant::PaperLiteral,
            procedure: ProcedureId::AlphaSpending,
            streams: 1000,
            length: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub lines: Vec<String>,
    pub passed: bool,
}

impl VerifyReport {
    fn finish(mut lines: Vec<String>, passed: bool) -> Self {
        lines.push(if passed { "PASS" } else { "FAIL" }.to_string());
        Self { lines, passed }
    }
}

struct Levels(Box<dyn LevelFamily>);

impl IntersectionFamily for Levels {
    fn reject(&self, set: &[usize], pvalues: &[f64]) -> onlinefwer::Result<bool> {
        IntersectionFamily::reject(&*self.0, set, pvalues)
    }

    fn critical_values(&self, n: usize) -> Vec<f64> {
        LevelFamily::critical_values(&*self.0, n)
    }
}

enum Family {
    Levels(Levels),
    Tests(Box<dyn IntersectionFamily>),
}

impl Family {
    fn levels(f: impl LevelFamily + 'static) -> Self {
        Family::Levels(Levels(Box::new(f)))
    }

    fn tests(&self) -> &dyn IntersectionFamily {
        match self {
            Family::Levels(f) => f,
            Family::Tests(f) => f.as_ref(),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn settings(opts: &VerifyOptions) -> Result<ProcedureSettings, CliError> {
    Ok(ProcedureSettings {
        alpha: opts.alpha,
        gamma: opts.gamma.clone(),
        lags: LagStructure::batch(opts.batch).map_err(usage)?,
        addis: AddisParams::constant(opts.tau, opts.lambda).map_err(usage)?,
    })
}

fn build_family(opts: &VerifyOptions) -> Result<Family, CliError> {
    let gamma = opts.gamma.clone();
    let family = match opts.family {
        FamilyKind::AlphaSpending => {
            Family::levels(AlphaSpendingFamily::new(opts.alpha, gamma).map_err(usage)?)
        }
        FamilyKind::Addis => {
            let s = settings(opts)?;
            Family::levels(AddisFamily::new(s.alpha, s.gamma, s.lags, s.addis).map_err(usage)?)
        }
        FamilyKind::OnlineGraph => Family::levels(
            OnlineGraphFamily::new(opts.alpha, gamma, opts.graph.clone(), opts.variant)
                .map_err(usage)?,
        ),
        FamilyKind::Bonferroni => Family::Tests(Box::new(BonferroniFamily { alpha: opts.alpha })),
        FamilyKind::BackwardGraph => Family::Tests(Box::new(BackwardAllocatingFamily {
            alpha: opts.alpha,
            gamma,
            universe: opts.n,
        })),
        FamilyKind::ProcedureClosure => {
            let s = settings(opts)?;
            let spec = match opts.procedure {
                ProcedureId::OnlineGraph => ProcedureSpec::OnlineGraph {
                    weights: opts.graph.clone(),
                    variant: opts.variant,
                },
                id => ProcedureSpec::from_id(id),
            };
            // fail on bad parameters now rather than inside the checker
            spec.build(&s).map_err(usage)?;
            Family::Tests(Box::new(closure_of_procedure(move |p: &[f64]| {
                spec.build(&s)?.run(p)
            })))
        }
    };
    Ok(family)
}

fn fmt_set(set: &[usize]) -> String {
    let items: Vec<String> = set.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn fmt_p(p: &[f64]) -> String {
    let items: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
    format!("({})", items.join(", "))
}

fn describe(v: &SetViolation) -> String {
    match &v.superset {
        Some(k) => format!(
            "I={} rejected but K={} retained at p={}",
            fmt_set(&v.subset),
            fmt_set(k),
            fmt_p(&v.pvalues)
        ),
        None => format!(
            "I={} rejected with no member whose subsets containing it all reject, at p={}",
            fmt_set(&v.subset),
            fmt_p(&v.pvalues)
        ),
    }
}

fn report_violations(
    name: &str,
    opts: &VerifyOptions,
    grid_len: usize,
    report: &ViolationReport,
) -> VerifyReport {
    let mut lines = vec![format!(
        "{name}: family {:?}, n={}, {grid_len} p-vectors, {} violation(s)",
        opts.family, opts.n, report.total
    )];
    lines.extend(report.violations.iter().take(5).map(describe));
    VerifyReport::finish(lines, report.is_empty())
}

fn check_n(n: usize, limit: usize) -> Result<(), CliError> {
    if n == 0 || n > limit {
        return Err(CliError::Usage(format!(
            "--n must lie in 1..={limit}, got {n}"
        )));
    }
    Ok(())
}

/// Brute-force closure against the short-cut for every length `1..=n`.
/// Also checks that each short-cut level decides exactly like the
/// intersection test of its active set.
pub fn shortcut_oracle(opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    check_n(opts.n, ORACLE_LIMIT)?;
    let Family::Levels(Levels(family)) = build_family(opts)? else {
        return Err(CliError::Usage(format!(
            "family {:?} has no per-hypothesis levels, so no short-cut",
            opts.family
        )));
    };
    let mut lines = Vec::new();
    let (mut decision_mismatches, mut level_mismatches) = (0usize, 0usize);
    for len in 1..=opts.n {
        let (mut d, mut l) = (0, 0);
        for p in mixed_pvectors(len, opts.vectors, opts.seed.wrapping_add(len as u64)) {
            let closed = brute_force_closed(family.as_ref(), &p).map_err(usage)?;
            let short = shortcut_run(family.as_ref(), &p).map_err(usage)?;
            if closed.rejected != short.rejected {
                if d == 0 {
                    lines.push(format!("  n={len}: decisions differ at p={}", fmt_p(&p)));
                }
                d += 1;
            }
            for step in &short.steps {
                let phi = family.reject(&step.active_set, &p).map_err(usage)?;
                if phi != (p[step.index - 1] <= step.level) {
                    l += 1;
                }
            }
        }
        lines.push(format!(
            "n={len}: {} vectors, {d} decision mismatch(es), {l} level mismatch(es)",
            opts.vectors
        ));
        decision_mismatches += d;
        level_mismatches += l;
    }
    lines.push(format!(
        "total: {decision_mismatches} decision mismatch(es), {level_mismatches} level mismatch(es)"
    ));
    Ok(VerifyReport::finish(
        lines,
        decision_mismatches == 0 && level_mismatches == 0,
    ))
}

pub fn predictability(opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    check_n(opts.n, CHECKER_LIMIT)?;
    let family = build_family(opts)?;
    let grid = boundary_grid(family.tests(), opts.n, opts.vectors, opts.seed);
    let report = check_predictability(family.tests(), opts.n, &grid).map_err(usage)?;
    Ok(report_violations(
        "predictability",
        opts,
        grid.len(),
        &report,
    ))
}

pub fn consonance(opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    check_n(opts.n, CHECKER_LIMIT)?;
    let family = build_family(opts)?;
    let grid = boundary_grid(family.tests(), opts.n, opts.vectors, opts.seed);
    let report = check_consonance(family.tests(), opts.n, &grid).map_err(usage)?;
    Ok(report_violations("consonance", opts, grid.len(), &report))
}

/// Rejection-set containment of the closed procedure over its plain
/// counterpart on seeded streams.
pub fn improvement(opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    let (plain, closed) = match opts.family {
        FamilyKind::AlphaSpending => (
            ProcedureSpec::AlphaSpending,
            ProcedureSpec::ClosedAlphaSpending,
        ),
        FamilyKind::Addis => (ProcedureSpec::Addis, ProcedureSpec::ClosedAddis),
        other => return Err(CliError::Usage(format!(
            "improvement compares alpha-spending or addis with its closed version, not {other:?}"
        ))),
    };
    if opts.length == 0 {
        return Err(CliError::Usage("--length must be at least 1".into()));
    }
    let s = settings(opts)?;
    let (mut violations, mut plain_total, mut closed_total) = (0usize, 0usize, 0usize);
    let mut lines = Vec::new();
    for (k, p) in mixed_pvectors(opts.length, opts.streams, opts.seed)
        .iter()
        .enumerate()
    {
        let a = plain.build(&s).map_err(usage)?.run(p).map_err(usage)?;
        let c = closed.build(&s).map_err(usage)?.run(p).map_err(usage)?;
        plain_total += a.iter().filter(|&&r| r).count();
        closed_total += c.iter().filter(|&&r| r).count();
        if a.iter().zip(&c).any(|(&a, &c)| a && !c) {
            if violations < 5 {
                lines.push(format!(
                    "  stream {k}: {} rejects what {} does not",
                    plain.id(),
                    closed.id()
                ));
            }
            violations += 1;
        }
    }
    lines.push(format!(
        "{} streams of length {}: {} rejected {plain_total}, {} rejected {closed_total}, {violations} containment violation(s)",
        opts.streams,
        opts.length,
        plain.id(),
        closed.id()
    ));
    Ok(VerifyReport::finish(lines, violations == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_passes_for_spending_families() {
        for family in [
            FamilyKind::AlphaSpending,
            FamilyKind::Addis,
            FamilyKind::OnlineGraph,
        ] {
            let opts = VerifyOptions {
                family,
                n: 5,
                vectors: 20,
                batch: 2,
                ..VerifyOptions::default()
            };
            let report = shortcut_oracle(&opts).unwrap();
            assert!(report.passed, "{:?}", report.lines);
            assert_eq!(report.lines.last().unwrap(), "PASS");
        }
    }

    #[test]
    fn oracle_refuses_families_without_levels() {
        let opts = VerifyOptions {
            family: FamilyKind::Bonferroni,
            ..VerifyOptions::default()
        };
        assert_eq!(shortcut_oracle(&opts).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn counterexamples_fail() {
        let opts = VerifyOptions {
            family: FamilyKind::Bonferroni,
            n: 2,
            ..VerifyOptions::default()
        };
        assert!(!predictability(&opts).unwrap().passed);

        let opts = VerifyOptions {
            gamma: GammaSequence::from_list(vec![0.0, 1.0]),
            n: 2,
            ..VerifyOptions::default()
        };
        let report = consonance(&opts).unwrap();
        assert!(!report.passed);
        assert!(report.lines.iter().any(|l| l.contains("I={1,2}")));

        let opts = VerifyOptions {
            family: FamilyKind::BackwardGraph,
            n: 3,
            ..VerifyOptions::default()
        };
        assert!(!predictability(&opts).unwrap().passed);
    }

    #[test]
    fn procedure_closure_is_predictable() {
        let opts = VerifyOptions {
            family: FamilyKind::ProcedureClosure,
            procedure: ProcedureId::Addis,
            batch: 2,
            n: 4,
            vectors: 50,
            ..VerifyOptions::default()
        };
        assert!(predictability(&opts).unwrap().passed);
    }

    #[test]
    fn closed_procedures_improve() {
        for family in [FamilyKind::AlphaSpending, FamilyKind::Addis] {
            let opts = VerifyOptions {
                family,
                batch: 10,
                streams: 50,
                ..VerifyOptions::default()
            };
            assert!(improvement(&opts).unwrap().passed);
        }
    }

    #[test]
    fn guards_are_usage_errors() {
        let opts = VerifyOptions {
            n: CHECKER_LIMIT + 1,
            ..VerifyOptions::default()
        };
        assert_eq!(predictability(&opts).unwrap_err().exit_code(), 2);
        let opts = VerifyOptions {
            lambda: 0.9,
            family: FamilyKind::Addis,
            ..VerifyOptions::default()
        };
        assert_eq!(consonance(&opts).unwrap_err().exit_code(), 2);
    }
}
