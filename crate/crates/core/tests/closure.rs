use std::f64::consts::PI;

use onlinefwer::closure::{
    boundary_grid, brute_force_closed, check_consonance, check_predictability,
    closure_of_procedure, mixed_pvectors, shortcut_run, BonferroniFamily, IntersectionFamily,
    LevelFamily,
};
use onlinefwer::procedures::{
    AddisFamily, AddisParams, AlphaSpending, AlphaSpendingFamily, BackwardAllocatingFamily,
    ClosedAddisSpending, ClosedAlphaSpending, GraphVariant, OnlineGraph, OnlineGraphFamily,
    OnlineTester,
};
use onlinefwer::{GammaSequence, GraphWeights, LagStructure, Result};
use proptest::prelude::*;

const ALPHA: f64 = 0.2;

fn alpha_spending_family() -> AlphaSpendingFamily {
    AlphaSpendingFamily::new(ALPHA, GammaSequence::inverse_square()).unwrap()
}

fn addis_family(batch: usize) -> AddisFamily {
    AddisFamily::new(
        ALPHA,
        GammaSequence::inverse_square(),
        LagStructure::batch(batch).unwrap(),
        AddisParams::constant(0.8, 0.3).unwrap(),
    )
    .unwrap()
}

fn graph_family(variant: GraphVariant) -> OnlineGraphFamily {
    let weights = GraphWeights::from_triples([
        (1, 2, 0.5),
        (1, 4, 0.5),
        (2, 3, 1.0),
        (3, 5, 0.7),
        (4, 6, 1.0),
    ])
    .unwrap();
    OnlineGraphFamily::new(ALPHA, GammaSequence::inverse_square(), weights, variant).unwrap()
}

/// `α_i^I = α` for the first member of `I`, zero otherwise.
struct FixedSequenceFamily;

impl LevelFamily for FixedSequenceFamily {
    fn level(&self, prefix: &[usize], _earlier: &[f64]) -> Result<f64> {
        Ok(if prefix.len() == 1 { ALPHA } else { 0.0 })
    }

    fn critical_values(&self, _n: usize) -> Vec<f64> {
        vec![ALPHA]
    }
}

fn pvalue() -> impl Strategy<Value = f64> {
    prop_oneof![
        0.0..=1.0f64,
        (0.0..=1.0f64).prop_map(|u| u.powi(4)),
        prop::sample::select(vec![
            0.0, 0.015198, 0.030396, 0.060793, 0.121585, 0.3, 0.8, 1.0
        ]),
    ]
}

fn assert_oracle_agrees<F: LevelFamily>(family: &F, p: &[f64]) {
    let closed = brute_force_closed(family, p).unwrap();
    let short = shortcut_run(family, p).unwrap();
    assert_eq!(closed.rejected, short.rejected, "p = {p:?}");
    for step in &short.steps {
        assert_eq!(
            family.reject(&step.active_set, p).unwrap(),
            p[step.index - 1] <= step.level,
            "short-cut level disagrees with the intersection test at {}",
            step.index
        );
    }
}

#[test]
fn single_hypothesis_closure() {
    let f = alpha_spending_family();
    let d = brute_force_closed(&f, &[0.05]).unwrap();
    assert_eq!(d.rejected, vec![true]);
}

#[test]
fn large_pvalues_reject_nothing() {
    let d = brute_force_closed(&alpha_spending_family(), &[0.9, 0.9]).unwrap();
    assert_eq!(d.rejected, vec![false, false]);
}

#[test]
fn shortcut_levels_by_hand() {
    let f = alpha_spending_family();
    let g1 = ALPHA * 6.0 / (PI * PI);
    let d = shortcut_run(&f, &[0.05, 0.05]).unwrap();
    assert_eq!(d.rejected, vec![true, true]);
    assert!((d.steps[0].level - g1).abs() < 1e-15);
    assert_eq!(d.steps[1].active_set, vec![2]);
    assert_eq!(d.steps[1].level, d.steps[0].level);
    assert!((g1 - 0.121585).abs() < 1e-6);

    // after accepting H_1 the level drops to α γ_2 ≈ 0.030396 < 0.05
    let d = shortcut_run(&f, &[0.9, 0.05]).unwrap();
    assert_eq!(d.steps[1].active_set, vec![1, 2]);
    assert!((d.steps[1].level - 0.030396).abs() < 1e-6);
    assert_eq!(d.rejected, vec![false, false]);
    let d = shortcut_run(&f, &[0.9, 0.03]).unwrap();
    assert_eq!(d.rejected, vec![false, true]);
}

#[test]
fn oracle_on_small_seeded_vectors() {
    for n in 1..=10 {
        for p in mixed_pvectors(n, 25, n as u64) {
            assert_oracle_agrees(&alpha_spending_family(), &p);
            for b in 1..=3 {
                assert_oracle_agrees(&addis_family(b), &p);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_matches_shortcut(p in prop::collection::vec(pvalue(), 1..=9), b in 1usize..=4) {
        assert_oracle_agrees(&alpha_spending_family(), &p);
        assert_oracle_agrees(&addis_family(b), &p);
        assert_oracle_agrees(&FixedSequenceFamily, &p);
        assert_oracle_agrees(&graph_family(GraphVariant::PaperLiteral), &p);
        assert_oracle_agrees(&graph_family(GraphVariant::FallbackStandard), &p);
    }

    #[test]
    fn shortcut_is_the_closed_procedure(p in prop::collection::vec(pvalue(), 1..=60), b in 1usize..=5) {
        let gamma = GammaSequence::inverse_square();

        let short = shortcut_run(&alpha_spending_family(), &p).unwrap();
        let mut closed = OnlineTester::new(ClosedAlphaSpending::new(ALPHA, gamma.clone()).unwrap()).unwrap();
        prop_assert_eq!(&closed.run(&p).unwrap(), &short.rejected);
        for (step, rec) in short.steps.iter().zip(closed.state().records()) {
            prop_assert_eq!(step.level, rec.alpha_i);
        }

        let short = shortcut_run(&addis_family(b), &p).unwrap();
        let rule = ClosedAddisSpending::new(
            ALPHA,
            gamma.clone(),
            LagStructure::batch(b).unwrap(),
            AddisParams::constant(0.8, 0.3).unwrap(),
        ).unwrap();
        let mut closed = OnlineTester::new(rule).unwrap();
        prop_assert_eq!(&closed.run(&p).unwrap(), &short.rejected);
        for (step, rec) in short.steps.iter().zip(closed.state().records()) {
            prop_assert_eq!(step.level, rec.alpha_i);
        }

        for variant in [GraphVariant::PaperLiteral, GraphVariant::FallbackStandard] {
            let family = graph_family(variant);
            let short = shortcut_run(&family, &p).unwrap();
            let rule = OnlineGraph::new(ALPHA, gamma.clone(), family.weights.clone(), variant).unwrap();
            let mut graph = OnlineTester::new(rule).unwrap();
            prop_assert_eq!(&graph.run(&p).unwrap(), &short.rejected);
        }
    }

    #[test]
    fn appending_never_changes_earlier_decisions(p in prop::collection::vec(pvalue(), 2..=40), cut in 1usize..40) {
        let cut = cut.min(p.len() - 1);
        for family in [addis_family(1), addis_family(3)] {
            let full = shortcut_run(&family, &p).unwrap();
            let prefix = shortcut_run(&family, &p[..cut]).unwrap();
            prop_assert_eq!(&full.rejected[..cut], &prefix.rejected[..]);
            prop_assert_eq!(&full.steps[..cut], &prefix.steps[..]);
        }
        if p.len() <= 10 {
            let family = alpha_spending_family();
            let full = brute_force_closed(&family, &p).unwrap();
            let prefix = brute_force_closed(&family, &p[..cut]).unwrap();
            prop_assert_eq!(&full.rejected[..cut], &prefix.rejected[..]);
        }
    }
}

#[test]
fn fixed_sequence_closure_stops_at_first_failure() {
    let p = [0.1, 0.2, 0.05, 0.21, 0.01];
    let d = brute_force_closed(&FixedSequenceFamily, &p).unwrap();
    assert_eq!(d.rejected, vec![true, true, true, false, false]);
    assert_eq!(
        shortcut_run(&FixedSequenceFamily, &p).unwrap().rejected,
        d.rejected
    );
}

fn alpha_spending_run(p: &[f64]) -> Result<Vec<bool>> {
    OnlineTester::new(AlphaSpending::new(ALPHA, GammaSequence::inverse_square())?)?.run(p)
}

#[test]
fn closure_of_alpha_spending() {
    let family = closure_of_procedure(alpha_spending_run);
    let p = [0.05, 0.9];
    assert!(family.reject(&[1], &p).unwrap());
    assert!(!family.reject(&[2], &p).unwrap());
    assert!(family.reject(&[1, 2], &p).unwrap());

    for n in 1..=10 {
        for p in mixed_pvectors(n, 10, 100 + n as u64) {
            let closed = brute_force_closed(&family, &p).unwrap();
            assert_eq!(closed.rejected, alpha_spending_run(&p).unwrap());
        }
    }
    let grid = boundary_grid(&alpha_spending_family(), 6, 100, 3);
    assert!(check_predictability(&family, 6, &grid).unwrap().is_empty());
}

#[test]
fn closure_of_graph_procedure_is_predictable() {
    let run = |p: &[f64]| {
        let rule = OnlineGraph::new(
            ALPHA,
            GammaSequence::inverse_square(),
            GraphWeights::Lag1(1.0),
            GraphVariant::PaperLiteral,
        )?;
        OnlineTester::new(rule)?.run(p)
    };
    let family = closure_of_procedure(run);
    let grid = boundary_grid(&alpha_spending_family(), 5, 200, 8);
    assert!(check_predictability(&family, 5, &grid).unwrap().is_empty());
    for p in grid.iter().take(50) {
        assert_eq!(
            brute_force_closed(&family, p).unwrap().rejected,
            run(p).unwrap()
        );
    }
}

#[test]
fn bonferroni_family_is_not_predictable() {
    let f = BonferroniFamily { alpha: ALPHA };
    let report = check_predictability(&f, 2, &[vec![0.15, 0.9]]).unwrap();
    assert_eq!(report.total, 1);
    assert_eq!(report.violations[0].subset, vec![1]);
    assert_eq!(report.violations[0].superset, Some(vec![1, 2]));

    let grid = boundary_grid(&f, 2, 0, 0);
    assert!(!check_predictability(&f, 2, &grid).unwrap().is_empty());
}

#[test]
fn increasing_gamma_breaks_consonance() {
    let f = AlphaSpendingFamily::new(ALPHA, GammaSequence::from_list(vec![0.0, 1.0])).unwrap();
    let report = check_consonance(&f, 2, &[vec![0.5, 0.1]]).unwrap();
    assert_eq!(report.total, 1);
    assert_eq!(report.violations[0].subset, vec![1, 2]);
    // still predictable
    let grid = boundary_grid(&f, 2, 50, 1);
    assert!(check_predictability(&f, 2, &grid).unwrap().is_empty());
    assert!(!check_consonance(&f, 2, &grid).unwrap().is_empty());
}

#[test]
fn backward_allocation_is_not_predictable() {
    let f = BackwardAllocatingFamily {
        alpha: ALPHA,
        gamma: GammaSequence::inverse_square(),
        universe: 4,
    };
    let grid = boundary_grid(&f, 4, 200, 2);
    let report = check_predictability(&f, 4, &grid).unwrap();
    assert!(!report.is_empty());
    assert!(report.violations.iter().any(|v| v.subset.contains(&1)));
}

#[test]
fn spending_families_pass_both_checks_on_boundary_grids() {
    for n in [1, 2, 3, 6, 10] {
        let f = alpha_spending_family();
        let grid = boundary_grid(&f, n, 150, n as u64);
        assert!(
            check_predictability(&f, n, &grid).unwrap().is_empty(),
            "alpha-spending n={n}"
        );
        assert!(
            check_consonance(&f, n, &grid).unwrap().is_empty(),
            "alpha-spending n={n}"
        );
        for b in [1, 2, 3] {
            let f = addis_family(b);
            let grid = boundary_grid(&f, n, 150, n as u64);
            assert!(
                check_predictability(&f, n, &grid).unwrap().is_empty(),
                "addis b={b} n={n}"
            );
            assert!(
                check_consonance(&f, n, &grid).unwrap().is_empty(),
                "addis b={b} n={n}"
            );
        }
        let f = graph_family(GraphVariant::PaperLiteral);
        let grid = boundary_grid(&f, n, 150, n as u64);
        assert!(
            check_predictability(&f, n, &grid).unwrap().is_empty(),
            "graph n={n}"
        );
        assert!(
            check_consonance(&f, n, &grid).unwrap().is_empty(),
            "graph n={n}"
        );
    }
}
