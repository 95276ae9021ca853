use aspi_core::measures::{
    aspi_big_o_estimate, aspi_hierarchy_profile, big_o_member, big_theta_member,
    check_big_o_witness, default_grid, diagonal_majorizer, hibbard_f, hibbard_growth_rate,
    majorizes, BigOVerdict, BigThetaVerdict, GameParams, HibbardRate, LevelOutcome, MeasureBudgets,
    SuiteConfig,
};
use aspi_core::zoo::{GrowthFn, PredictorSpec};
use aspi_core::{EvalBudget, HierarchyKind, Ordinal};
use proptest::prelude::*;

fn g(s: &str) -> GrowthFn {
    s.parse().unwrap()
}

fn growth() -> impl Strategy<Value = GrowthFn> {
    prop_oneof![
        (0u64..5, 0u64..30).prop_map(|(a, b)| GrowthFn::affine(a, b)),
        (1u64..4, 0u64..20).prop_map(|(c, b)| GrowthFn::sum(vec![
            GrowthFn::constant(b),
            GrowthFn::mul(c, g("poly2"))
        ])),
        prop::sample::select(vec![
            "poly3",
            "exp2",
            "scaled(n)",
            "slow(w^2)",
            "hardy(w*2)"
        ])
        .prop_map(g),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn majorization_is_transitive(f in growth(), h in growth(), k in growth()) {
        let b = EvalBudget::default();
        let fh = majorizes(&f, &h, 40, &b).unwrap();
        let hk = majorizes(&h, &k, 40, &b).unwrap();
        if fh.is_majorized() && hk.is_majorized() {
            prop_assert!(majorizes(&f, &k, 40, &b).unwrap().is_majorized());
        }
    }

    #[test]
    fn big_o_witnesses_recheck(t in growth(), f in growth()) {
        let b = EvalBudget::default();
        let grid = default_grid();
        if let BigOVerdict::Witness { c, n0 } = big_o_member(&t, &f, 0..=40, &grid, &b).unwrap() {
            prop_assert!(check_big_o_witness(&t, &f, 0..=40, &c, n0, &b).unwrap());
        }
    }

    #[test]
    fn big_theta_witnesses_recheck(t in growth(), f in growth()) {
        let b = EvalBudget::default();
        let grid = default_grid();
        if let BigThetaVerdict::Witness { c_low, c_high, n0 } = big_theta_member(&t, &f, 0..=40, &grid, &grid, &b).unwrap() {
            prop_assert!(check_big_o_witness(&t, &f, 0..=40, &c_high, n0, &b).unwrap());
            // the lower bound, read as f ≤ (1/c)·t
            prop_assert!(check_big_o_witness(&f, &t, 0..=40, &c_low.recip(), n0, &b).unwrap());
        }
    }

    #[test]
    fn diagonal_majorizes_its_inputs(fs in prop::collection::vec(growth(), 1..5)) {
        let b = EvalBudget::default();
        let d = diagonal_majorizer(fs.clone());
        for f in &fs {
            prop_assert!(majorizes(&d, f, 40, &b).unwrap().is_majorized(), "{} vs {}", d, f);
        }
    }
}

#[test]
fn hibbard_f_is_monotone() {
    let b = EvalBudget::default();
    let table: Vec<Vec<_>> = (1..=8)
        .map(|m| (0..=6).map(|k| hibbard_f(m, k, &b).unwrap()).collect())
        .collect();
    for m in 0..8 {
        for k in 0..=6 {
            if k < 6 {
                assert!(table[m][k] <= table[m][k + 1]);
            }
            if m < 7 {
                assert!(table[m][k] <= table[m + 1][k]);
            }
        }
    }
}

#[test]
fn hibbard_rate_is_irreflexive() {
    let b = EvalBudget::default();
    for m in 1..=5 {
        match hibbard_growth_rate(&GrowthFn::Hibbard(m), 10, 30, &b).unwrap() {
            HibbardRate::Exactly(r) | HibbardRate::AtLeast(r) => assert!(r > m, "f_{m} rated {r}"),
        }
    }
}

#[test]
fn diagonal_over_n_square_exp_on_fifty() {
    let d = diagonal_majorizer(vec![g("n"), g("poly2"), g("exp2")]);
    for f in ["n", "poly2", "exp2"] {
        assert!(majorizes(&d, &g(f), 50, &EvalBudget::default())
            .unwrap()
            .is_majorized());
    }
}

fn suite(patterns: &[&str], targets: &[&str]) -> SuiteConfig {
    let mut s = SuiteConfig::new(11);
    s.patterns = patterns.iter().map(|p| p.parse().unwrap()).collect();
    s.targets = targets.iter().map(|t| t.parse().unwrap()).collect();
    s
}

fn big_o_rank(p: &PredictorSpec, s: &SuiteConfig) -> usize {
    let ladder = [g("n"), g("poly2")];
    aspi_big_o_estimate(
        p,
        &ladder,
        s,
        &GameParams::default(),
        &MeasureBudgets::default(),
    )
    .unwrap()
    .estimate
    .rank()
}

#[test]
fn more_evaders_never_raise_the_estimate() {
    let p: PredictorSpec = "scaled:f=n".parse().unwrap();
    let chain = [
        suite(&["0"], &["2*n+6"]),
        suite(&["0", "1|0"], &["2*n+6"]),
        suite(&["0", "1|0"], &["2*n+6", "poly2+6"]),
        suite(&["0", "1|0", "01"], &["2*n+6", "poly2+6"]),
    ];
    let ranks: Vec<usize> = chain.iter().map(|s| big_o_rank(&p, s)).collect();
    assert!(ranks.windows(2).all(|w| w[1] <= w[0]), "{ranks:?}");
    assert_eq!(ranks[0], 2);
    assert_eq!(*ranks.last().unwrap(), 0);
}

#[test]
fn dominating_lookalikes_never_score_lower() {
    let family = [
        "lookalike:f=0",
        "lookalike:f=n+2",
        "lookalike:f=2*n+6",
        "lookalike:f=4*n+16",
        "lookalike:f=4*n+16+poly2",
    ];
    let s = suite(&["0", "1", "1|0", "11|0"], &["2*n+6", "4*n+20", "poly2+6"]);
    let ranks: Vec<usize> = family
        .iter()
        .map(|p| big_o_rank(&p.parse().unwrap(), &s))
        .collect();
    assert!(ranks.windows(2).all(|w| w[0] <= w[1]), "{ranks:?}");
    assert_eq!(ranks, [0, 2, 2, 2, 2]);
}

#[test]
fn slow_growing_ladder_with_a_quadratic_lookalike() {
    let ladder: Vec<Ordinal> = ["1", "2", "w", "w+1", "w*2"]
        .iter()
        .map(|a| a.parse().unwrap())
        .collect();
    let p: PredictorSpec = "lookalike:f=slow(w^2)".parse().unwrap();
    let s = suite(&["0", "1"], &["n+4", "2*n+6"]);
    let prof = aspi_hierarchy_profile(
        &p,
        HierarchyKind::SlowGrowing,
        &ladder,
        &s,
        &GameParams::default(),
        &MeasureBudgets::default(),
    )
    .unwrap();
    assert!(
        prof.levels.iter().all(|l| l.outcome.passes()),
        "{:?}",
        prof.levels
    );
    assert_eq!(prof.estimate.rank(), 5);
    // the constant rungs admit nothing; the linear ones admit the suite
    assert_eq!(prof.levels[0].outcome, LevelOutcome::Vacuous);
    assert_eq!(prof.levels[2].outcome, LevelOutcome::AllLearned);
}
