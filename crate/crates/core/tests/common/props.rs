//! Property checks run both by the property suite and by the acceptance run.

use fid_core::engine::{decide, infer, Query};
use fid_core::sensitivity::{alpha_star, alpha_star_with, deterministic_dominance, pair_alpha};
use fid_core::tables::{ConditionalTable, FuzzyDistribution, OutcomeSpace};
use fid_core::{FuzzyProbability, FuzzyValue, InfluenceDiagram, NodeSpec, Objective};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRng, TestRunner};
use rand::Rng;

use super::{binary_diagram, fuzzy_row, fuzzy_value, random_query, rng};

pub const CASES: u32 = 1000;

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn probability() -> impl Strategy<Value = FuzzyProbability> {
    (0.0..=1.0f64, 0.0..1.2f64, 0.0..1.2f64, any::<bool>()).prop_map(|(m, l, r, crisp)| {
        if crisp {
            FuzzyProbability::crisp(m).unwrap()
        } else {
            FuzzyProbability::from_nominal(l, m, r).unwrap()
        }
    })
}

fn value() -> impl Strategy<Value = FuzzyValue> {
    any::<u64>().prop_map(|s| fuzzy_value(&mut rng(s)))
}

pub fn complement_involution(cases: u32) -> Result<(), String> {
    run(cases, probability(), |p| {
        let back = p.complement().complement();
        prop_assert!(back.approx_eq(&p, 1e-12), "{p:?} -> {back:?}");
        prop_assert!((p.complement().support().lo - (1.0 - p.support().hi)).abs() < 1e-12);
        Ok(())
    })
}

pub fn triplet_round_trip(cases: u32) -> Result<(), String> {
    run(cases, probability(), |p| {
        let text = p.to_string();
        let back: FuzzyProbability = text.parse().map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert!(back.approx_eq(&p, 1e-6), "{text}: {p:?} -> {back:?}");
        let s = (p.support(), back.support());
        prop_assert!((s.0.lo - s.1.lo).abs() < 1e-6 && (s.0.hi - s.1.hi).abs() < 1e-6);
        Ok(())
    })
}

/// Binary rows stay complement pairs through slicing and product, the product
/// is a valid joint, and binary posteriors are complement pairs.
pub fn binary_pairing(cases: u32) -> Result<(), String> {
    run(cases, any::<u64>(), |seed| {
        let mut r = rng(seed);
        let child = OutcomeSpace::new("C", vec!["c1".into(), "c0".into()]).unwrap();
        let parent = OutcomeSpace::new("P", vec!["p1".into(), "p0".into()]).unwrap();
        let table = ConditionalTable::new(
            child,
            vec![parent.clone()],
            vec![fuzzy_row(&mut r, 2), fuzzy_row(&mut r, 2)],
        )
        .unwrap();
        for l in ["p1", "p0"] {
            let row = table.condition_slice(&[l]).unwrap();
            prop_assert!(row.probs()[1].approx_eq(&row.probs()[0].complement(), 1e-12));
        }
        let marginal = FuzzyDistribution::new(parent, fuzzy_row(&mut r, 2)).unwrap();
        let joint = table.product(&marginal).unwrap();
        prop_assert!(joint.validate().is_valid(), "{:?}", joint.validate());
        let total: f64 = joint.cells().iter().map(|c| c.mean()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);

        let rd = binary_diagram(seed);
        let (target, evidence) = random_query(seed, &rd);
        let post = infer(&rd.diagram, &Query { target, evidence }).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let p = post.distribution.probs();
        prop_assert!(p[1].approx_eq(&p[0].complement(), 1e-6), "{:?} vs {:?}", p[0], p[1]);
        Ok(())
    })
}

pub fn alpha_star_bounds_symmetry_affine(cases: u32) -> Result<(), String> {
    let strategy = (
        value(),
        value(),
        prop_oneof![0.05..20.0f64, -20.0..-0.05f64],
        -1e3..1e3f64,
        0..8u8,
    );
    run(cases, strategy, |(m, n, a, b, pick)| {
        // Now and then compare a value with itself or a crisp copy.
        let n = match pick {
            0 => m,
            1 => FuzzyValue::crisp(n.mean()),
            _ => n,
        };
        let s = pair_alpha(&m, &n);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s, pair_alpha(&n, &m));
        let t = pair_alpha(&m.affine(a, b), &n.affine(a, b));
        prop_assert!((s - t).abs() < 1e-9, "{s} vs {t} under {a}x+{b}");
        let all = alpha_star(&[m, n]).unwrap();
        prop_assert!((0.0..=1.0).contains(&all));
        if pick == 0 {
            prop_assert_eq!(s, 1.0);
        }
        Ok(())
    })
}

pub fn dominance_implies_zero(cases: u32) -> Result<(), String> {
    run(
        cases,
        (value(), 0.0..20.0f64, 0.0..50.0f64, 0.0..50.0f64),
        |(m, gap, l, r)| {
            let lo = m.support().hi + gap;
            let n = FuzzyValue::new(l, lo + l, r).unwrap();
            prop_assume!(n.mean() > m.mean());
            prop_assert!(deterministic_dominance(&m, &n));
            prop_assert_eq!(pair_alpha(&m, &n), 0.0);
            prop_assert_eq!(alpha_star(&[m, n]).unwrap(), 0.0);
            prop_assert_eq!(
                alpha_star_with(&[n.affine(-1.0, 0.0), m.affine(-1.0, 0.0)], Objective::Maximize).unwrap(),
                0.0
            );
            Ok(())
        },
    )
}

/// `D -> X -> V` with costs increasing in X's outcome. Under the first
/// alternative X only takes outcomes up to `j`, under the second only from
/// `j` on, so the first alternative dominates stochastically for every
/// consistent perturbation.
pub fn fosd_instance(seed: u64) -> InfluenceDiagram {
    let mut r = rng(seed);
    let k = r.gen_range(2..=4);
    let j = r.gen_range(0..k);
    let place = |r: &mut rand_chacha::ChaCha8Rng, from: usize, to: usize| {
        let mut row = vec![FuzzyProbability::ZERO; k];
        if from == to {
            row[from] = FuzzyProbability::ONE;
        } else {
            row[from..=to].copy_from_slice(&fuzzy_row(r, to - from + 1));
        }
        row
    };
    let rows = vec![place(&mut r, 0, j), place(&mut r, j, k - 1)];
    let mut cost = 0.0;
    let costs = (0..k)
        .map(|_| {
            cost += r.gen_range(1..=50) as f64;
            cost
        })
        .collect();
    let specs = vec![
        NodeSpec::Decision {
            name: "D".into(),
            alternatives: vec!["M".into(), "N".into()],
            parents: vec![],
        },
        NodeSpec::Chance {
            name: "X".into(),
            outcomes: (0..k).map(|i| format!("x{i}")).collect(),
            parents: vec!["D".into()],
            rows,
        },
        NodeSpec::Value {
            name: "V".into(),
            parents: vec!["X".into()],
            costs,
        },
    ];
    InfluenceDiagram::build(specs, Objective::Minimize).unwrap()
}

pub fn fosd_implies_zero(cases: u32) -> Result<(), String> {
    run(cases, any::<u64>(), |seed| {
        let d = fosd_instance(seed);
        let p = decide(&d, &[]).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let values = p.values();
        let a = alpha_star_with(&values, Objective::Minimize).unwrap();
        prop_assert_eq!(a, 0.0, "{:?}", values);
        Ok(())
    })
}
