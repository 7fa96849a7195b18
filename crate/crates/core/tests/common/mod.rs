//! Seeded random diagrams shared by the integration suites.
#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;

use fid_core::{format::parse_file, FuzzyProbability, FuzzyValue, InfluenceDiagram, NodeSpec, Objective};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> InfluenceDiagram {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name]
        .iter()
        .collect();
    parse_file(p).unwrap()
}

pub fn ev(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A valid fuzzy row over `k` outcomes with strictly positive means. Binary
/// rows are complement pairs; some rows are crisp.
pub fn fuzzy_row(r: &mut impl Rng, k: usize) -> Vec<FuzzyProbability> {
    let w: Vec<f64> = (0..k).map(|_| r.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let crisp = r.gen_bool(0.15);
    let mut spread = |m: f64| {
        if crisp {
            0.0
        } else {
            r.gen_range(0.0..0.6) * m.max(0.05)
        }
    };
    if k == 2 {
        let m = w[0] / total;
        let (a, b) = (spread(m), spread(1.0 - m));
        let p = FuzzyProbability::from_nominal(a, m, b).unwrap();
        return vec![p, p.complement()];
    }
    w.iter()
        .map(|x| {
            let m = x / total;
            FuzzyProbability::from_nominal(spread(m), m, spread(1.0 - m)).unwrap()
        })
        .collect()
}

fn labels(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}_{i}")).collect()
}

/// Chance node with up to two parents drawn from `earlier`.
fn chance_node(r: &mut impl Rng, name: &str, k: usize, earlier: &[(String, usize)]) -> NodeSpec {
    let mut parents: Vec<&(String, usize)> = earlier.iter().filter(|_| r.gen_bool(0.5)).collect();
    parents.truncate(2);
    let rows = parents.iter().map(|p| p.1).product::<usize>();
    NodeSpec::Chance {
        name: name.to_string(),
        outcomes: labels(name, k),
        parents: parents.iter().map(|p| p.0.clone()).collect(),
        rows: (0..rows).map(|_| fuzzy_row(r, k)).collect(),
    }
}

#[derive(Debug, Clone)]
pub struct RandomDiagram {
    pub diagram: InfluenceDiagram,
    /// Chance nodes with their cardinalities, declaration order.
    pub chance: Vec<(String, usize)>,
}

impl RandomDiagram {
    pub fn outcome(&self, node: usize, i: usize) -> String {
        format!("{}_{i}", self.chance[node].0)
    }
}

/// Up to four chance nodes with two or three outcomes each.
pub fn chance_diagram(seed: u64) -> RandomDiagram {
    let mut r = rng(seed);
    let n = r.gen_range(2..=4);
    let mut chance: Vec<(String, usize)> = Vec::new();
    let mut specs = Vec::new();
    for i in 0..n {
        let name = format!("X{i}");
        let k = r.gen_range(2..=3);
        specs.push(chance_node(&mut r, &name, k, &chance));
        chance.push((name, k));
    }
    RandomDiagram {
        diagram: InfluenceDiagram::build(specs, Objective::Minimize).unwrap(),
        chance,
    }
}

/// Binary-only variant, used where complement pairing is checked.
pub fn binary_diagram(seed: u64) -> RandomDiagram {
    let mut r = rng(seed);
    let n = r.gen_range(2..=4);
    let mut chance: Vec<(String, usize)> = Vec::new();
    let mut specs = Vec::new();
    for i in 0..n {
        let name = format!("X{i}");
        specs.push(chance_node(&mut r, &name, 2, &chance));
        chance.push((name, 2));
    }
    RandomDiagram {
        diagram: InfluenceDiagram::build(specs, Objective::Minimize).unwrap(),
        chance,
    }
}

/// A random query on a chance-only diagram: target plus up to two observed
/// nodes.
pub fn random_query(seed: u64, rd: &RandomDiagram) -> (String, Vec<(String, String)>) {
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut idx: Vec<usize> = (0..rd.chance.len()).collect();
    idx.shuffle(&mut r);
    let target = rd.chance[idx[0]].0.clone();
    let m = r.gen_range(0..=2.min(idx.len() - 1));
    let evidence = idx[1..=m]
        .iter()
        .map(|&i| (rd.chance[i].0.clone(), rd.outcome(i, r.gen_range(0..rd.chance[i].1))))
        .collect();
    (target, evidence)
}

#[derive(Debug, Clone)]
pub struct RandomDecision {
    pub diagram: InfluenceDiagram,
    pub evidence: Vec<(String, String)>,
}

/// One decision node among up to four chance nodes, a value node with up to
/// three parents, and evidence covering the decision's observations.
pub fn decision_diagram(seed: u64) -> RandomDecision {
    let mut r = rng(seed);
    let n = r.gen_range(1..=4);
    let at = r.gen_range(0..=n);
    let mut earlier: Vec<(String, usize)> = Vec::new();
    let mut specs = Vec::new();
    let mut evidence = Vec::new();
    for i in 0..=n {
        if i == at {
            let observed: Vec<(String, usize)> = earlier.iter().filter(|_| r.gen_bool(0.4)).cloned().collect();
            for (name, k) in &earlier {
                let watch = observed.iter().any(|o| &o.0 == name);
                if watch || r.gen_bool(0.25) {
                    evidence.push((name.clone(), format!("{name}_{}", r.gen_range(0..*k))));
                }
            }
            let k = r.gen_range(2..=3);
            specs.push(NodeSpec::Decision {
                name: "D".into(),
                alternatives: labels("D", k),
                parents: observed.into_iter().map(|o| o.0).collect(),
            });
            earlier.push(("D".into(), k));
            continue;
        }
        let name = format!("X{}", if i > at { i - 1 } else { i });
        let k = r.gen_range(2..=3);
        specs.push(chance_node(&mut r, &name, k, &earlier));
        earlier.push((name, k));
    }
    let mut parents: Vec<(String, usize)> = earlier.iter().filter(|_| r.gen_bool(0.6)).cloned().collect();
    if parents.is_empty() {
        parents.push(earlier.choose(&mut r).unwrap().clone());
    }
    parents.truncate(3);
    let cells = parents.iter().map(|p| p.1).product::<usize>();
    specs.push(NodeSpec::Value {
        name: "V".into(),
        parents: parents.into_iter().map(|p| p.0).collect(),
        costs: (0..cells).map(|_| r.gen_range(0..=100) as f64).collect(),
    });
    let objective = if r.gen_bool(0.5) {
        Objective::Minimize
    } else {
        Objective::Maximize
    };
    RandomDecision {
        diagram: InfluenceDiagram::build(specs, objective).unwrap(),
        evidence,
    }
}

/// Linear fuzzy value with mean in [-100, 100] and spreads in [0, 50].
pub fn fuzzy_value(r: &mut impl Rng) -> FuzzyValue {
    let m = r.gen_range(-100.0..100.0);
    FuzzyValue::new(r.gen_range(0.0..50.0), m, r.gen_range(0.0..50.0)).unwrap()
}
