//! How robust is a decision taken on mean expected values?
//!
//! Two fuzzy expected values are compared by intersecting their corresponding
//! membership halves (left with left, right with right). The largest membership
//! at such a crossing is α*; with possibility at least 1 − α* the mean-optimal
//! choice stays optimal.

use serde::Serialize;
use thiserror::Error;

use crate::diagram::{InfluenceDiagram, Objective};
use crate::engine::{Expression, Policy};
use crate::fuzzy::{FuzzyValue, Side};
use crate::oracle::{self, OracleError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error("need at least two alternatives, got {0}")]
    TooFew(usize),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Crossing of the same-side membership lines of `m` and `n`, if it falls
/// where both memberships are in (0, 1].
///
/// Left halves are `x = (mean - l) + l·α`, right halves `x = (mean + r) - r·α`.
pub fn half_intersection(m: &FuzzyValue, n: &FuzzyValue, side: Side) -> Option<(f64, f64)> {
    let (foot_m, slope_m, foot_n, slope_n) = match side {
        Side::Left => (
            m.mean() - m.left_spread(),
            m.left_spread(),
            n.mean() - n.left_spread(),
            n.left_spread(),
        ),
        Side::Right => (
            m.mean() + m.right_spread(),
            -m.right_spread(),
            n.mean() + n.right_spread(),
            -n.right_spread(),
        ),
    };
    let ds = slope_n - slope_m;
    let df = foot_m - foot_n;
    if ds == 0.0 {
        return if df == 0.0 { Some((m.mean(), 1.0)) } else { None };
    }
    let alpha = df / ds;
    if alpha > 0.0 && alpha <= 1.0 {
        Some((foot_m + slope_m * alpha, alpha))
    } else {
        None
    }
}

/// α* of a pair: the larger same-side crossing, 0 without one.
pub fn pair_alpha(m: &FuzzyValue, n: &FuzzyValue) -> f64 {
    [Side::Left, Side::Right]
        .iter()
        .filter_map(|&s| half_intersection(m, n, s))
        .map(|(_, a)| a)
        .fold(0.0, f64::max)
}

fn best_index(values: &[FuzzyValue], objective: Objective) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        let better = match objective {
            Objective::Minimize => v.mean() < values[best].mean(),
            Objective::Maximize => v.mean() > values[best].mean(),
        };
        if better {
            best = i;
        }
    }
    best
}

/// α* for cost-like alternatives (lower mean is better).
pub fn alpha_star(values: &[FuzzyValue]) -> Result<f64, SensitivityError> {
    alpha_star_with(values, Objective::Minimize)
}

/// α* against the mean-optimal alternative; for two alternatives this is the
/// pair's α*.
pub fn alpha_star_with(values: &[FuzzyValue], objective: Objective) -> Result<f64, SensitivityError> {
    if values.len() < 2 {
        return Err(SensitivityError::TooFew(values.len()));
    }
    let best = best_index(values, objective);
    Ok(values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, v)| pair_alpha(&values[best], v))
        .fold(0.0, f64::max))
}

/// `m` lies entirely at or below `n`, with a strictly smaller mean.
pub fn deterministic_dominance(m: &FuzzyValue, n: &FuzzyValue) -> bool {
    m.support().hi <= n.support().lo && m.mean() < n.mean()
}

/// Conventional possibility that `worse` is actually at least as good as
/// `better`: height where the right half of `better` meets the left half of
/// `worse` (for costs). Reported as a diagnostic next to α*, not in its place.
pub fn possibility_overlap(better: &FuzzyValue, worse: &FuzzyValue) -> f64 {
    if better.mean() >= worse.mean() {
        return 1.0;
    }
    let reach = better.right_spread() + worse.left_spread();
    if reach == 0.0 {
        return 0.0;
    }
    ((better.mean() + better.right_spread() - (worse.mean() - worse.left_spread())) / reach).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub x: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairAnalysis {
    pub first: String,
    pub second: String,
    pub left: Option<Crossing>,
    pub right: Option<Crossing>,
    pub alpha: f64,
    /// One of the pair lies wholly on the better side of the other.
    pub deterministic_dominance: bool,
    /// Possibility-measure diagnostic; not the α* criterion.
    pub possibility_overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub alternatives: Vec<(String, FuzzyValue)>,
    /// Mean-optimal alternative.
    pub optimal: String,
    /// The optimal alternative against each of the others.
    pub pairs: Vec<PairAnalysis>,
    pub alpha_star: f64,
    /// 1 − α*: possibility with which the mean-based choice is optimal.
    pub possibility: f64,
}

fn crossing(c: Option<(f64, f64)>) -> Option<Crossing> {
    c.map(|(x, alpha)| Crossing { x, alpha })
}

/// Analyzes labelled alternatives under an objective.
pub fn analyze(
    alternatives: &[(String, FuzzyValue)],
    objective: Objective,
) -> Result<SensitivityReport, SensitivityError> {
    let values: Vec<FuzzyValue> = alternatives.iter().map(|a| a.1).collect();
    let alpha_star = alpha_star_with(&values, objective)?;
    let best = best_index(&values, objective);
    let b = &values[best];
    let pairs = values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(i, v)| {
            let (dominant, overlap) = match objective {
                Objective::Minimize => (deterministic_dominance(b, v), possibility_overlap(b, v)),
                Objective::Maximize => (
                    deterministic_dominance(v, b),
                    possibility_overlap(&v.affine(-1.0, 0.0), &b.affine(-1.0, 0.0)),
                ),
            };
            PairAnalysis {
                first: alternatives[best].0.clone(),
                second: alternatives[i].0.clone(),
                left: crossing(half_intersection(b, v, Side::Left)),
                right: crossing(half_intersection(b, v, Side::Right)),
                alpha: pair_alpha(b, v),
                deterministic_dominance: dominant,
                possibility_overlap: overlap,
            }
        })
        .collect();
    Ok(SensitivityReport {
        alternatives: alternatives.to_vec(),
        optimal: alternatives[best].0.clone(),
        pairs,
        alpha_star,
        possibility: 1.0 - alpha_star,
    })
}

pub fn analyze_policy(policy: &Policy) -> Result<SensitivityReport, SensitivityError> {
    let alts: Vec<(String, FuzzyValue)> = policy.alternatives.iter().map(|a| (a.label(), a.value)).collect();
    analyze(&alts, policy.objective)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// alt1 − alt2 > 0 in every configuration with positive membership.
    Positive,
    /// alt1 − alt2 < 0 in every such configuration.
    Negative,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceReport {
    pub verdict: Verdict,
    pub min: f64,
    pub max: f64,
    /// Sup-min membership of the difference over `[min, max]`.
    pub curve: Vec<Option<f64>>,
}

/// Samples `cost(alt1) − cost(alt2)` over the consistent perturbations of the
/// fuzzy inputs, both alternatives evaluated on the same configuration.
pub fn difference_dominance(
    d: &InfluenceDiagram,
    evidence: &[(String, String)],
    alt1: &[(String, String)],
    alt2: &[(String, String)],
    grid_n: usize,
    bins: usize,
) -> Result<DifferenceReport, SensitivityError> {
    let e1 = Expression::Expectation {
        choice: alt1.to_vec(),
        evidence: evidence.to_vec(),
    };
    let e2 = Expression::Expectation {
        choice: alt2.to_vec(),
        evidence: evidence.to_vec(),
    };
    let samples = oracle::sample_pair(d, &e1, &e2, grid_n)?;
    let mut pos = true;
    let mut neg = true;
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, mu) in &samples {
        min = min.min(x);
        max = max.max(x);
        if mu > 0.0 {
            pos &= x > 0.0;
            neg &= x < 0.0;
        }
    }
    let verdict = match (pos, neg) {
        (true, false) => Verdict::Positive,
        (false, true) => Verdict::Negative,
        _ => Verdict::Mixed,
    };
    let n = if max > min { bins.max(1) } else { 1 };
    let mut curve = vec![None; n];
    let w = (max - min) / n as f64;
    for (x, mu) in samples {
        let i = if w > 0.0 {
            (((x - min) / w) as usize).min(n - 1)
        } else {
            0
        };
        curve[i] = Some(curve[i].map_or(mu, |m: f64| m.max(mu)));
    }
    Ok(DifferenceReport {
        verdict,
        min,
        max,
        curve,
    })
}
