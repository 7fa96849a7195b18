//! Machine-readable solver reports.

use serde::Serialize;

use crate::diagram::Objective;
use crate::engine::{OpCounter, Policy, Posterior};
use crate::fuzzy::{FuzzyProbability, FuzzyValue};
use crate::oracle::{Agreement, Tolerances};
use crate::sensitivity::{DifferenceReport, SensitivityReport};

/// Boundary memberships come from the constrained extension principle:
/// the largest alpha whose consistent cut still reaches the domain edge.
pub const BOUNDARY_SOURCE: &str = "constrained";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityEntry {
    pub outcome: String,
    /// Full-precision triplet; parses back to the same value.
    pub triplet: String,
    /// Rounded for reading.
    pub display: String,
    pub mean: f64,
    pub support: [f64; 2],
    pub left_nominal: f64,
    pub right_nominal: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_at_zero: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_at_one: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_source: Option<&'static str>,
}

impl ProbabilityEntry {
    pub fn new(outcome: &str, p: &FuzzyProbability) -> Self {
        let s = p.support();
        let zero = (p.left_nominal() > p.mean()).then(|| p.boundary_at_zero());
        let one = (p.right_nominal() > 1.0 - p.mean()).then(|| p.boundary_at_one());
        ProbabilityEntry {
            outcome: outcome.to_string(),
            triplet: p.to_string(),
            display: format!("{p:.4}"),
            mean: p.mean(),
            support: [s.lo, s.hi],
            left_nominal: p.left_nominal(),
            right_nominal: p.right_nominal(),
            boundary_at_zero: zero,
            boundary_at_one: one,
            boundary_source: (zero.is_some() || one.is_some()).then_some(BOUNDARY_SOURCE),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueEntry {
    pub label: String,
    pub choice: Vec<[String; 2]>,
    pub display: String,
    pub mean: f64,
    pub left_spread: f64,
    pub right_spread: f64,
    pub support: [f64; 2],
}

impl ValueEntry {
    pub fn new(label: String, choice: Vec<[String; 2]>, v: &FuzzyValue) -> Self {
        let s = v.support();
        ValueEntry {
            label,
            choice,
            display: format!("{v:.3}"),
            mean: v.mean(),
            left_spread: v.left_spread(),
            right_spread: v.right_spread(),
            support: [s.lo, s.hi],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveName {
    Minimize,
    Maximize,
}

impl From<Objective> for ObjectiveName {
    fn from(o: Objective) -> Self {
        match o {
            Objective::Minimize => ObjectiveName::Minimize,
            Objective::Maximize => ObjectiveName::Maximize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyBlock {
    pub objective: ObjectiveName,
    pub alternatives: Vec<ValueEntry>,
    pub chosen: String,
    /// Chosen alternative per decision node.
    pub decisions: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Operations {
    /// Crisp arithmetic appended by the transformations.
    pub transformations: OpCounter,
    /// Arithmetic spent extremizing the fuzzy results.
    pub extremization: OpCounter,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleBlock {
    pub expression: String,
    pub grid: usize,
    pub bins: usize,
    pub configs: usize,
    pub tolerances: Tolerances,
    pub agreement: Agreement,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub evidence: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverReport {
    pub command: String,
    pub query: QueryEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior: Option<Vec<ProbabilityEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<DifferenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operations: Option<Operations>,
}

fn pairs(v: &[(String, String)]) -> Vec<[String; 2]> {
    v.iter().map(|(a, b)| [a.clone(), b.clone()]).collect()
}

impl SolverReport {
    pub fn new(command: &str, target: Option<&str>, evidence: &[(String, String)]) -> Self {
        SolverReport {
            command: command.to_string(),
            query: QueryEcho {
                target: target.map(str::to_string),
                evidence: pairs(evidence),
            },
            posterior: None,
            policy: None,
            sensitivity: None,
            difference: None,
            oracle: None,
            operations: None,
        }
    }

    pub fn posterior(p: &Posterior) -> Self {
        let mut r = Self::new("infer", Some(&p.query.target), &p.query.evidence);
        let dist = &p.distribution;
        r.posterior = Some(
            dist.space()
                .labels()
                .iter()
                .zip(dist.probs())
                .map(|(l, f)| ProbabilityEntry::new(l, f))
                .collect(),
        );
        r.operations = Some(Operations {
            transformations: p.built,
            extremization: p.counter,
        });
        r
    }

    pub fn policy(command: &str, p: &Policy) -> Self {
        let mut r = Self::new(command, None, &p.evidence);
        let chosen = p.chosen();
        r.policy = Some(PolicyBlock {
            objective: p.objective.into(),
            alternatives: p
                .alternatives
                .iter()
                .map(|a| ValueEntry::new(a.label(), pairs(&a.choice), &a.value))
                .collect(),
            chosen: chosen.label(),
            decisions: pairs(&chosen.choice),
        });
        r.operations = Some(Operations {
            transformations: p.built,
            extremization: p.counter,
        });
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}
