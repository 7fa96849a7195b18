//! Inference and decision solvers over fuzzy influence diagrams.

mod counter;
mod crisp;
mod extremize;
mod params;
mod query;
mod tape;
mod transform;

use thiserror::Error;

pub use counter::OpCounter;
pub use crisp::{crisp_expected_values, crisp_posterior, CrispModel};
pub use extremize::DEFAULT_EXHAUSTIVE_LIMIT;
pub use params::{ParamGroup, ParamSpace};
pub use query::{Expression, Query};
pub use transform::ParametricDiagram;

use crate::diagram::{DiagramError, InfluenceDiagram, NodeKind, Objective};
use crate::fuzzy::{FuzzyProbability, FuzzyValue, Interval};
use crate::tables::{FuzzyDistribution, TableError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` has already been removed")]
    Removed(String),
    #[error("`{node}` is not a {expected} node")]
    WrongKind { node: String, expected: NodeKind },
    #[error("cannot reverse {from} -> {to}: {reason}")]
    NotReversible { from: String, to: String, reason: String },
    #[error("`{node}` has decision child `{child}`")]
    HasDecisionChild { node: String, child: String },
    #[error("`{node}` feeds value node `{value}`; absorb it instead")]
    HasValueChild { node: String, value: String },
    #[error("`{0}` still has children")]
    NotBarren(String),
    #[error("the diagram has no value node")]
    NoValueNode,
    #[error("the diagram has no undecided decision node")]
    NoDecisionNode,
    #[error("`{0}` is not a parent of the value node")]
    NotValueParent(String),
    #[error("node `{node}` has no outcome `{label}`")]
    UnknownOutcome { node: String, label: String },
    #[error("`{0}` is both the target and evidence")]
    EvidenceOnTarget(String),
    #[error("`{0}` appears twice in the evidence")]
    DuplicateEvidence(String),
    #[error("row of `{node}` needs a value for `{parent}`")]
    Unconditioned { node: String, parent: String },
    #[error("decision `{0}` affects the query but is not fixed")]
    UnfixedDecision(String),
    #[error("decision `{decision}` observes `{parent}`, which is not in the evidence")]
    MissingInformation { decision: String, parent: String },
    #[error("the evidence has probability zero")]
    ZeroProbabilityEvidence,
    #[error("bad query: {0}")]
    BadQuery(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    /// Vertex combinations enumerated exhaustively before coordinate search.
    pub exhaustive_limit: usize,
    /// Chance nodes to eliminate first, in this order. Nodes not listed are
    /// eliminated deepest first afterwards.
    pub order: Option<Vec<String>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            order: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub query: Query,
    pub distribution: FuzzyDistribution,
    /// Crisp operations appended by the transformations.
    pub built: OpCounter,
    /// Operations spent extremizing the result.
    pub counter: OpCounter,
}

/// One joint choice of the undecided decision nodes and its expected value.
#[derive(Debug, Clone, PartialEq)]
pub struct Alternative {
    pub choice: Vec<(String, String)>,
    pub value: FuzzyValue,
}

impl Alternative {
    pub fn label(&self) -> String {
        self.choice
            .iter()
            .map(|(_, a)| a.as_str())
            .collect::<Vec<_>>()
            .join("+")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub objective: Objective,
    pub evidence: Vec<(String, String)>,
    pub alternatives: Vec<Alternative>,
    /// Index into `alternatives` with the best mean.
    pub chosen: usize,
    pub built: OpCounter,
    pub counter: OpCounter,
}

impl Policy {
    pub fn chosen(&self) -> &Alternative {
        &self.alternatives[self.chosen]
    }

    /// Chosen alternative for one decision node.
    pub fn chosen_for(&self, decision: &str) -> Option<&str> {
        self.chosen()
            .choice
            .iter()
            .find(|(d, _)| d == decision)
            .map(|(_, a)| a.as_str())
    }

    pub fn values(&self) -> Vec<FuzzyValue> {
        self.alternatives.iter().map(|a| a.value).collect()
    }
}

/// Resolves evidence names to `(node, outcome)` indices, rejecting unknown
/// names, value nodes, repeats and evidence on the target.
pub(crate) fn resolve_evidence(
    d: &InfluenceDiagram,
    evidence: &[(String, String)],
    target: Option<usize>,
) -> Result<Vec<(usize, usize)>, EngineError> {
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(evidence.len());
    for (name, label) in evidence {
        let id = d.node_id(name).map_err(|_| EngineError::UnknownNode(name.clone()))?;
        if Some(id) == target {
            return Err(EngineError::EvidenceOnTarget(name.clone()));
        }
        if out.iter().any(|&(n, _)| n == id) {
            return Err(EngineError::DuplicateEvidence(name.clone()));
        }
        let space = d.nodes()[id].space().ok_or_else(|| EngineError::WrongKind {
            node: name.clone(),
            expected: NodeKind::Chance,
        })?;
        let v = space.index_of(label).map_err(|_| EngineError::UnknownOutcome {
            node: name.clone(),
            label: label.clone(),
        })?;
        out.push((id, v));
    }
    Ok(out)
}

/// Every joint choice of the decision nodes not fixed by the evidence, first
/// decision most significant.
pub(crate) fn decision_combinations(
    d: &InfluenceDiagram,
    evidence: &[(usize, usize)],
) -> Result<Vec<Vec<(usize, usize)>>, EngineError> {
    let free: Vec<usize> = d
        .decision_nodes()
        .into_iter()
        .filter(|i| !evidence.iter().any(|e| e.0 == *i))
        .collect();
    if free.is_empty() {
        return Err(EngineError::NoDecisionNode);
    }
    for &dn in &free {
        for &p in d.nodes()[dn].parents() {
            if !free.contains(&p) && !evidence.iter().any(|e| e.0 == p) {
                return Err(EngineError::MissingInformation {
                    decision: d.nodes()[dn].name().to_string(),
                    parent: d.nodes()[p].name().to_string(),
                });
            }
        }
    }
    let cards: Vec<usize> = free
        .iter()
        .map(|&i| d.nodes()[i].space().expect("decision space").len())
        .collect();
    let total = crate::tables::config_count(&cards);
    Ok((0..total)
        .map(|idx| {
            let values = crate::tables::config_values(&cards, idx);
            free.iter().copied().zip(values).collect()
        })
        .collect())
}

fn remove_barren_nodes(pd: &mut ParametricDiagram, kept: &[usize]) {
    loop {
        let barren: Vec<usize> = pd
            .present()
            .filter(|&i| pd.kind(i) != NodeKind::Value && !kept.contains(&i) && pd.children(i).is_empty())
            .collect();
        if barren.is_empty() {
            return;
        }
        for i in barren {
            pd.drop_barren(i).expect("childless node");
        }
    }
}

fn eliminate_one(pd: &mut ParametricDiagram, x: usize) -> Result<(), EngineError> {
    let feeds_value = pd.value_node().is_some_and(|v| pd.parents(v).contains(&x));
    if feeds_value {
        pd.absorb(x)
    } else if pd.children(x).is_empty() {
        pd.drop_barren(x)
    } else {
        pd.sum_out(x)
    }
}

/// Removes every chance node outside `kept`: the requested order first, then
/// deepest first with ties to the earliest declared node.
fn eliminate(pd: &mut ParametricDiagram, kept: &[usize], opts: &SolveOptions) -> Result<(), EngineError> {
    for name in opts.order.iter().flatten() {
        let x = match pd.id(name) {
            Ok(x) => x,
            Err(EngineError::Removed(_)) => continue,
            Err(e) => return Err(e),
        };
        if pd.kind(x) == NodeKind::Chance && !kept.contains(&x) {
            eliminate_one(pd, x)?;
        }
    }
    loop {
        let next = pd
            .present()
            .filter(|&i| pd.kind(i) == NodeKind::Chance && !kept.contains(&i))
            .map(|i| (pd.depth(i), i))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        match next {
            Some((_, x)) => eliminate_one(pd, x)?,
            None => return Ok(()),
        }
    }
}

fn fix_decisions(
    pd: &mut ParametricDiagram,
    d: &InfluenceDiagram,
    choices: &[(usize, usize)],
) -> Result<(), EngineError> {
    for &(n, v) in choices {
        if d.nodes()[n].kind() == NodeKind::Decision {
            let label = &d.nodes()[n].space().expect("decision space").labels()[v];
            pd.fix(n, label)?;
        }
    }
    Ok(())
}

fn assignment(n: usize, evidence: &[(usize, usize)]) -> Vec<Option<usize>> {
    let mut a = vec![None; n];
    for &(i, v) in evidence {
        a[i] = Some(v);
    }
    a
}

/// Fails when the remaining chance evidence has (mean) probability zero.
/// Only evidence nodes are left, so their tables factor the evidence joint.
fn check_evidence(
    pd: &ParametricDiagram,
    evidence: &[(usize, usize)],
    assign: &[Option<usize>],
) -> Result<(), EngineError> {
    let mut p = 1.0;
    for &(e, v) in evidence {
        if !pd.is_present(e) || pd.kind(e) != NodeKind::Chance {
            continue;
        }
        let row = pd.row_index(e, assign)?;
        if pd.is_impossible(e, row) {
            return Err(EngineError::ZeroProbabilityEvidence);
        }
        p *= pd.mean_row(e, row)[v];
    }
    if p == 0.0 || !p.is_finite() {
        return Err(EngineError::ZeroProbabilityEvidence);
    }
    Ok(())
}

pub fn infer(d: &InfluenceDiagram, query: &Query) -> Result<Posterior, EngineError> {
    infer_with(d, query, &SolveOptions::default())
}

/// Fuzzy posterior of `query.target` given the evidence.
///
/// Decisions named in the evidence are fixed; any other decision that can
/// influence the target or the evidence is an error.
pub fn infer_with(d: &InfluenceDiagram, query: &Query, opts: &SolveOptions) -> Result<Posterior, EngineError> {
    let t = d
        .node_id(&query.target)
        .map_err(|_| EngineError::UnknownNode(query.target.clone()))?;
    if d.nodes()[t].kind() != NodeKind::Chance {
        return Err(EngineError::WrongKind {
            node: query.target.clone(),
            expected: NodeKind::Chance,
        });
    }
    let ev = resolve_evidence(d, &query.evidence, Some(t))?;
    let mut pd = ParametricDiagram::new(d).with_exhaustive_limit(opts.exhaustive_limit);
    fix_decisions(&mut pd, d, &ev)?;
    if let Some(v) = pd.value_node() {
        pd.drop_barren(v)?;
    }
    let mut kept: Vec<usize> = ev
        .iter()
        .filter(|e| d.nodes()[e.0].kind() == NodeKind::Chance)
        .map(|e| e.0)
        .collect();
    kept.push(t);
    remove_barren_nodes(&mut pd, &kept);
    if let Some(dn) = pd.present().find(|&i| pd.kind(i) == NodeKind::Decision) {
        return Err(EngineError::UnfixedDecision(pd.name(dn).to_string()));
    }
    eliminate(&mut pd, &kept, opts)?;
    pd.reverse_out(t, None)?;
    let assign = assignment(d.nodes().len(), &ev);
    check_evidence(&pd, &ev, &assign)?;
    let row = pd.row_index(t, &assign)?;
    let mut counter = OpCounter::default();
    let probs = pd
        .fuzzy_row(t, row, &mut counter)
        .ok_or(EngineError::ZeroProbabilityEvidence)?;
    let space = pd.space(t).expect("chance space").clone();
    Ok(Posterior {
        query: query.clone(),
        distribution: FuzzyDistribution::new(space, probs)?,
        built: pd.built_ops(),
        counter,
    })
}

pub fn decide(d: &InfluenceDiagram, evidence: &[(String, String)]) -> Result<Policy, EngineError> {
    decide_with(d, evidence, &SolveOptions::default())
}

/// Fuzzy expected value of every joint choice of the undecided decision
/// nodes, and the choice whose mean is best under the diagram's objective.
pub fn decide_with(
    d: &InfluenceDiagram,
    evidence: &[(String, String)],
    opts: &SolveOptions,
) -> Result<Policy, EngineError> {
    let ev = resolve_evidence(d, evidence, None)?;
    let combos = decision_combinations(d, &ev)?;
    if d.value_node().is_none() {
        return Err(EngineError::NoValueNode);
    }
    let mut base = ParametricDiagram::new(d).with_exhaustive_limit(opts.exhaustive_limit);
    fix_decisions(&mut base, d, &ev)?;
    let kept: Vec<usize> = ev
        .iter()
        .filter(|e| d.nodes()[e.0].kind() == NodeKind::Chance)
        .map(|e| e.0)
        .collect();
    let assign = assignment(d.nodes().len(), &ev);
    let mut alternatives = Vec::with_capacity(combos.len());
    let mut built = OpCounter::default();
    let mut counter = OpCounter::default();
    for combo in combos {
        let mut pd = base.clone();
        fix_decisions(&mut pd, d, &combo)?;
        remove_barren_nodes(&mut pd, &kept);
        eliminate(&mut pd, &kept, opts)?;
        check_evidence(&pd, &ev, &assign)?;
        let v = pd.value_node().expect("value node survives");
        let row = pd.row_index(v, &assign)?;
        let value = pd
            .fuzzy_value_row(row, &mut counter)
            .ok_or(EngineError::ZeroProbabilityEvidence)?;
        built += pd.built_ops();
        let choice = combo
            .iter()
            .map(|&(n, a)| {
                let node = &d.nodes()[n];
                (
                    node.name().to_string(),
                    node.space().expect("decision space").labels()[a].clone(),
                )
            })
            .collect();
        alternatives.push(Alternative { choice, value });
    }
    let objective = d.objective();
    let mut chosen = 0;
    for (i, a) in alternatives.iter().enumerate() {
        counter.comparisons += 1;
        let best = alternatives[chosen].value.mean();
        let better = match objective {
            Objective::Minimize => a.value.mean() < best,
            Objective::Maximize => a.value.mean() > best,
        };
        if better {
            chosen = i;
        }
    }
    Ok(Policy {
        objective,
        evidence: evidence.to_vec(),
        alternatives,
        chosen,
        built,
        counter,
    })
}

/// A scalar engine result: a posterior entry or an expected value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimate {
    Probability(FuzzyProbability),
    Value(FuzzyValue),
}

impl Estimate {
    pub fn support(&self) -> Interval {
        match self {
            Estimate::Probability(p) => p.support(),
            Estimate::Value(v) => v.support(),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Estimate::Probability(p) => p.mean(),
            Estimate::Value(v) => v.mean(),
        }
    }

    pub fn membership_at(&self, x: f64) -> f64 {
        match self {
            Estimate::Probability(p) => p.membership_at(x),
            Estimate::Value(v) => v.membership_at(x),
        }
    }

    /// Largest membership over `[lo, hi]`; the functions are unimodal.
    pub fn max_on(&self, iv: Interval) -> f64 {
        let m = self.mean();
        if iv.contains(m) {
            1.0
        } else if iv.hi < m {
            self.membership_at(iv.hi)
        } else {
            self.membership_at(iv.lo)
        }
    }
}

/// Engine value of an [`Expression`]. An expectation's choice must name an
/// alternative for every decision left free by the evidence.
pub fn estimate(d: &InfluenceDiagram, expr: &Expression, opts: &SolveOptions) -> Result<Estimate, EngineError> {
    match expr {
        Expression::Probability {
            target,
            outcome,
            evidence,
        } => {
            let q = Query {
                target: target.clone(),
                evidence: evidence.clone(),
            };
            let post = infer_with(d, &q, opts)?;
            let p = *post
                .distribution
                .get(outcome)
                .map_err(|_| EngineError::UnknownOutcome {
                    node: target.clone(),
                    label: outcome.clone(),
                })?;
            Ok(Estimate::Probability(p))
        }
        Expression::Expectation { choice, evidence } => {
            let policy = decide_with(d, evidence, opts)?;
            let alt = policy
                .alternatives
                .iter()
                .find(|a| a.choice.iter().all(|c| choice.contains(c)))
                .ok_or_else(|| EngineError::BadQuery(format!("`{expr}` does not pick one alternative per decision")))?;
            if let Some(extra) = choice.iter().find(|c| !alt.choice.contains(c)) {
                return Err(EngineError::BadQuery(format!(
                    "`{}` is not an undecided decision",
                    extra.0
                )));
            }
            Ok(Estimate::Value(alt.value))
        }
    }
}
