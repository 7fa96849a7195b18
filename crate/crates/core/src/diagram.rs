//! Influence diagram structure: chance, decision and value nodes over a DAG.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::fuzzy::FuzzyProbability;
use crate::tables::{config_count, ConditionalTable, OutcomeSpace, TableError, ValidationIssue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagramError {
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("node `{node}` names unknown parent `{parent}`")]
    UnknownParent { node: String, parent: String },
    #[error("node `{node}` lists parent `{parent}` twice")]
    RepeatedParent { node: String, parent: String },
    #[error("node `{node}` has parent `{parent}`, which is a value node")]
    ValueNodeHasChildren { node: String, parent: String },
    #[error("only one value node is supported, found {0}")]
    MultipleValueNodes(usize),
    #[error("the graph has a cycle through `{0}`")]
    Cycle(String),
    #[error("node `{node}`: {source}")]
    Table {
        node: String,
        #[source]
        source: TableError,
    },
    #[error("node `{node}` expects {expected} costs, found {found}")]
    CostArity {
        node: String,
        expected: usize,
        found: usize,
    },
    #[error("node `{node}` has non-finite cost {cost}")]
    BadCost { node: String, cost: f64 },
    #[error("node `{0}`: {1}")]
    Invalid(String, ValidationIssue),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("`{0}` is not a {1} node")]
    WrongKind(String, &'static str),
    #[error("there is no arc {0} -> {1}")]
    UnknownArc(String, String),
}

/// Whether expected values are minimized (costs) or maximized (utilities).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    #[default]
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Chance,
    Decision,
    Value,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Chance => "chance",
            NodeKind::Decision => "decision",
            NodeKind::Value => "value",
        })
    }
}

/// Crisp cost (or utility) per joint configuration of the value node's parents.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFunction {
    parents: Vec<OutcomeSpace>,
    costs: Vec<f64>,
}

impl CostFunction {
    pub fn parents(&self) -> &[OutcomeSpace] {
        &self.parents
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }
}

/// Node description handed to [`InfluenceDiagram::build`].
#[derive(Debug, Clone, PartialEq)]
pub enum NodeSpec {
    Chance {
        name: String,
        outcomes: Vec<String>,
        parents: Vec<String>,
        /// One row per parent configuration (mixed radix, first parent most
        /// significant), one entry per outcome.
        rows: Vec<Vec<FuzzyProbability>>,
    },
    Decision {
        name: String,
        alternatives: Vec<String>,
        parents: Vec<String>,
    },
    Value {
        name: String,
        parents: Vec<String>,
        costs: Vec<f64>,
    },
}

impl NodeSpec {
    pub fn name(&self) -> &str {
        match self {
            NodeSpec::Chance { name, .. } | NodeSpec::Decision { name, .. } | NodeSpec::Value { name, .. } => name,
        }
    }

    fn parents(&self) -> &[String] {
        match self {
            NodeSpec::Chance { parents, .. } | NodeSpec::Decision { parents, .. } | NodeSpec::Value { parents, .. } => {
                parents
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeBody {
    Chance(ConditionalTable),
    Decision(OutcomeSpace),
    Value(CostFunction),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    name: String,
    parents: Vec<usize>,
    body: NodeBody,
}

impl Node {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn body(&self) -> &NodeBody {
        &self.body
    }

    pub fn kind(&self) -> NodeKind {
        match self.body {
            NodeBody::Chance(_) => NodeKind::Chance,
            NodeBody::Decision(_) => NodeKind::Decision,
            NodeBody::Value(_) => NodeKind::Value,
        }
    }

    /// Outcome space of a chance or decision node.
    pub fn space(&self) -> Option<&OutcomeSpace> {
        match &self.body {
            NodeBody::Chance(t) => Some(t.child()),
            NodeBody::Decision(s) => Some(s),
            NodeBody::Value(_) => None,
        }
    }

    pub fn table(&self) -> Option<&ConditionalTable> {
        match &self.body {
            NodeBody::Chance(t) => Some(t),
            _ => None,
        }
    }
}

/// Outcome of a reversibility query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reversibility {
    pub reversible: bool,
    pub reason: String,
}

/// Validated influence diagram. Nodes keep their declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceDiagram {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    objective: Objective,
}

impl InfluenceDiagram {
    /// Builds and validates a diagram, reporting every structural and table
    /// error found.
    pub fn build(specs: Vec<NodeSpec>, objective: Objective) -> Result<Self, Vec<DiagramError>> {
        let mut errors = Vec::new();
        let mut index = HashMap::new();
        for (i, s) in specs.iter().enumerate() {
            if index.insert(s.name().to_string(), i).is_some() {
                errors.push(DiagramError::DuplicateNode(s.name().to_string()));
            }
        }
        let values = specs.iter().filter(|s| matches!(s, NodeSpec::Value { .. })).count();
        if values > 1 {
            errors.push(DiagramError::MultipleValueNodes(values));
        }

        let mut parent_ids = Vec::with_capacity(specs.len());
        for s in &specs {
            let mut ids = Vec::new();
            for p in s.parents() {
                match index.get(p) {
                    None => errors.push(DiagramError::UnknownParent {
                        node: s.name().to_string(),
                        parent: p.clone(),
                    }),
                    Some(&j) if ids.contains(&j) => errors.push(DiagramError::RepeatedParent {
                        node: s.name().to_string(),
                        parent: p.clone(),
                    }),
                    Some(&j) => {
                        if matches!(specs[j], NodeSpec::Value { .. }) {
                            errors.push(DiagramError::ValueNodeHasChildren {
                                node: s.name().to_string(),
                                parent: p.clone(),
                            });
                        }
                        ids.push(j)
                    }
                }
            }
            parent_ids.push(ids);
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        if let Some(n) = find_cycle(&parent_ids) {
            return Err(vec![DiagramError::Cycle(specs[n].name().to_string())]);
        }

        // Outcome spaces first, so tables can reference their parents' spaces.
        let mut spaces: Vec<Option<OutcomeSpace>> = Vec::with_capacity(specs.len());
        for s in &specs {
            let labels = match s {
                NodeSpec::Chance { outcomes, .. } => Some(outcomes),
                NodeSpec::Decision { alternatives, .. } => Some(alternatives),
                NodeSpec::Value { .. } => None,
            };
            spaces.push(labels.and_then(|l| {
                OutcomeSpace::new(s.name(), l.clone())
                    .map_err(|e| {
                        errors.push(DiagramError::Table {
                            node: s.name().to_string(),
                            source: e,
                        })
                    })
                    .ok()
            }));
        }
        if !errors.is_empty() {
            return Err(errors);
        }

        let mut nodes = Vec::with_capacity(specs.len());
        for (s, parents) in specs.into_iter().zip(parent_ids) {
            let parent_spaces: Vec<OutcomeSpace> = parents
                .iter()
                .map(|&p| spaces[p].clone().expect("value nodes have no children"))
                .collect();
            let name = s.name().to_string();
            let body = match s {
                NodeSpec::Chance { rows, .. } => {
                    let own = spaces[index[&name]].clone().expect("chance space");
                    match ConditionalTable::new(own, parent_spaces, rows) {
                        Ok(t) => {
                            for issue in t.validate().issues {
                                errors.push(DiagramError::Invalid(name.clone(), issue));
                            }
                            NodeBody::Chance(t)
                        }
                        Err(e) => {
                            errors.push(DiagramError::Table {
                                node: name.clone(),
                                source: e,
                            });
                            continue;
                        }
                    }
                }
                NodeSpec::Decision { .. } => NodeBody::Decision(spaces[index[&name]].clone().expect("decision space")),
                NodeSpec::Value { costs, .. } => {
                    let expected = config_count(&parent_spaces.iter().map(|p| p.len()).collect::<Vec<_>>());
                    if costs.len() != expected {
                        errors.push(DiagramError::CostArity {
                            node: name.clone(),
                            expected,
                            found: costs.len(),
                        });
                    }
                    if let Some(&c) = costs.iter().find(|c| !c.is_finite()) {
                        errors.push(DiagramError::BadCost {
                            node: name.clone(),
                            cost: c,
                        });
                    }
                    NodeBody::Value(CostFunction {
                        parents: parent_spaces,
                        costs,
                    })
                }
            };
            nodes.push(Node { name, parents, body });
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(InfluenceDiagram {
            nodes,
            index,
            objective,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn node(&self, name: &str) -> Result<&Node, DiagramError> {
        self.index
            .get(name)
            .map(|&i| &self.nodes[i])
            .ok_or_else(|| DiagramError::UnknownNode(name.to_string()))
    }

    pub fn node_id(&self, name: &str) -> Result<usize, DiagramError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| DiagramError::UnknownNode(name.to_string()))
    }

    pub fn value_node(&self) -> Option<usize> {
        self.nodes.iter().position(|n| n.kind() == NodeKind::Value)
    }

    pub fn decision_nodes(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind() == NodeKind::Decision)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn children(&self, id: usize) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.parents.contains(&id))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn arc_count(&self) -> usize {
        self.nodes.iter().map(|n| n.parents.len()).sum()
    }

    /// Whether the arc `from -> to` can be reversed: both endpoints must be
    /// chance nodes and the arc must be the only directed path between them.
    pub fn reversible(&self, from: &str, to: &str) -> Result<Reversibility, DiagramError> {
        let i = self.node_id(from)?;
        let j = self.node_id(to)?;
        if !self.nodes[j].parents.contains(&i) {
            return Err(DiagramError::UnknownArc(from.to_string(), to.to_string()));
        }
        let verdict = |ok: bool, reason: String| Reversibility { reversible: ok, reason };
        for &n in &[i, j] {
            let kind = self.nodes[n].kind();
            if kind != NodeKind::Chance {
                return Ok(verdict(
                    false,
                    format!(
                        "`{}` is a {kind} node; only arcs between chance nodes reverse",
                        self.nodes[n].name
                    ),
                ));
            }
        }
        let parents: Vec<Vec<usize>> = self.nodes.iter().map(|n| n.parents.clone()).collect();
        if has_indirect_path(&parents, i, j) {
            return Ok(verdict(
                false,
                format!("another directed path leads from `{from}` to `{to}`"),
            ));
        }
        Ok(verdict(
            true,
            "both endpoints are chance nodes and the arc is the only path".into(),
        ))
    }
}

/// Some node on a cycle, if the parent lists describe a cyclic graph.
pub(crate) fn find_cycle(parents: &[Vec<usize>]) -> Option<usize> {
    let n = parents.len();
    let mut indegree = vec![0usize; n];
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        indegree[c] = ps.len();
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut seen = 0;
    while let Some(v) = ready.pop() {
        seen += 1;
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(c);
            }
        }
    }
    if seen == n {
        None
    } else {
        (0..n).find(|&i| indegree[i] > 0)
    }
}

/// True when `to` is reachable from `from` without using the direct arc.
pub(crate) fn has_indirect_path(parents: &[Vec<usize>], from: usize, to: usize) -> bool {
    let n = parents.len();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut stack: Vec<usize> = children[from].iter().copied().filter(|&c| c != to).collect();
    let mut seen = BTreeSet::new();
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        if seen.insert(v) {
            stack.extend(children[v].iter().copied());
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(s: &str) -> FuzzyProbability {
        s.parse().unwrap()
    }

    fn labels(l: &[&str]) -> Vec<String> {
        l.iter().map(|s| s.to_string()).collect()
    }

    fn chance(name: &str, outcomes: &[&str], parents: &[&str], rows: Vec<Vec<FuzzyProbability>>) -> NodeSpec {
        NodeSpec::Chance {
            name: name.into(),
            outcomes: labels(outcomes),
            parents: labels(parents),
            rows,
        }
    }

    fn det_or(child_ok_if_all_ok: usize) -> Vec<Vec<FuzzyProbability>> {
        (0..4)
            .map(|i| {
                if i == child_ok_if_all_ok {
                    vec![FuzzyProbability::ONE, FuzzyProbability::ZERO]
                } else {
                    vec![FuzzyProbability::ZERO, FuzzyProbability::ONE]
                }
            })
            .collect()
    }

    fn two_board_net() -> Vec<NodeSpec> {
        vec![
            chance(
                "L",
                &["L1", "L0"],
                &[],
                vec![vec![fp("(.03,.95,.03)"), fp("(.03,.05,.03)")]],
            ),
            chance(
                "IO",
                &["IO1", "IO0"],
                &[],
                vec![vec![fp("(.03,.99,[.66])"), fp("([.66],.01,.03)")]],
            ),
            chance("S", &["S1", "S0"], &["L", "IO"], det_or(0)),
        ]
    }

    #[test]
    fn builds_inference_fixture() {
        let d = InfluenceDiagram::build(two_board_net(), Objective::Minimize).unwrap();
        assert_eq!(d.nodes().len(), 3);
        assert_eq!(d.arc_count(), 2);
        let r = d.reversible("L", "S").unwrap();
        assert!(r.reversible, "{}", r.reason);
    }

    #[test]
    fn cycle_detected() {
        let mut specs = two_board_net();
        if let NodeSpec::Chance { parents, rows, .. } = &mut specs[0] {
            parents.push("S".into());
            *rows = vec![vec![FuzzyProbability::ONE, FuzzyProbability::ZERO]; 2];
        }
        let errs = InfluenceDiagram::build(specs, Objective::Minimize).unwrap_err();
        assert!(matches!(errs[0], DiagramError::Cycle(_)));
    }

    #[test]
    fn structural_errors_collected() {
        let mut specs = two_board_net();
        specs.push(NodeSpec::Value {
            name: "V".into(),
            parents: labels(&["S"]),
            costs: vec![1.0, 2.0],
        });
        specs.push(NodeSpec::Value {
            name: "W".into(),
            parents: labels(&["Q"]),
            costs: vec![],
        });
        let errs = InfluenceDiagram::build(specs, Objective::Minimize).unwrap_err();
        assert!(errs.iter().any(|e| matches!(e, DiagramError::MultipleValueNodes(2))));
        assert!(errs.iter().any(|e| matches!(e, DiagramError::UnknownParent { .. })));
    }

    #[test]
    fn bad_row_count_and_invalid_table() {
        let mut specs = two_board_net();
        if let NodeSpec::Chance { rows, .. } = &mut specs[2] {
            rows.pop();
        }
        assert!(matches!(
            InfluenceDiagram::build(specs, Objective::Minimize).unwrap_err()[0],
            DiagramError::Table { .. }
        ));
        let mut specs = two_board_net();
        if let NodeSpec::Chance { rows, .. } = &mut specs[0] {
            rows[0][0] = FuzzyProbability::crisp(0.6).unwrap();
            rows[0][1] = FuzzyProbability::crisp(0.5).unwrap();
        }
        let errs = InfluenceDiagram::build(specs, Objective::Minimize).unwrap_err();
        assert!(errs
            .iter()
            .all(|e| matches!(e, DiagramError::Invalid(n, _) if n == "L")));
    }

    #[test]
    fn decision_arcs_not_reversible() {
        let specs = vec![
            NodeSpec::Decision {
                name: "D".into(),
                alternatives: labels(&["a", "b"]),
                parents: vec![],
            },
            chance("R", &["r1", "r0"], &["D"], vec![vec![fp("0.5"), fp("0.5")]; 2]),
        ];
        let d = InfluenceDiagram::build(specs, Objective::Minimize).unwrap();
        assert!(!d.reversible("D", "R").unwrap().reversible);
        assert!(matches!(d.reversible("R", "D"), Err(DiagramError::UnknownArc(..))));
    }

    #[test]
    fn alternate_path_blocks_reversal() {
        let half = || vec![fp("0.5"), fp("0.5")];
        let specs = vec![
            chance("I", &["a", "b"], &[], vec![half()]),
            chance("K", &["a", "b"], &["I"], vec![half(); 2]),
            chance("J", &["a", "b"], &["I", "K"], vec![half(); 4]),
        ];
        let d = InfluenceDiagram::build(specs, Objective::Minimize).unwrap();
        assert!(!d.reversible("I", "J").unwrap().reversible);
        assert!(d.reversible("K", "J").unwrap().reversible);
    }
}
