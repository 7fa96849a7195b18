//! JSON diagram files.
//!
//! ```json
//! {"objective": "minimize",
//!  "nodes": [
//!    {"name": "L", "kind": "chance", "outcomes": ["L1", "L0"],
//!     "table": {"L1": "(.03,.95,.03)", "L0": "(.03,.05,.03)"}},
//!    {"name": "S", "kind": "chance", "outcomes": ["S1", "S0"], "parents": ["L"],
//!     "table": {"L1,S1": "1", "L0,S0": "1"}},
//!    {"name": "C", "kind": "value", "parents": ["S"], "costs": {"S1": 0, "S0": 10}}]}
//! ```
//!
//! Chance-table keys list the parent outcomes in declared parent order followed
//! by the node's own outcome; omitted entries are crisp zero. Cost keys list the
//! parent outcomes and must all be present.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{DiagramError, InfluenceDiagram, NodeBody, NodeSpec, Objective};
use crate::fuzzy::{parse_probability, FuzzyError, FuzzyProbability};
use crate::tables::{config_count, config_values};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("node `{node}`, field `{field}`: {message}")]
    Field {
        node: String,
        field: &'static str,
        message: String,
    },
    #[error("node `{node}`, entry `{key}`: {source}")]
    Triplet {
        node: String,
        key: String,
        #[source]
        source: FuzzyError,
    },
    #[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<DiagramError>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveName {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Chance,
    Decision,
    Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub name: String,
    pub kind: KindName,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outcomes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parents: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub table: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub costs: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveName>,
    pub nodes: Vec<NodeEntry>,
}

fn split_key(key: &str) -> Vec<&str> {
    key.split(',').map(str::trim).collect()
}

fn join_key(parts: &[&str]) -> String {
    parts.join(",")
}

impl DiagramFile {
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        serde_json::from_str(text).map_err(|e| FormatError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram files serialize") + "\n"
    }

    /// Converts to node specs and validates the resulting diagram.
    pub fn to_diagram(&self) -> Result<InfluenceDiagram, FormatError> {
        let outcomes: HashMap<&str, &[String]> = self
            .nodes
            .iter()
            .filter(|n| n.kind != KindName::Value)
            .map(|n| (n.name.as_str(), n.outcomes.as_slice()))
            .collect();
        let mut specs = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let field_err = |field, message: String| FormatError::Field {
                node: n.name.clone(),
                field,
                message,
            };
            let mut parent_spaces = Vec::with_capacity(n.parents.len());
            for p in &n.parents {
                let labels = outcomes
                    .get(p.as_str())
                    .ok_or_else(|| field_err("parents", format!("unknown parent `{p}`")))?;
                parent_spaces.push(*labels);
            }
            let cards: Vec<usize> = parent_spaces.iter().map(|s| s.len()).collect();
            let label_of = |row: usize| -> Vec<&str> {
                config_values(&cards, row)
                    .into_iter()
                    .zip(&parent_spaces)
                    .map(|(v, s)| s[v].as_str())
                    .collect()
            };
            match n.kind {
                KindName::Chance => {
                    if !n.costs.is_empty() {
                        return Err(field_err("costs", "chance nodes have no costs".into()));
                    }
                    let mut rows = vec![vec![FuzzyProbability::ZERO; n.outcomes.len()]; config_count(&cards)];
                    let mut index: HashMap<String, (usize, usize)> = HashMap::new();
                    for (r, row) in rows.iter().enumerate() {
                        for (o, label) in n.outcomes.iter().enumerate().take(row.len()) {
                            let mut parts = label_of(r);
                            parts.push(label);
                            index.insert(join_key(&parts), (r, o));
                        }
                    }
                    for (key, text) in &n.table {
                        let &(r, o) = index
                            .get(&join_key(&split_key(key)))
                            .ok_or_else(|| field_err("table", format!("key `{key}` matches no configuration")))?;
                        rows[r][o] = parse_probability(text).map_err(|source| FormatError::Triplet {
                            node: n.name.clone(),
                            key: key.clone(),
                            source,
                        })?;
                    }
                    specs.push(NodeSpec::Chance {
                        name: n.name.clone(),
                        outcomes: n.outcomes.clone(),
                        parents: n.parents.clone(),
                        rows,
                    });
                }
                KindName::Decision => {
                    if !n.table.is_empty() || !n.costs.is_empty() {
                        return Err(field_err("table", "decision nodes have no tables".into()));
                    }
                    specs.push(NodeSpec::Decision {
                        name: n.name.clone(),
                        alternatives: n.outcomes.clone(),
                        parents: n.parents.clone(),
                    });
                }
                KindName::Value => {
                    if !n.table.is_empty() || !n.outcomes.is_empty() {
                        return Err(field_err("table", "value nodes only carry costs".into()));
                    }
                    let mut costs = vec![None; config_count(&cards)];
                    let mut index: HashMap<String, usize> = HashMap::new();
                    for r in 0..costs.len() {
                        index.insert(join_key(&label_of(r)), r);
                    }
                    for (key, &c) in &n.costs {
                        let &r = index
                            .get(&join_key(&split_key(key)))
                            .ok_or_else(|| field_err("costs", format!("key `{key}` matches no configuration")))?;
                        costs[r] = Some(c);
                    }
                    let costs = costs
                        .into_iter()
                        .enumerate()
                        .map(|(r, c)| {
                            c.ok_or_else(|| field_err("costs", format!("missing cost for `{}`", label_of(r).join(","))))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    specs.push(NodeSpec::Value {
                        name: n.name.clone(),
                        parents: n.parents.clone(),
                        costs,
                    });
                }
            }
        }
        let objective = match self.objective {
            Some(ObjectiveName::Maximize) => Objective::Maximize,
            _ => Objective::Minimize,
        };
        InfluenceDiagram::build(specs, objective).map_err(FormatError::Invalid)
    }

    /// File form of a diagram, writing every chance entry explicitly.
    pub fn from_diagram(d: &InfluenceDiagram) -> Self {
        let nodes = d
            .nodes()
            .iter()
            .map(|n| {
                let parents: Vec<String> = n.parents().iter().map(|&p| d.nodes()[p].name().to_string()).collect();
                let spaces: Vec<&[String]> = n
                    .parents()
                    .iter()
                    .map(|&p| d.nodes()[p].space().expect("parents have outcomes").labels())
                    .collect();
                let cards: Vec<usize> = spaces.iter().map(|s| s.len()).collect();
                let label_of = |row: usize| -> Vec<&str> {
                    config_values(&cards, row)
                        .into_iter()
                        .zip(&spaces)
                        .map(|(v, s)| s[v].as_str())
                        .collect()
                };
                let mut entry = NodeEntry {
                    name: n.name().to_string(),
                    kind: KindName::Chance,
                    outcomes: Vec::new(),
                    parents,
                    table: BTreeMap::new(),
                    costs: BTreeMap::new(),
                };
                match n.body() {
                    NodeBody::Chance(t) => {
                        entry.outcomes = t.child().labels().to_vec();
                        for (r, row) in t.rows().iter().enumerate() {
                            for (o, p) in row.iter().enumerate() {
                                let mut parts = label_of(r);
                                parts.push(&t.child().labels()[o]);
                                entry.table.insert(join_key(&parts), p.to_string());
                            }
                        }
                    }
                    NodeBody::Decision(s) => {
                        entry.kind = KindName::Decision;
                        entry.outcomes = s.labels().to_vec();
                    }
                    NodeBody::Value(c) => {
                        entry.kind = KindName::Value;
                        for (r, &cost) in c.costs().iter().enumerate() {
                            entry.costs.insert(join_key(&label_of(r)), cost);
                        }
                    }
                }
                entry
            })
            .collect();
        DiagramFile {
            objective: Some(match d.objective() {
                Objective::Minimize => ObjectiveName::Minimize,
                Objective::Maximize => ObjectiveName::Maximize,
            }),
            nodes,
        }
    }
}

pub fn parse_str(text: &str) -> Result<InfluenceDiagram, FormatError> {
    DiagramFile::from_json(text)?.to_diagram()
}

pub fn parse_file(path: impl AsRef<Path>) -> Result<InfluenceDiagram, FormatError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_str(&text)
}
