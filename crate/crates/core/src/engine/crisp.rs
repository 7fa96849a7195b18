//! Point-estimate evaluation by brute-force joint enumeration.
//!
//! This is deliberately a different algorithm from the transformation engine:
//! it never reverses or removes anything, it just sums the joint distribution
//! over every configuration consistent with the evidence.

use super::{resolve_evidence, EngineError};
use crate::diagram::{InfluenceDiagram, NodeBody, NodeKind};
use crate::tables::{config_count, config_index};

#[derive(Debug, Clone)]
struct CNode {
    kind: NodeKind,
    parents: Vec<usize>,
    card: usize,
    /// Chance: rows x outcomes; value: rows x 1; decision: empty.
    table: Vec<Vec<f64>>,
}

/// Crisp copy of a diagram whose chance rows can be overwritten.
#[derive(Debug, Clone)]
pub struct CrispModel {
    nodes: Vec<CNode>,
}

impl CrispModel {
    /// Model at the means of every fuzzy entry.
    pub fn from_diagram(d: &InfluenceDiagram) -> Self {
        let nodes = d
            .nodes()
            .iter()
            .map(|n| {
                let (card, table) = match n.body() {
                    NodeBody::Chance(t) => (
                        t.child().len(),
                        t.rows().iter().map(|r| r.iter().map(|p| p.mean()).collect()).collect(),
                    ),
                    NodeBody::Decision(s) => (s.len(), Vec::new()),
                    NodeBody::Value(c) => (1, c.costs().iter().map(|&x| vec![x]).collect()),
                };
                CNode {
                    kind: n.kind(),
                    parents: n.parents().to_vec(),
                    card,
                    table,
                }
            })
            .collect();
        CrispModel { nodes }
    }

    /// Replaces one chance-table row.
    pub fn set_row(&mut self, node: usize, row: usize, values: &[f64]) {
        self.nodes[node].table[row].copy_from_slice(values);
    }

    fn row(&self, id: usize, assign: &[usize]) -> usize {
        let n = &self.nodes[id];
        let cards: Vec<usize> = n.parents.iter().map(|&p| self.nodes[p].card).collect();
        let values: Vec<usize> = n.parents.iter().map(|&p| assign[p]).collect();
        config_index(&cards, &values)
    }

    /// Visits every configuration of the chance nodes that agrees with
    /// `fixed`, passing the assignment and its joint probability.
    fn enumerate(&self, fixed: &[Option<usize>], mut f: impl FnMut(&[usize], f64)) {
        let free: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| self.nodes[i].kind == NodeKind::Chance && fixed[i].is_none())
            .collect();
        let mut assign: Vec<usize> = fixed.iter().map(|v| v.unwrap_or(0)).collect();
        let cards: Vec<usize> = free.iter().map(|&i| self.nodes[i].card).collect();
        for idx in 0..config_count(&cards) {
            let mut rest = idx;
            for (k, &v) in free.iter().enumerate().rev() {
                assign[v] = rest % cards[k];
                rest /= cards[k];
            }
            let mut p = 1.0;
            for (i, n) in self.nodes.iter().enumerate() {
                if n.kind == NodeKind::Chance {
                    p *= n.table[self.row(i, &assign)][assign[i]];
                }
            }
            f(&assign, p);
        }
    }

    fn ancestors_of(&self, roots: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = roots.to_vec();
        while let Some(n) = stack.pop() {
            for &p in &self.nodes[n].parents {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    fn fixed(&self, evidence: &[(usize, usize)]) -> Vec<Option<usize>> {
        let mut fixed = vec![None; self.nodes.len()];
        for &(n, v) in evidence {
            fixed[n] = Some(v);
        }
        fixed
    }

    /// Posterior of `target` given evidence, as a vector over its outcomes.
    pub fn posterior(
        &self,
        d: &InfluenceDiagram,
        target: usize,
        evidence: &[(usize, usize)],
    ) -> Result<Vec<f64>, EngineError> {
        let fixed = self.fixed(evidence);
        let mut kept: Vec<usize> = evidence.iter().map(|e| e.0).collect();
        kept.push(target);
        let anc = self.ancestors_of(&kept);
        for (i, n) in self.nodes.iter().enumerate() {
            if n.kind == NodeKind::Decision && fixed[i].is_none() && anc[i] {
                return Err(EngineError::UnfixedDecision(d.nodes()[i].name().to_string()));
            }
        }
        let mut acc = vec![0.0; self.nodes[target].card];
        self.enumerate(&fixed, |a, p| acc[a[target]] += p);
        let total: f64 = acc.iter().sum();
        if total == 0.0 || !total.is_finite() {
            return Err(EngineError::ZeroProbabilityEvidence);
        }
        Ok(acc.into_iter().map(|x| x / total).collect())
    }

    /// Expected value of the value node given evidence that fixes every
    /// decision node.
    pub fn expected_value(&self, d: &InfluenceDiagram, evidence: &[(usize, usize)]) -> Result<f64, EngineError> {
        let v = self
            .nodes
            .iter()
            .position(|n| n.kind == NodeKind::Value)
            .ok_or(EngineError::NoValueNode)?;
        let fixed = self.fixed(evidence);
        for (i, n) in self.nodes.iter().enumerate() {
            if n.kind == NodeKind::Decision && fixed[i].is_none() {
                return Err(EngineError::UnfixedDecision(d.nodes()[i].name().to_string()));
            }
        }
        let (mut num, mut den) = (0.0, 0.0);
        self.enumerate(&fixed, |a, p| {
            num += p * self.nodes[v].table[self.row(v, a)][0];
            den += p;
        });
        if den == 0.0 || !den.is_finite() {
            return Err(EngineError::ZeroProbabilityEvidence);
        }
        Ok(num / den)
    }
}

/// Crisp posterior of a query's target, outcome by outcome.
pub fn crisp_posterior(
    d: &InfluenceDiagram,
    target: &str,
    evidence: &[(String, String)],
) -> Result<Vec<f64>, EngineError> {
    let t = d.node_id(target)?;
    if d.nodes()[t].kind() != NodeKind::Chance {
        return Err(EngineError::WrongKind {
            node: target.to_string(),
            expected: NodeKind::Chance,
        });
    }
    let ev = resolve_evidence(d, evidence, Some(t))?;
    CrispModel::from_diagram(d).posterior(d, t, &ev)
}

/// Crisp expected value for each joint choice of the decision nodes, in the
/// same order as [`super::Policy::alternatives`].
pub fn crisp_expected_values(d: &InfluenceDiagram, evidence: &[(String, String)]) -> Result<Vec<f64>, EngineError> {
    let ev = resolve_evidence(d, evidence, None)?;
    let model = CrispModel::from_diagram(d);
    super::decision_combinations(d, &ev)?
        .into_iter()
        .map(|choice| {
            let mut full = ev.clone();
            full.extend(choice);
            model.expected_value(d, &full)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{NodeSpec, Objective};
    use crate::fuzzy::FuzzyProbability;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn enumeration_matches_hand_computation() {
        let c = |x: f64| FuzzyProbability::crisp(x).unwrap();
        let d = InfluenceDiagram::build(
            vec![
                NodeSpec::Chance {
                    name: "A".into(),
                    outcomes: labels(&["a0", "a1"]),
                    parents: vec![],
                    rows: vec![vec![c(0.3), c(0.7)]],
                },
                NodeSpec::Chance {
                    name: "B".into(),
                    outcomes: labels(&["b0", "b1"]),
                    parents: labels(&["A"]),
                    rows: vec![vec![c(0.9), c(0.1)], vec![c(0.2), c(0.8)]],
                },
            ],
            Objective::Minimize,
        )
        .unwrap();
        let post = crisp_posterior(&d, "A", &[("B".into(), "b0".into())]).unwrap();
        let expect = 0.27 / (0.27 + 0.14);
        assert!((post[0] - expect).abs() < 1e-15);
        let prior = crisp_posterior(&d, "B", &[]).unwrap();
        assert!((prior[0] - 0.41).abs() < 1e-15);
    }
}
