//! Value-preserving influence diagram transformations over symbolic tables.
//!
//! A [`ParametricDiagram`] mirrors an [`InfluenceDiagram`] but stores every
//! table entry as a tape slot, i.e. a crisp expression in the fuzzy input
//! parameters. Transformations only build new expressions; fuzzy tables are
//! produced on demand by extremizing the final expressions over the consistent
//! perturbation box, so correlations introduced by earlier steps are never lost.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::counter::OpCounter;
use super::extremize::{Extremizer, DEFAULT_EXHAUSTIVE_LIMIT};
use super::params::{ParamGroup, ParamSpace};
use super::tape::{ParamRef, Slot, Tape};
use super::EngineError;
use crate::diagram::{has_indirect_path, InfluenceDiagram, NodeBody, NodeKind};
use crate::fuzzy::{FuzzyProbability, FuzzyValue, Interval};
use crate::tables::{config_count, config_index, ConditionalTable, OutcomeSpace};

#[derive(Debug, Clone)]
struct PNode {
    name: String,
    kind: NodeKind,
    space: Option<OutcomeSpace>,
    parents: Vec<usize>,
    /// Chance: rows x outcomes. Value: rows x 1.
    table: Vec<Vec<Slot>>,
    /// Rows conditioned on a configuration of probability zero.
    impossible: BTreeSet<usize>,
    removed: bool,
}

#[derive(Debug, Clone)]
pub struct ParametricDiagram {
    tape: Tape,
    params: Arc<ParamSpace>,
    nodes: Vec<PNode>,
    exhaustive_limit: usize,
}

impl ParametricDiagram {
    pub fn new(diagram: &InfluenceDiagram) -> Self {
        let mut tape = Tape::new();
        let mut params = ParamSpace::default();
        let mut nodes = Vec::with_capacity(diagram.nodes().len());
        for (id, n) in diagram.nodes().iter().enumerate() {
            let (space, table) = match n.body() {
                NodeBody::Chance(t) => {
                    let mut rows = Vec::with_capacity(t.rows().len());
                    for (r, row) in t.rows().iter().enumerate() {
                        let group = if row.iter().all(|p| p.is_crisp()) {
                            None
                        } else {
                            Some(params.push(ParamGroup {
                                node: id,
                                row: r,
                                entries: row.clone(),
                            }))
                        };
                        rows.push(
                            row.iter()
                                .enumerate()
                                .map(|(o, p)| match group {
                                    Some(g) if !p.is_crisp() => tape.param(ParamRef { group: g, outcome: o }),
                                    _ => tape.constant(p.mean()),
                                })
                                .collect(),
                        );
                    }
                    (Some(t.child().clone()), rows)
                }
                NodeBody::Decision(s) => (Some(s.clone()), Vec::new()),
                NodeBody::Value(c) => (None, c.costs().iter().map(|&x| vec![tape.constant(x)]).collect()),
            };
            nodes.push(PNode {
                name: n.name().to_string(),
                kind: n.kind(),
                space,
                parents: n.parents().to_vec(),
                table,
                impossible: BTreeSet::new(),
                removed: false,
            });
        }
        ParametricDiagram {
            tape,
            params: Arc::new(params),
            nodes,
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
        }
    }

    /// Bound on vertex combinations enumerated exhaustively before switching to
    /// block-coordinate search.
    pub fn with_exhaustive_limit(mut self, limit: usize) -> Self {
        self.exhaustive_limit = limit;
        self
    }

    pub fn param_space(&self) -> &ParamSpace {
        &self.params
    }

    /// Arithmetic appended by the transformations so far.
    pub fn built_ops(&self) -> OpCounter {
        self.tape.built()
    }

    // ---- structure queries ------------------------------------------------

    pub fn id(&self, name: &str) -> Result<usize, EngineError> {
        let id = self
            .nodes
            .iter()
            .position(|n| n.name == name)
            .ok_or_else(|| EngineError::UnknownNode(name.to_string()))?;
        if self.nodes[id].removed {
            return Err(EngineError::Removed(name.to_string()));
        }
        Ok(id)
    }

    pub fn name(&self, id: usize) -> &str {
        &self.nodes[id].name
    }

    pub fn kind(&self, id: usize) -> NodeKind {
        self.nodes[id].kind
    }

    pub fn is_present(&self, id: usize) -> bool {
        !self.nodes[id].removed
    }

    pub fn present(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&i| !self.nodes[i].removed)
    }

    pub fn parents(&self, id: usize) -> &[usize] {
        &self.nodes[id].parents
    }

    pub fn parent_names(&self, id: usize) -> Vec<String> {
        self.nodes[id]
            .parents
            .iter()
            .map(|&p| self.nodes[p].name.clone())
            .collect()
    }

    pub fn children(&self, id: usize) -> Vec<usize> {
        self.present()
            .filter(|&c| self.nodes[c].parents.contains(&id))
            .collect()
    }

    pub fn value_node(&self) -> Option<usize> {
        self.present().find(|&i| self.nodes[i].kind == NodeKind::Value)
    }

    pub fn space(&self, id: usize) -> Option<&OutcomeSpace> {
        self.nodes[id].space.as_ref()
    }

    fn card(&self, id: usize) -> usize {
        self.nodes[id].space.as_ref().map_or(1, |s| s.len())
    }

    fn cards(&self, ids: &[usize]) -> Vec<usize> {
        ids.iter().map(|&i| self.card(i)).collect()
    }

    fn row_of(&self, parents: &[usize], assign: &[usize]) -> usize {
        let values: Vec<usize> = parents.iter().map(|&p| assign[p]).collect();
        config_index(&self.cards(parents), &values)
    }

    /// Present nodes in topological order, ties broken by declaration order.
    pub fn topological(&self) -> Vec<usize> {
        let mut placed = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let present: Vec<usize> = self.present().collect();
        while order.len() < present.len() {
            let next = present
                .iter()
                .copied()
                .find(|&i| {
                    !placed[i]
                        && self.nodes[i]
                            .parents
                            .iter()
                            .all(|&p| placed[p] || self.nodes[p].removed)
                })
                .expect("diagram stays acyclic");
            placed[next] = true;
            order.push(next);
        }
        order
    }

    /// Length of the longest directed path from a root to `id`.
    pub fn depth(&self, id: usize) -> usize {
        let order = self.topological();
        let mut depth = vec![0usize; self.nodes.len()];
        for &n in &order {
            depth[n] = self.nodes[n].parents.iter().map(|&p| depth[p] + 1).max().unwrap_or(0);
        }
        depth[id]
    }

    fn current_parents(&self) -> Vec<Vec<usize>> {
        self.nodes
            .iter()
            .map(|n| if n.removed { Vec::new() } else { n.parents.clone() })
            .collect()
    }

    fn require_kind(&self, id: usize, kind: NodeKind) -> Result<(), EngineError> {
        if self.nodes[id].kind != kind {
            return Err(EngineError::WrongKind {
                node: self.nodes[id].name.clone(),
                expected: kind,
            });
        }
        Ok(())
    }

    /// Calls `f` with every assignment of `vars` written into a full-length
    /// assignment vector.
    fn for_each_config(&self, vars: &[usize], mut f: impl FnMut(&mut Vec<usize>)) {
        let cards = self.cards(vars);
        let mut assign = vec![0usize; self.nodes.len()];
        for idx in 0..config_count(&cards) {
            let mut rest = idx;
            for (k, &v) in vars.iter().enumerate().rev() {
                assign[v] = rest % cards[k];
                rest /= cards[k];
            }
            f(&mut assign);
        }
    }

    fn uniform_row(&mut self, k: usize) -> Vec<Slot> {
        let u = self.tape.constant(1.0 / k as f64);
        vec![u; k]
    }

    // ---- transformations --------------------------------------------------

    /// Reverses the arc `from -> to` between two chance nodes by Bayes' rule.
    pub fn reverse_arc(&self, from: &str, to: &str) -> Result<Self, EngineError> {
        let x = self.id(from)?;
        let y = self.id(to)?;
        let mut out = self.clone();
        out.reverse(x, y)?;
        Ok(out)
    }

    pub(crate) fn reverse(&mut self, x: usize, y: usize) -> Result<(), EngineError> {
        if !self.nodes[y].parents.contains(&x) {
            return Err(EngineError::NotReversible {
                from: self.nodes[x].name.clone(),
                to: self.nodes[y].name.clone(),
                reason: "no such arc".into(),
            });
        }
        for &n in &[x, y] {
            if self.nodes[n].kind != NodeKind::Chance {
                return Err(EngineError::NotReversible {
                    from: self.nodes[x].name.clone(),
                    to: self.nodes[y].name.clone(),
                    reason: format!("`{}` is not a chance node", self.nodes[n].name),
                });
            }
        }
        if has_indirect_path(&self.current_parents(), x, y) {
            return Err(EngineError::NotReversible {
                from: self.nodes[x].name.clone(),
                to: self.nodes[y].name.clone(),
                reason: "another directed path connects them".into(),
            });
        }
        let a = self.nodes[x].parents.clone();
        let old_y_parents = self.nodes[y].parents.clone();
        let b: Vec<usize> = old_y_parents.iter().copied().filter(|&p| p != x).collect();
        let mut new_y_parents = b.clone();
        new_y_parents.extend(a.iter().copied().filter(|p| !b.contains(p)));
        let mut new_x_parents = a.clone();
        new_x_parents.extend(b.iter().copied().filter(|p| !a.contains(p)));
        new_x_parents.push(y);

        let kx = self.card(x);
        let ky = self.card(y);
        let y_rows = config_count(&self.cards(&new_y_parents));
        let mut new_y_table = vec![Vec::new(); y_rows];
        let mut new_y_impossible = BTreeSet::new();
        let mut new_x_table = vec![Vec::new(); y_rows * ky];
        let mut new_x_impossible = BTreeSet::new();

        let mut configs = Vec::new();
        self.for_each_config(&new_y_parents, |assign| configs.push(assign.clone()));
        for mut assign in configs {
            let rx = self.row_of(&a, &assign);
            let ry_new = self.row_of(&new_y_parents, &assign);
            let mut dead = self.nodes[x].impossible.contains(&rx);
            let mut joint = vec![vec![self.tape.zero(); kx]; ky];
            for xv in 0..kx {
                assign[x] = xv;
                let ry = self.row_of(&old_y_parents, &assign);
                let px = self.nodes[x].table[rx][xv];
                if self.nodes[y].impossible.contains(&ry) && !self.tape.is_zero(px) {
                    dead = true;
                }
                for (yv, slot) in joint.iter_mut().enumerate() {
                    let py = self.nodes[y].table[ry][yv];
                    slot[xv] = self.tape.mul(py, px);
                }
            }
            let mut marginal = Vec::with_capacity(ky);
            for row in &joint {
                marginal.push(self.tape.sum(row.iter().copied()));
            }
            if dead {
                new_y_impossible.insert(ry_new);
            }
            for yv in 0..ky {
                assign[y] = yv;
                let rxn = self.row_of(&new_x_parents, &assign);
                if dead || self.tape.is_zero(marginal[yv]) {
                    new_x_impossible.insert(rxn);
                    new_x_table[rxn] = self.uniform_row(kx);
                } else {
                    new_x_table[rxn] = joint[yv].iter().map(|&j| self.tape.div(j, marginal[yv])).collect();
                }
            }
            new_y_table[ry_new] = if dead { self.uniform_row(ky) } else { marginal };
        }
        let nx = &mut self.nodes[x];
        nx.parents = new_x_parents;
        nx.table = new_x_table;
        nx.impossible = new_x_impossible;
        let ny = &mut self.nodes[y];
        ny.parents = new_y_parents;
        ny.table = new_y_table;
        ny.impossible = new_y_impossible;
        Ok(())
    }

    /// Reverses arcs from `x` to its chance children, topologically first
    /// child first, until none remain except possibly `keep`.
    pub(crate) fn reverse_out(&mut self, x: usize, keep: Option<usize>) -> Result<(), EngineError> {
        loop {
            let children = self.children(x);
            if let Some(&d) = children.iter().find(|&&c| self.nodes[c].kind == NodeKind::Decision) {
                return Err(EngineError::HasDecisionChild {
                    node: self.nodes[x].name.clone(),
                    child: self.nodes[d].name.clone(),
                });
            }
            let chance: Vec<usize> = children
                .into_iter()
                .filter(|&c| self.nodes[c].kind == NodeKind::Chance && Some(c) != keep)
                .collect();
            if chance.is_empty() {
                return Ok(());
            }
            let order = self.topological();
            let first = *order.iter().find(|n| chance.contains(n)).expect("children are present");
            self.reverse(x, first)?;
        }
    }

    /// Removes a chance node, folding it into its successors by expectation.
    pub fn sum_out_chance(&self, node: &str) -> Result<Self, EngineError> {
        let x = self.id(node)?;
        let mut out = self.clone();
        out.sum_out(x)?;
        Ok(out)
    }

    pub(crate) fn sum_out(&mut self, x: usize) -> Result<(), EngineError> {
        self.require_kind(x, NodeKind::Chance)?;
        if let Some(v) = self
            .children(x)
            .into_iter()
            .find(|&c| self.nodes[c].kind == NodeKind::Value)
        {
            return Err(EngineError::HasValueChild {
                node: self.nodes[x].name.clone(),
                value: self.nodes[v].name.clone(),
            });
        }
        let chance = self.children(x);
        if chance.is_empty() {
            self.nodes[x].removed = true;
            return Ok(());
        }
        let order = self.topological();
        let last = *order
            .iter()
            .rev()
            .find(|n| chance.contains(n))
            .expect("children are present");
        self.reverse_out(x, Some(last))?;

        let y = last;
        let a = self.nodes[x].parents.clone();
        let old_y_parents = self.nodes[y].parents.clone();
        let b: Vec<usize> = old_y_parents.iter().copied().filter(|&p| p != x).collect();
        let mut new_y_parents = b.clone();
        new_y_parents.extend(a.iter().copied().filter(|p| !b.contains(p)));
        let kx = self.card(x);
        let ky = self.card(y);
        let mut table = vec![Vec::new(); config_count(&self.cards(&new_y_parents))];
        let mut impossible = BTreeSet::new();
        let mut configs = Vec::new();
        self.for_each_config(&new_y_parents, |assign| configs.push(assign.clone()));
        for mut assign in configs {
            let rx = self.row_of(&a, &assign);
            let r_new = self.row_of(&new_y_parents, &assign);
            let mut dead = self.nodes[x].impossible.contains(&rx);
            let mut terms = vec![Vec::with_capacity(kx); ky];
            for xv in 0..kx {
                assign[x] = xv;
                let ry = self.row_of(&old_y_parents, &assign);
                let px = self.nodes[x].table[rx][xv];
                if self.nodes[y].impossible.contains(&ry) && !self.tape.is_zero(px) {
                    dead = true;
                }
                for (yv, t) in terms.iter_mut().enumerate() {
                    let py = self.nodes[y].table[ry][yv];
                    t.push(self.tape.mul(py, px));
                }
            }
            table[r_new] = if dead {
                impossible.insert(r_new);
                self.uniform_row(ky)
            } else {
                terms.into_iter().map(|t| self.tape.sum(t)).collect()
            };
        }
        let ny = &mut self.nodes[y];
        ny.parents = new_y_parents;
        ny.table = table;
        ny.impossible = impossible;
        self.nodes[x].removed = true;
        Ok(())
    }

    /// Takes the expectation of the value node over a chance parent, first
    /// reversing any arcs from that parent into other chance nodes.
    pub fn absorb_into_value(&self, node: &str) -> Result<Self, EngineError> {
        let x = self.id(node)?;
        let mut out = self.clone();
        out.absorb(x)?;
        Ok(out)
    }

    pub(crate) fn absorb(&mut self, x: usize) -> Result<(), EngineError> {
        self.require_kind(x, NodeKind::Chance)?;
        let v = self.value_node().ok_or(EngineError::NoValueNode)?;
        if !self.nodes[v].parents.contains(&x) {
            return Err(EngineError::NotValueParent(self.nodes[x].name.clone()));
        }
        self.reverse_out(x, None)?;
        let a = self.nodes[x].parents.clone();
        let old_v_parents = self.nodes[v].parents.clone();
        let rest: Vec<usize> = old_v_parents.iter().copied().filter(|&p| p != x).collect();
        let mut new_v_parents = rest.clone();
        new_v_parents.extend(a.iter().copied().filter(|p| !rest.contains(p)));
        let kx = self.card(x);
        let mut table = vec![Vec::new(); config_count(&self.cards(&new_v_parents))];
        let mut impossible = BTreeSet::new();
        let mut configs = Vec::new();
        self.for_each_config(&new_v_parents, |assign| configs.push(assign.clone()));
        for mut assign in configs {
            let rx = self.row_of(&a, &assign);
            let r_new = self.row_of(&new_v_parents, &assign);
            let mut dead = self.nodes[x].impossible.contains(&rx);
            let mut terms = Vec::with_capacity(kx);
            for xv in 0..kx {
                assign[x] = xv;
                let rv = self.row_of(&old_v_parents, &assign);
                let px = self.nodes[x].table[rx][xv];
                if self.nodes[v].impossible.contains(&rv) && !self.tape.is_zero(px) {
                    dead = true;
                }
                let c = self.nodes[v].table[rv][0];
                terms.push(self.tape.mul(px, c));
            }
            if dead {
                impossible.insert(r_new);
                table[r_new] = vec![self.tape.zero()];
            } else {
                table[r_new] = vec![self.tape.sum(terms)];
            }
        }
        let nv = &mut self.nodes[v];
        nv.parents = new_v_parents;
        nv.table = table;
        nv.impossible = impossible;
        self.nodes[x].removed = true;
        Ok(())
    }

    /// Deletes a chance or decision node without children.
    pub fn remove_barren(&self, node: &str) -> Result<Self, EngineError> {
        let x = self.id(node)?;
        let mut out = self.clone();
        out.drop_barren(x)?;
        Ok(out)
    }

    pub(crate) fn drop_barren(&mut self, x: usize) -> Result<(), EngineError> {
        if !self.children(x).is_empty() {
            return Err(EngineError::NotBarren(self.nodes[x].name.clone()));
        }
        self.nodes[x].removed = true;
        Ok(())
    }

    /// Fixes a decision to one alternative, slicing every table that depends
    /// on it and removing the decision node.
    pub fn fix_decision(&self, node: &str, alternative: &str) -> Result<Self, EngineError> {
        let d = self.id(node)?;
        let mut out = self.clone();
        out.fix(d, alternative)?;
        Ok(out)
    }

    pub(crate) fn fix(&mut self, d: usize, alternative: &str) -> Result<(), EngineError> {
        self.require_kind(d, NodeKind::Decision)?;
        let alt = self.label_index(d, alternative)?;
        self.set_evidence_parent(d, alt);
        self.nodes[d].removed = true;
        Ok(())
    }

    /// Drops `d` from every child's parent list, keeping the rows at `d = value`.
    fn set_evidence_parent(&mut self, d: usize, value: usize) {
        for c in self.children(d) {
            let old = self.nodes[c].parents.clone();
            let new: Vec<usize> = old.iter().copied().filter(|&p| p != d).collect();
            let mut table = vec![Vec::new(); config_count(&self.cards(&new))];
            let mut impossible = BTreeSet::new();
            let mut configs = Vec::new();
            self.for_each_config(&new, |assign| configs.push(assign.clone()));
            for mut assign in configs {
                assign[d] = value;
                let r_old = self.row_of(&old, &assign);
                let r_new = self.row_of(&new, &assign);
                table[r_new] = self.nodes[c].table[r_old].clone();
                if self.nodes[c].impossible.contains(&r_old) {
                    impossible.insert(r_new);
                }
            }
            let nc = &mut self.nodes[c];
            nc.parents = new;
            nc.table = table;
            nc.impossible = impossible;
        }
    }

    pub(crate) fn label_index(&self, id: usize, label: &str) -> Result<usize, EngineError> {
        let space = self.nodes[id].space.as_ref().ok_or_else(|| EngineError::WrongKind {
            node: self.nodes[id].name.clone(),
            expected: NodeKind::Chance,
        })?;
        space.index_of(label).map_err(|_| EngineError::UnknownOutcome {
            node: self.nodes[id].name.clone(),
            label: label.to_string(),
        })
    }

    // ---- evaluation -------------------------------------------------------

    /// Row of `id`'s table selected by an assignment of its parents.
    pub(crate) fn row_index(&self, id: usize, assign: &[Option<usize>]) -> Result<usize, EngineError> {
        let parents = &self.nodes[id].parents;
        let mut full = vec![0usize; self.nodes.len()];
        for &p in parents {
            full[p] = assign[p].ok_or_else(|| EngineError::Unconditioned {
                node: self.nodes[id].name.clone(),
                parent: self.nodes[p].name.clone(),
            })?;
        }
        Ok(self.row_of(parents, &full))
    }

    pub(crate) fn is_impossible(&self, id: usize, row: usize) -> bool {
        self.nodes[id].impossible.contains(&row)
    }

    fn extremizer(&self) -> Extremizer<'_> {
        Extremizer::new(&self.params, self.exhaustive_limit)
    }

    /// Fuzzy distribution of one table row. `None` marks a row conditioned on
    /// a zero-probability configuration.
    pub(crate) fn fuzzy_row(&self, id: usize, row: usize, counter: &mut OpCounter) -> Option<Vec<FuzzyProbability>> {
        if self.is_impossible(id, row) {
            return None;
        }
        let mut ex = self.extremizer();
        let mut out = Vec::new();
        for &slot in &self.nodes[id].table[row] {
            let prog = self.tape.compile(slot);
            match ex.probability(&prog) {
                Ok(p) => out.push(p),
                Err(_) => {
                    *counter += ex.counter();
                    return None;
                }
            }
        }
        *counter += ex.counter();
        Some(out)
    }

    /// Fuzzy expected value stored in a value-node row.
    pub(crate) fn fuzzy_value_row(&self, row: usize, counter: &mut OpCounter) -> Option<FuzzyValue> {
        let v = self.value_node()?;
        if self.is_impossible(v, row) {
            return None;
        }
        let mut ex = self.extremizer();
        let prog = self.tape.compile(self.nodes[v].table[row][0]);
        let out = ex.value(&prog).ok();
        *counter += ex.counter();
        out
    }

    /// Crisp (mean) values of one table row.
    pub fn mean_row(&self, id: usize, row: usize) -> Vec<f64> {
        let mut ex = self.extremizer();
        self.nodes[id].table[row]
            .iter()
            .map(|&s| ex.mean(&self.tape.compile(s)))
            .collect()
    }

    /// Chained interval arithmetic over the expression of one entry, with
    /// every parameter free inside its own support.
    pub fn interval_entry(&self, id: usize, row: usize, outcome: usize) -> Option<Interval> {
        let space = &self.params;
        let support = |r: ParamRef| space.groups()[r.group].entries[r.outcome].support();
        self.tape.interval(self.nodes[id].table[row][outcome], &support)
    }

    /// Materializes the fuzzy conditional table of a chance node. Rows
    /// conditioned on impossible configurations come back crisp uniform.
    pub fn fuzzy_table(&self, node: &str) -> Result<ConditionalTable, EngineError> {
        self.fuzzy_table_counted(node, &mut OpCounter::default())
    }

    pub fn fuzzy_table_counted(&self, node: &str, counter: &mut OpCounter) -> Result<ConditionalTable, EngineError> {
        let id = self.id(node)?;
        self.require_kind(id, NodeKind::Chance)?;
        let k = self.card(id);
        let rows = (0..self.nodes[id].table.len())
            .map(|r| {
                self.fuzzy_row(id, r, counter)
                    .unwrap_or_else(|| vec![FuzzyProbability::crisp(1.0 / k as f64).expect("uniform"); k])
            })
            .collect();
        let parents = self.nodes[id]
            .parents
            .iter()
            .map(|&p| self.nodes[p].space.clone().expect("parents have spaces"))
            .collect();
        Ok(ConditionalTable::new(
            self.nodes[id].space.clone().expect("chance space"),
            parents,
            rows,
        )?)
    }
}
