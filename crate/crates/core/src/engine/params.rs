//! The space of consistent probability perturbations.
//!
//! Each non-crisp row of an input table is a parameter group: a distribution
//! whose entries may move inside their alpha-cuts while still summing to one.
//! At a given alpha the feasible set of one group is the box of entry cuts
//! intersected with the sum-to-one hyperplane, a polytope whose vertices have at
//! most one coordinate strictly inside its bounds.

use crate::fuzzy::{FuzzyProbability, Interval};

const VERTEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamGroup {
    /// Node id in the source diagram.
    pub node: usize,
    /// Row of the node's table.
    pub row: usize,
    pub entries: Vec<FuzzyProbability>,
}

impl ParamGroup {
    pub fn means(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.mean()).collect()
    }

    /// Vertices of the consistent polytope at level `alpha` (0 means supports).
    pub fn vertices(&self, alpha: f64) -> Vec<Vec<f64>> {
        let cuts: Vec<Interval> = self.entries.iter().map(|e| e.cut_unchecked(alpha)).collect();
        let mut out: Vec<Vec<f64>> = Vec::new();
        let k = cuts.len();
        if k == 2 {
            let lo = cuts[0].lo.max(1.0 - cuts[1].hi);
            let hi = cuts[0].hi.min(1.0 - cuts[1].lo);
            if lo <= hi + VERTEX_TOL {
                out.push(vec![lo, 1.0 - lo]);
                if hi - lo > VERTEX_TOL {
                    out.push(vec![hi, 1.0 - hi]);
                }
            }
        } else {
            for free in 0..k {
                for mask in 0u32..(1 << (k - 1)) {
                    let mut v = vec![0.0; k];
                    let mut bit = 0;
                    let mut rest = 1.0;
                    for (i, c) in cuts.iter().enumerate() {
                        if i == free {
                            continue;
                        }
                        v[i] = if mask >> bit & 1 == 1 { c.hi } else { c.lo };
                        rest -= v[i];
                        bit += 1;
                    }
                    let c = cuts[free];
                    if rest < c.lo - VERTEX_TOL || rest > c.hi + VERTEX_TOL {
                        continue;
                    }
                    v[free] = rest.clamp(c.lo, c.hi);
                    if !out
                        .iter()
                        .any(|w| w.iter().zip(&v).all(|(a, b)| (a - b).abs() <= VERTEX_TOL))
                    {
                        out.push(v);
                    }
                }
            }
        }
        if out.is_empty() {
            // Rounding can empty a degenerate polytope; its only point is the mean.
            out.push(self.means());
        }
        out
    }
}

/// All parameter groups of a diagram, in node then row order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSpace {
    groups: Vec<ParamGroup>,
}

impl ParamSpace {
    pub fn push(&mut self, g: ParamGroup) -> usize {
        self.groups.push(g);
        self.groups.len() - 1
    }

    pub fn groups(&self) -> &[ParamGroup] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn mean_point(&self) -> Vec<Vec<f64>> {
        self.groups.iter().map(|g| g.means()).collect()
    }
}
