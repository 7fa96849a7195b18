//! Constrained extremization of tape expressions over the consistent
//! perturbation box.
//!
//! Every quantity the engine produces (a posterior entry, a marginal, an
//! expected cost) is a ratio of two functions that are linear in each
//! parameter group's distribution when the other groups are held fixed. Such a
//! ratio is monotone along every line inside one group's polytope, so for fixed
//! other groups its extremes sit on that group's vertices, and the global
//! extremes sit on a product of vertices. Small products are enumerated
//! exhaustively; large ones fall back to block-coordinate search over vertices.

use super::counter::OpCounter;
use super::params::ParamSpace;
use super::tape::Program;
use crate::fuzzy::{FuzzyProbability, FuzzyValue};

/// Outputs closer than this to a domain edge count as touching it.
const EDGE: f64 = 1e-12;
const BISECTION_STEPS: usize = 40;
const MAX_SWEEPS: usize = 64;

/// Default bound on exhaustively enumerated vertex combinations.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 4096;

pub(crate) struct Extremizer<'a> {
    space: &'a ParamSpace,
    limit: usize,
    counter: OpCounter,
    scratch: Vec<f64>,
}

/// The mean evaluated to a non-finite number (a zero-probability condition).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Undefined;

impl<'a> Extremizer<'a> {
    pub fn new(space: &'a ParamSpace, limit: usize) -> Self {
        Extremizer {
            space,
            limit: limit.max(1),
            counter: OpCounter::default(),
            scratch: Vec::new(),
        }
    }

    pub fn counter(&self) -> OpCounter {
        self.counter
    }

    pub fn mean(&mut self, prog: &Program) -> f64 {
        let point = self.space.mean_point();
        prog.eval(&point, &mut self.scratch, &mut self.counter)
    }

    /// Extremes of the expression over the consistent polytope at `alpha`.
    pub fn range(&mut self, prog: &Program, alpha: f64) -> Option<(f64, f64)> {
        let groups = prog.groups();
        let vertices: Vec<Vec<Vec<f64>>> = groups.iter().map(|&g| self.space.groups()[g].vertices(alpha)).collect();
        let mut point = self.space.mean_point();
        let combos = vertices.iter().try_fold(1usize, |acc, v| acc.checked_mul(v.len()));
        match combos {
            Some(n) if n <= self.limit => self.exhaustive(prog, groups, &vertices, &mut point),
            _ => {
                let lo = self.coordinate(prog, groups, &vertices, &point, false)?;
                let hi = self.coordinate(prog, groups, &vertices, &point, true)?;
                Some((lo, hi))
            }
        }
    }

    fn exhaustive(
        &mut self,
        prog: &Program,
        groups: &[usize],
        vertices: &[Vec<Vec<f64>>],
        point: &mut [Vec<f64>],
    ) -> Option<(f64, f64)> {
        let mut choice = vec![0usize; groups.len()];
        let mut best: Option<(f64, f64)> = None;
        loop {
            for (k, &g) in groups.iter().enumerate() {
                point[g].clone_from(&vertices[k][choice[k]]);
            }
            let v = prog.eval(point, &mut self.scratch, &mut self.counter);
            if v.is_finite() {
                self.counter.comparisons += 2;
                best = Some(match best {
                    None => (v, v),
                    Some((lo, hi)) => (lo.min(v), hi.max(v)),
                });
            }
            // odometer
            let mut k = 0;
            loop {
                if k == choice.len() {
                    return best;
                }
                choice[k] += 1;
                if choice[k] < vertices[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    /// Block-coordinate search: move one group at a time to its best vertex,
    /// from several deterministic starts.
    fn coordinate(
        &mut self,
        prog: &Program,
        groups: &[usize],
        vertices: &[Vec<Vec<f64>>],
        mean_point: &[Vec<f64>],
        maximize: bool,
    ) -> Option<f64> {
        let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
        let mut overall: Option<f64> = None;
        for start in 0..3 {
            let mut point = mean_point.to_vec();
            if start > 0 {
                for (k, &g) in groups.iter().enumerate() {
                    let v = &vertices[k];
                    point[g].clone_from(if start == 1 { &v[0] } else { &v[v.len() - 1] });
                }
            }
            let mut current = prog.eval(&point, &mut self.scratch, &mut self.counter);
            for _ in 0..MAX_SWEEPS {
                let mut moved = false;
                for (k, &g) in groups.iter().enumerate() {
                    let keep = point[g].clone();
                    let mut best_v: Option<(f64, usize)> = None;
                    for (vi, vert) in vertices[k].iter().enumerate() {
                        point[g].clone_from(vert);
                        let v = prog.eval(&point, &mut self.scratch, &mut self.counter);
                        self.counter.comparisons += 1;
                        if v.is_finite() && best_v.is_none_or(|(b, _)| better(v, b)) {
                            best_v = Some((v, vi));
                        }
                    }
                    match best_v {
                        Some((v, vi))
                            if !current.is_finite() || better(v, current + if maximize { 1e-15 } else { -1e-15 }) =>
                        {
                            point[g].clone_from(&vertices[k][vi]);
                            current = v;
                            moved = true;
                        }
                        _ => point[g] = keep,
                    }
                }
                if !moved {
                    break;
                }
            }
            if current.is_finite() && overall.is_none_or(|o| better(current, o)) {
                overall = Some(current);
            }
        }
        overall
    }

    /// Fuzzy probability of the expression: exact mean, constrained support,
    /// and, where the support reaches a domain edge, the boundary membership
    /// at which the alpha-cuts stop touching that edge.
    pub fn probability(&mut self, prog: &Program) -> Result<FuzzyProbability, Undefined> {
        let raw = self.mean(prog);
        if !raw.is_finite() {
            return Err(Undefined);
        }
        let mean = raw.clamp(0.0, 1.0);
        let (lo, hi) = self.range(prog, 0.0).unwrap_or((mean, mean));
        let lo = lo.max(0.0).min(mean);
        let hi = hi.min(1.0).max(mean);
        let left = if lo <= EDGE && mean > EDGE {
            let mu = self.boundary(prog, |(l, _)| l <= EDGE);
            mean / (1.0 - mu)
        } else {
            mean - lo
        };
        let right = if hi >= 1.0 - EDGE && mean < 1.0 - EDGE {
            let mu = self.boundary(prog, |(_, h)| h >= 1.0 - EDGE);
            (1.0 - mean) / (1.0 - mu)
        } else {
            hi - mean
        };
        Ok(FuzzyProbability::from_nominal(left.max(0.0), mean, right.max(0.0))
            .expect("clamped mean and non-negative spreads"))
    }

    /// Largest alpha whose cut still touches the edge described by `touches`.
    fn boundary(&mut self, prog: &Program, touches: impl Fn((f64, f64)) -> bool) -> f64 {
        let (mut a, mut b) = (0.0, 1.0);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (a + b);
            self.counter.comparisons += 1;
            match self.range(prog, mid) {
                Some(r) if touches(r) => a = mid,
                _ => b = mid,
            }
        }
        a
    }

    /// Fuzzy value of the expression: exact mean and constrained support.
    pub fn value(&mut self, prog: &Program) -> Result<FuzzyValue, Undefined> {
        let mean = self.mean(prog);
        if !mean.is_finite() {
            return Err(Undefined);
        }
        let (lo, hi) = self.range(prog, 0.0).unwrap_or((mean, mean));
        Ok(FuzzyValue::new((mean - lo).max(0.0), mean, (hi - mean).max(0.0)).expect("finite non-negative spreads"))
    }
}
