//! Brute-force constrained extension principle.
//!
//! Every non-crisp row of every chance table is swept on a lattice of
//! distributions that stay inside the per-entry supports and sum to one. Each
//! joint configuration is evaluated crisply by joint enumeration and its
//! min-membership is deposited into an output histogram that keeps the
//! per-bin supremum.

use serde::Serialize;
use thiserror::Error;

use crate::diagram::{InfluenceDiagram, NodeBody};
use crate::engine::{CrispModel, EngineError, Estimate, Expression};
use crate::fuzzy::{FuzzyProbability, Interval};

pub const DEFAULT_GRID: usize = 101;
pub const DEFAULT_BINS: usize = 256;

/// Slack allowed when the dependent coordinate lands just outside its support.
const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid size must be odd and at least 3, got {0}")]
    BadGrid(usize),
    #[error("bin count must be positive")]
    NoBins,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("no configuration could be evaluated")]
    Empty,
}

/// One non-crisp table row and its lattice of consistent distributions.
#[derive(Debug, Clone)]
struct Sweep {
    node: usize,
    row: usize,
    points: Vec<(Vec<f64>, f64)>,
}

/// A consistent perturbation of every fuzzy row, with its membership.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistentConfig {
    /// `(node, row, distribution)` for each perturbed row.
    pub rows: Vec<(usize, usize, Vec<f64>)>,
    pub membership: f64,
}

fn axis(p: &FuzzyProbability, n: usize) -> Vec<f64> {
    let s = p.support();
    let m = p.mean();
    let half = (n - 1) / 2;
    let mut out = Vec::with_capacity(n);
    for i in 0..half {
        out.push(s.lo + (m - s.lo) * i as f64 / half as f64);
    }
    out.push(m);
    for i in 1..=half {
        out.push(m + (s.hi - m) * i as f64 / half as f64);
    }
    out
}

fn sweep_row(entries: &[FuzzyProbability], n: usize) -> Vec<(Vec<f64>, f64)> {
    let k = entries.len();
    let axes: Vec<Vec<f64>> = entries[..k - 1].iter().map(|p| axis(p, n)).collect();
    let last = entries[k - 1];
    let last_support = last.support();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k - 1];
    loop {
        let mut v: Vec<f64> = idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect();
        let rest = 1.0 - v.iter().sum::<f64>();
        if rest >= last_support.lo - SLACK && rest <= last_support.hi + SLACK {
            let rest = if (rest - last.mean()).abs() <= SLACK {
                last.mean()
            } else {
                rest.clamp(last_support.lo, last_support.hi)
            };
            v.push(rest);
            let mu = v
                .iter()
                .zip(entries)
                .map(|(&x, p)| p.membership_at(x))
                .fold(1.0, f64::min);
            out.push((v, mu));
        }
        let mut j = 0;
        loop {
            if j == idx.len() {
                return out;
            }
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Lattice of consistent configurations for a diagram.
#[derive(Debug, Clone)]
pub struct ConfigSpace {
    sweeps: Vec<Sweep>,
}

impl ConfigSpace {
    pub fn new(d: &InfluenceDiagram, grid_n: usize) -> Result<Self, OracleError> {
        if grid_n < 3 || grid_n.is_multiple_of(2) {
            return Err(OracleError::BadGrid(grid_n));
        }
        let mut sweeps = Vec::new();
        for (id, n) in d.nodes().iter().enumerate() {
            if let NodeBody::Chance(t) = n.body() {
                for (r, row) in t.rows().iter().enumerate() {
                    if row.iter().all(|p| p.is_crisp()) {
                        continue;
                    }
                    let points = sweep_row(row, grid_n);
                    sweeps.push(Sweep {
                        node: id,
                        row: r,
                        points,
                    });
                }
            }
        }
        Ok(ConfigSpace { sweeps })
    }

    /// Number of configurations.
    pub fn len(&self) -> usize {
        self.sweeps.iter().map(|s| s.points.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Visits every configuration in a fixed order, first row slowest.
    pub fn for_each(&self, mut f: impl FnMut(&[(usize, usize, &[f64])], f64)) {
        if self.sweeps.iter().any(|s| s.points.is_empty()) {
            return;
        }
        let mut idx = vec![0usize; self.sweeps.len()];
        let mut rows: Vec<(usize, usize, &[f64])> = Vec::with_capacity(self.sweeps.len());
        loop {
            rows.clear();
            let mut mu: f64 = 1.0;
            for (s, &i) in self.sweeps.iter().zip(&idx) {
                let (v, m) = &s.points[i];
                rows.push((s.node, s.row, v.as_slice()));
                mu = mu.min(*m);
            }
            f(&rows, mu);
            let mut j = idx.len();
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < self.sweeps[j].points.len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    pub fn configs(&self) -> Vec<ConsistentConfig> {
        let mut out = Vec::with_capacity(self.len());
        self.for_each(|rows, mu| {
            out.push(ConsistentConfig {
                rows: rows.iter().map(|&(n, r, v)| (n, r, v.to_vec())).collect(),
                membership: mu,
            })
        });
        out
    }
}

pub fn enumerate_configs(d: &InfluenceDiagram, grid_n: usize) -> Result<Vec<ConsistentConfig>, OracleError> {
    Ok(ConfigSpace::new(d, grid_n)?.configs())
}

/// Evaluates an expression crisply on a model.
pub(crate) struct Functional {
    kind: FunctionalKind,
}

enum FunctionalKind {
    Posterior {
        target: usize,
        outcome: usize,
        evidence: Vec<(usize, usize)>,
    },
    Expected {
        evidence: Vec<(usize, usize)>,
    },
}

fn resolve(d: &InfluenceDiagram, pairs: &[(String, String)]) -> Result<Vec<(usize, usize)>, EngineError> {
    pairs
        .iter()
        .map(|(n, o)| {
            let id = d.node_id(n).map_err(|_| EngineError::UnknownNode(n.clone()))?;
            let space = d.nodes()[id]
                .space()
                .ok_or_else(|| EngineError::UnknownNode(n.clone()))?;
            let v = space.index_of(o).map_err(|_| EngineError::UnknownOutcome {
                node: n.clone(),
                label: o.clone(),
            })?;
            Ok((id, v))
        })
        .collect()
}

impl Functional {
    pub fn new(d: &InfluenceDiagram, expr: &Expression) -> Result<Self, EngineError> {
        let kind = match expr {
            Expression::Probability {
                target,
                outcome,
                evidence,
            } => {
                let (t, o) = resolve(d, &[(target.clone(), outcome.clone())])?[0];
                FunctionalKind::Posterior {
                    target: t,
                    outcome: o,
                    evidence: resolve(d, evidence)?,
                }
            }
            Expression::Expectation { choice, evidence } => {
                let mut all = resolve(d, evidence)?;
                all.extend(resolve(d, choice)?);
                FunctionalKind::Expected { evidence: all }
            }
        };
        Ok(Functional { kind })
    }

    pub fn is_probability(&self) -> bool {
        matches!(self.kind, FunctionalKind::Posterior { .. })
    }

    pub fn eval(&self, d: &InfluenceDiagram, m: &CrispModel) -> Result<f64, EngineError> {
        match &self.kind {
            FunctionalKind::Posterior {
                target,
                outcome,
                evidence,
            } => Ok(m.posterior(d, *target, evidence)?[*outcome]),
            FunctionalKind::Expected { evidence } => m.expected_value(d, evidence),
        }
    }
}

/// Calls `f(output, membership)` for every configuration that evaluates.
pub(crate) fn sample(
    d: &InfluenceDiagram,
    expr: &Expression,
    grid_n: usize,
    mut f: impl FnMut(f64, f64),
) -> Result<bool, OracleError> {
    let space = ConfigSpace::new(d, grid_n)?;
    let functional = Functional::new(d, expr)?;
    let mut model = CrispModel::from_diagram(d);
    let mut first_err = None;
    let mut any = false;
    space.for_each(|rows, mu| {
        for &(n, r, v) in rows {
            model.set_row(n, r, v);
        }
        match functional.eval(d, &model) {
            Ok(x) if x.is_finite() => {
                any = true;
                f(x, mu);
            }
            Ok(_) => {}
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    });
    if !any {
        return Err(first_err.map_or(OracleError::Empty, OracleError::Engine));
    }
    Ok(functional.is_probability())
}

/// `(f1 − f2, membership)` for every configuration where both evaluate.
pub(crate) fn sample_pair(
    d: &InfluenceDiagram,
    e1: &Expression,
    e2: &Expression,
    grid_n: usize,
) -> Result<Vec<(f64, f64)>, OracleError> {
    let space = ConfigSpace::new(d, grid_n)?;
    let f1 = Functional::new(d, e1)?;
    let f2 = Functional::new(d, e2)?;
    let mut model = CrispModel::from_diagram(d);
    let mut out = Vec::new();
    let mut first_err = None;
    space.for_each(|rows, mu| {
        for &(n, r, v) in rows {
            model.set_row(n, r, v);
        }
        match (f1.eval(d, &model), f2.eval(d, &model)) {
            (Ok(a), Ok(b)) if (a - b).is_finite() => out.push((a - b, mu)),
            (Err(e), _) | (_, Err(e)) => {
                first_err.get_or_insert(e);
            }
            _ => {}
        }
    });
    if out.is_empty() {
        return Err(first_err.map_or(OracleError::Empty, OracleError::Engine));
    }
    Ok(out)
}

/// Sup-min membership histogram of an output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipCurve {
    /// Smallest and largest output over all configurations.
    pub lo: f64,
    pub hi: f64,
    /// Per-bin supremum of membership; `None` for bins no configuration hit.
    pub bins: Vec<Option<f64>>,
    /// The output is a probability (so clip-boundary bands apply).
    pub probability: bool,
    pub configs: usize,
}

impl MembershipCurve {
    pub fn support(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins.len() as f64
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        if x < self.lo || x > self.hi {
            return None;
        }
        let w = self.bin_width();
        if w == 0.0 {
            return Some(0);
        }
        Some((((x - self.lo) / w) as usize).min(self.bins.len() - 1))
    }

    pub fn bin_range(&self, i: usize) -> Interval {
        let w = self.bin_width();
        Interval::new(self.lo + w * i as f64, self.lo + w * (i + 1) as f64)
    }

    /// Sup-membership of the bin holding `x` (0 outside the support or in an
    /// empty bin).
    pub fn membership_at(&self, x: f64) -> f64 {
        self.bin_of(x).and_then(|i| self.bins[i]).unwrap_or(0.0)
    }

    pub fn peak(&self) -> f64 {
        self.bins.iter().flatten().copied().fold(0.0, f64::max)
    }
}

pub fn ep_curve(
    d: &InfluenceDiagram,
    expr: &Expression,
    grid_n: usize,
    bins: usize,
) -> Result<MembershipCurve, OracleError> {
    if bins == 0 {
        return Err(OracleError::NoBins);
    }
    let mut samples = Vec::new();
    let probability = sample(d, expr, grid_n, |x, mu| samples.push((x, mu)))?;
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let n_bins = if hi > lo { bins } else { 1 };
    let mut curve = MembershipCurve {
        lo,
        hi,
        bins: vec![None; n_bins],
        probability,
        configs: samples.len(),
    };
    for (x, mu) in samples {
        let i = curve.bin_of(x).expect("inside range");
        let slot = &mut curve.bins[i];
        *slot = Some(slot.map_or(mu, |m: f64| m.max(mu)));
    }
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub support: f64,
    pub membership: f64,
    /// Bins within this distance of 0 or 1 are skipped for probabilities.
    pub band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            support: 0.02,
            membership: 0.15,
            band: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    pub engine_support: (f64, f64),
    pub oracle_support: (f64, f64),
    pub support_deviation: f64,
    pub pointwise_deviation: f64,
    /// Where the pointwise deviation peaks.
    pub worst_x: f64,
    pub bins_compared: usize,
    pub support_ok: bool,
    pub membership_ok: bool,
}

impl Agreement {
    pub fn passed(&self) -> bool {
        self.support_ok && self.membership_ok
    }
}

pub fn compare(engine: &Estimate, curve: &MembershipCurve, tol: &Tolerances) -> Agreement {
    let es = engine.support();
    let support_deviation = (es.lo - curve.lo).abs().max((es.hi - curve.hi).abs());
    let mut worst = 0.0;
    let mut worst_x = engine.mean();
    let mut compared = 0;
    for (i, b) in curve.bins.iter().enumerate() {
        let Some(sup) = *b else { continue };
        let range = curve.bin_range(i);
        if curve.probability && (range.lo < tol.band || range.hi > 1.0 - tol.band) {
            continue;
        }
        compared += 1;
        let dev = (engine.max_on(range) - sup).abs();
        if dev > worst {
            worst = dev;
            worst_x = 0.5 * (range.lo + range.hi);
        }
    }
    Agreement {
        engine_support: (es.lo, es.hi),
        oracle_support: (curve.lo, curve.hi),
        support_deviation,
        pointwise_deviation: worst,
        worst_x,
        bins_compared: compared,
        support_ok: support_deviation <= tol.support,
        membership_ok: worst <= tol.membership,
    }
}
