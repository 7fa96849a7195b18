//! Outcome-indexed tables of fuzzy probabilities: marginals, conditionals and
//! joints, plus the normalization checks they must satisfy.
//!
//! Configurations of several spaces are indexed in mixed radix with the first
//! space most significant.

use std::fmt;

use thiserror::Error;

use crate::fuzzy::{FuzzyError, FuzzyProbability, EPS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("outcome space `{0}` needs at least two outcomes")]
    TooFewOutcomes(String),
    #[error("outcome space `{0}` repeats the label `{1}`")]
    DuplicateLabel(String, String),
    #[error("`{space}` has no outcome `{label}`")]
    UnknownOutcome { space: String, label: String },
    #[error("expected {expected} entries, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("space mismatch: expected `{expected}`, found `{found}`")]
    SpaceMismatch { expected: String, found: String },
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

/// Named set of mutually exclusive, exhaustive outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeSpace {
    name: String,
    labels: Vec<String>,
}

impl OutcomeSpace {
    pub fn new<S: Into<String>>(name: S, labels: Vec<String>) -> Result<Self, TableError> {
        let name = name.into();
        if labels.len() < 2 {
            return Err(TableError::TooFewOutcomes(name));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(TableError::DuplicateLabel(name, l.clone()));
            }
        }
        Ok(OutcomeSpace { name, labels })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Result<usize, TableError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| TableError::UnknownOutcome {
                space: self.name.clone(),
                label: label.to_string(),
            })
    }
}

/// Number of joint configurations of spaces with the given cardinalities.
pub fn config_count(cards: &[usize]) -> usize {
    cards.iter().product()
}

/// Mixed-radix index of `values`, first coordinate most significant.
pub fn config_index(cards: &[usize], values: &[usize]) -> usize {
    debug_assert_eq!(cards.len(), values.len());
    cards.iter().zip(values).fold(0, |acc, (&c, &v)| acc * c + v)
}

/// Inverse of [`config_index`].
pub fn config_values(cards: &[usize], mut index: usize) -> Vec<usize> {
    let mut out = vec![0; cards.len()];
    for (slot, &c) in out.iter_mut().zip(cards).rev() {
        *slot = index % c;
        index /= c;
    }
    out
}

/// One kind of normalization problem found by [`validate`](ConditionalTable::validate).
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    /// Means do not sum to one.
    MeanSum(f64),
    /// No consistent choice of probabilities inside the supports sums to one.
    InfeasibleSpreads { lower_sum: f64, upper_sum: f64 },
    /// Binary distribution whose two entries are not complements.
    NotComplementary,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::MeanSum(s) => write!(f, "means sum to {s}, not 1"),
            Problem::InfeasibleSpreads { lower_sum, upper_sum } => write!(
                f,
                "supports cannot sum to 1 (lower ends sum to {lower_sum}, upper ends to {upper_sum})"
            ),
            Problem::NotComplementary => f.write_str("binary entries are not complements"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationIssue {
    pub location: String,
    pub problem: Problem,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.problem)
    }
}

/// Every violated invariant of a table; empty means valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    fn check(&mut self, location: impl Fn() -> String, entries: &[FuzzyProbability], binary: bool) {
        let sum: f64 = entries.iter().map(|p| p.mean()).sum();
        if (sum - 1.0).abs() > EPS {
            self.issues.push(ValidationIssue {
                location: location(),
                problem: Problem::MeanSum(sum),
            });
        }
        let lower_sum: f64 = entries.iter().map(|p| p.support().lo).sum();
        let upper_sum: f64 = entries.iter().map(|p| p.support().hi).sum();
        if lower_sum > 1.0 + EPS || upper_sum < 1.0 - EPS {
            self.issues.push(ValidationIssue {
                location: location(),
                problem: Problem::InfeasibleSpreads { lower_sum, upper_sum },
            });
        }
        if binary && entries.len() == 2 && !entries[1].approx_eq(&entries[0].complement(), 1e-6) {
            self.issues.push(ValidationIssue {
                location: location(),
                problem: Problem::NotComplementary,
            });
        }
    }
}

/// Fuzzy distribution over one outcome space.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyDistribution {
    space: OutcomeSpace,
    probs: Vec<FuzzyProbability>,
}

impl FuzzyDistribution {
    pub fn new(space: OutcomeSpace, probs: Vec<FuzzyProbability>) -> Result<Self, TableError> {
        if probs.len() != space.len() {
            return Err(TableError::Arity {
                expected: space.len(),
                found: probs.len(),
            });
        }
        Ok(FuzzyDistribution { space, probs })
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn probs(&self) -> &[FuzzyProbability] {
        &self.probs
    }

    pub fn get(&self, label: &str) -> Result<&FuzzyProbability, TableError> {
        Ok(&self.probs[self.space.index_of(label)?])
    }

    pub fn means(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.mean()).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        report.check(|| self.space.name().to_string(), &self.probs, true);
        report
    }
}

/// `P(child | parents)` with one distribution per joint parent configuration.
/// A table with no parents is a marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    child: OutcomeSpace,
    parents: Vec<OutcomeSpace>,
    rows: Vec<Vec<FuzzyProbability>>,
}

impl ConditionalTable {
    pub fn new(
        child: OutcomeSpace,
        parents: Vec<OutcomeSpace>,
        rows: Vec<Vec<FuzzyProbability>>,
    ) -> Result<Self, TableError> {
        let cards: Vec<usize> = parents.iter().map(|p| p.len()).collect();
        let expected = config_count(&cards);
        if rows.len() != expected {
            return Err(TableError::Arity {
                expected,
                found: rows.len(),
            });
        }
        for row in &rows {
            if row.len() != child.len() {
                return Err(TableError::Arity {
                    expected: child.len(),
                    found: row.len(),
                });
            }
        }
        Ok(ConditionalTable { child, parents, rows })
    }

    pub fn marginal(dist: FuzzyDistribution) -> Self {
        ConditionalTable {
            child: dist.space,
            parents: Vec::new(),
            rows: vec![dist.probs],
        }
    }

    pub fn child(&self) -> &OutcomeSpace {
        &self.child
    }

    pub fn parents(&self) -> &[OutcomeSpace] {
        &self.parents
    }

    pub fn rows(&self) -> &[Vec<FuzzyProbability>] {
        &self.rows
    }

    pub fn parent_cards(&self) -> Vec<usize> {
        self.parents.iter().map(|p| p.len()).collect()
    }

    pub fn row(&self, index: usize) -> FuzzyDistribution {
        FuzzyDistribution {
            space: self.child.clone(),
            probs: self.rows[index].clone(),
        }
    }

    /// Human-readable label of a row, e.g. `L=L1, IO=IO0`.
    pub fn row_label(&self, index: usize) -> String {
        let values = config_values(&self.parent_cards(), index);
        self.parents
            .iter()
            .zip(values)
            .map(|(p, v)| format!("{}={}", p.name(), p.labels()[v]))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// The distribution of the child at the given parent outcomes, listed in
    /// parent order.
    pub fn condition_slice(&self, parent_labels: &[&str]) -> Result<FuzzyDistribution, TableError> {
        if parent_labels.len() != self.parents.len() {
            return Err(TableError::Arity {
                expected: self.parents.len(),
                found: parent_labels.len(),
            });
        }
        let values = self
            .parents
            .iter()
            .zip(parent_labels)
            .map(|(p, l)| p.index_of(l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.row(config_index(&self.parent_cards(), &values)))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (i, row) in self.rows.iter().enumerate() {
            report.check(
                || {
                    if self.parents.is_empty() {
                        self.child.name().to_string()
                    } else {
                        format!("{} | {}", self.child.name(), self.row_label(i))
                    }
                },
                row,
                true,
            );
        }
        report
    }

    /// Joint table `FP(child, parent) = FP(child | parent) ⊗ FP(parent)` for a
    /// single-parent conditional. Cells are indexed `[child, parent]`.
    pub fn product(&self, marginal: &FuzzyDistribution) -> Result<JointTable, TableError> {
        let parent = match self.parents.as_slice() {
            [p] => p,
            _ => {
                return Err(TableError::Arity {
                    expected: 1,
                    found: self.parents.len(),
                })
            }
        };
        if parent != marginal.space() {
            return Err(TableError::SpaceMismatch {
                expected: parent.name().to_string(),
                found: marginal.space().name().to_string(),
            });
        }
        let mut cells = Vec::with_capacity(self.child.len() * parent.len());
        for i in 0..self.child.len() {
            for (j, u) in marginal.probs().iter().enumerate() {
                cells.push(self.rows[j][i].mul(u)?);
            }
        }
        Ok(JointTable {
            spaces: vec![self.child.clone(), parent.clone()],
            cells,
        })
    }
}

/// Joint fuzzy distribution over several spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    spaces: Vec<OutcomeSpace>,
    cells: Vec<FuzzyProbability>,
}

impl JointTable {
    pub fn new(spaces: Vec<OutcomeSpace>, cells: Vec<FuzzyProbability>) -> Result<Self, TableError> {
        let expected = config_count(&spaces.iter().map(|s| s.len()).collect::<Vec<_>>());
        if cells.len() != expected {
            return Err(TableError::Arity {
                expected,
                found: cells.len(),
            });
        }
        Ok(JointTable { spaces, cells })
    }

    pub fn spaces(&self) -> &[OutcomeSpace] {
        &self.spaces
    }

    pub fn cells(&self) -> &[FuzzyProbability] {
        &self.cells
    }

    pub fn cell(&self, labels: &[&str]) -> Result<&FuzzyProbability, TableError> {
        let values = self
            .spaces
            .iter()
            .zip(labels)
            .map(|(s, l)| s.index_of(l))
            .collect::<Result<Vec<_>, _>>()?;
        let cards: Vec<usize> = self.spaces.iter().map(|s| s.len()).collect();
        Ok(&self.cells[config_index(&cards, &values)])
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let name = self.spaces.iter().map(|s| s.name()).collect::<Vec<_>>().join(",");
        report.check(|| format!("joint({name})"), &self.cells, false);
        report
    }
}
