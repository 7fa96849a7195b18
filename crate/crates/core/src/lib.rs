//! Fuzzy-probability influence diagrams: representation, evaluation by
//! value-preserving transformations, sensitivity of decisions, and a
//! brute-force extension-principle oracle.

pub mod diagram;
pub mod engine;
pub mod format;
pub mod fuzzy;
pub mod oracle;
pub mod plot;
pub mod report;
pub mod sensitivity;
pub mod tables;

pub use diagram::{DiagramError, InfluenceDiagram, NodeKind, NodeSpec, Objective};
pub use engine::{
    decide, decide_with, estimate, infer, infer_with, EngineError, Estimate, Expression, OpCounter, Policy, Posterior,
    Query, SolveOptions,
};
pub use format::{parse_file, parse_str, DiagramFile, FormatError};
pub use fuzzy::{FuzzyError, FuzzyProbability, FuzzyValue, Interval, Kind, Side};
pub use report::SolverReport;
pub use sensitivity::SensitivityReport;
pub use tables::{ConditionalTable, FuzzyDistribution, OutcomeSpace};
