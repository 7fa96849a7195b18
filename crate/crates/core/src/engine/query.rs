use std::fmt;
use std::str::FromStr;

use super::EngineError;

/// Posterior query: distribution of `target` given observed outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub target: String,
    pub evidence: Vec<(String, String)>,
}

impl Query {
    pub fn new(target: impl Into<String>) -> Self {
        Query {
            target: target.into(),
            evidence: Vec::new(),
        }
    }

    pub fn given(mut self, node: impl Into<String>, outcome: impl Into<String>) -> Self {
        self.evidence.push((node.into(), outcome.into()));
        self
    }
}

/// A scalar quantity addressed on the command line.
///
/// `P(IO=IO0 | S=S0)` is one posterior entry; `E(D=D_L | S=S0)` is the
/// expected value under a fixed choice. The `P( )` wrapper is optional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expression {
    Probability {
        target: String,
        outcome: String,
        evidence: Vec<(String, String)>,
    },
    Expectation {
        choice: Vec<(String, String)>,
        evidence: Vec<(String, String)>,
    },
}

impl Expression {
    pub fn evidence(&self) -> &[(String, String)] {
        match self {
            Expression::Probability { evidence, .. } | Expression::Expectation { evidence, .. } => evidence,
        }
    }
}

fn assignments(s: &str) -> Result<Vec<(String, String)>, EngineError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|part| {
            let (n, o) = part
                .split_once('=')
                .ok_or_else(|| EngineError::BadQuery(format!("expected NODE=OUTCOME, got `{}`", part.trim())))?;
            let (n, o) = (n.trim(), o.trim());
            if n.is_empty() || o.is_empty() {
                return Err(EngineError::BadQuery(format!("empty name in `{}`", part.trim())));
            }
            Ok((n.to_string(), o.to_string()))
        })
        .collect()
}

impl FromStr for Expression {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (expect, body) = match s.as_bytes().first() {
            Some(b'P') | Some(b'E') if s[1..].trim_start().starts_with('(') => {
                let inner = s[1..].trim_start();
                let inner = inner
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| EngineError::BadQuery(format!("unbalanced parentheses in `{s}`")))?;
                (s.starts_with('E'), inner)
            }
            _ => (false, s),
        };
        let (lhs, rhs) = body.split_once('|').unwrap_or((body, ""));
        let lhs = assignments(lhs)?;
        let evidence = assignments(rhs)?;
        if lhs.is_empty() {
            return Err(EngineError::BadQuery(format!("nothing to evaluate in `{s}`")));
        }
        if expect {
            return Ok(Expression::Expectation { choice: lhs, evidence });
        }
        if lhs.len() != 1 {
            return Err(EngineError::BadQuery(format!("a probability names one outcome: `{s}`")));
        }
        let (target, outcome) = lhs.into_iter().next().expect("one item");
        Ok(Expression::Probability {
            target,
            outcome,
            evidence,
        })
    }
}

fn write_assignments(f: &mut fmt::Formatter<'_>, a: &[(String, String)]) -> fmt::Result {
    for (i, (n, o)) in a.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{n}={o}")?;
    }
    Ok(())
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (head, lhs, evidence): (&str, Vec<(String, String)>, _) = match self {
            Expression::Probability {
                target,
                outcome,
                evidence,
            } => ("P", vec![(target.clone(), outcome.clone())], evidence),
            Expression::Expectation { choice, evidence } => ("E", choice.clone(), evidence),
        };
        write!(f, "{head}(")?;
        write_assignments(f, &lhs)?;
        if !evidence.is_empty() {
            f.write_str(" | ")?;
            write_assignments(f, evidence)?;
        }
        f.write_str(")")
    }
}
