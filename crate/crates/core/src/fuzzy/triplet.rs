//! Textual triplet form: `(l, m, r)` where each side is a spread magnitude or a
//! bracketed boundary membership such as `[.66]`; crisp values are a bare number.

use std::fmt;
use std::str::FromStr;

use super::{write_num, FuzzyError, FuzzyProbability};

/// One side of a triplet as written.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SideSpec {
    /// Nominal spread magnitude.
    Spread(f64),
    /// Membership at the domain edge on this side.
    Boundary(f64),
}

impl fmt::Display for FuzzyProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_crisp() {
            return write_num(f, self.mean());
        }
        f.write_str("(")?;
        if self.left_nominal() > self.mean() {
            f.write_str("[")?;
            write_num(f, self.boundary_at_zero())?;
            f.write_str("]")?;
        } else {
            write_num(f, self.left_nominal())?;
        }
        f.write_str(", ")?;
        write_num(f, self.mean())?;
        f.write_str(", ")?;
        if self.right_nominal() > 1.0 - self.mean() {
            f.write_str("[")?;
            write_num(f, self.boundary_at_one())?;
            f.write_str("]")?;
        } else {
            write_num(f, self.right_nominal())?;
        }
        f.write_str(")")
    }
}

impl FromStr for FuzzyProbability {
    type Err = FuzzyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_probability(s)
    }
}

/// Parses `FUZZY := '(' SIDE ',' NUMBER ',' SIDE ')' | NUMBER`,
/// `SIDE := NUMBER | '[' NUMBER ']'`, ignoring whitespace.
pub fn parse_probability(input: &str) -> Result<FuzzyProbability, FuzzyError> {
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let err = |reason: &str| FuzzyError::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    if compact.is_empty() {
        return Err(err("empty input"));
    }
    if !compact.starts_with('(') {
        let p = number(&compact).ok_or_else(|| err("expected a number or a triplet"))?;
        return FuzzyProbability::crisp(p);
    }
    let inner = compact
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| err("unbalanced parentheses"))?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 3 {
        return Err(err("a triplet has exactly three fields"));
    }
    let side = |s: &str| -> Result<SideSpec, FuzzyError> {
        if let Some(b) = s.strip_prefix('[') {
            let b = b.strip_suffix(']').ok_or_else(|| err("unclosed `[`"))?;
            number(b)
                .map(SideSpec::Boundary)
                .ok_or_else(|| err("bad boundary membership"))
        } else {
            number(s).map(SideSpec::Spread).ok_or_else(|| err("bad spread"))
        }
    };
    let left = side(parts[0])?;
    let mean = number(parts[1]).ok_or_else(|| err("bad mean"))?;
    let right = side(parts[2])?;
    FuzzyProbability::make(left, mean, right)
}

/// Unsigned decimal with optional leading dot and optional exponent.
fn number(s: &str) -> Option<f64> {
    let first = s.chars().next()?;
    if !(first.is_ascii_digit() || first == '.') {
        return None;
    }
    if !s
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '-' | '+'))
    {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}
