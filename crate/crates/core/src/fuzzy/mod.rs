//! Linear-membership fuzzy numbers.
//!
//! A [`FuzzyProbability`] lives on `[0, 1]`; a [`FuzzyValue`] lives on the real
//! line. Both are stored as a mean (the unique point of membership one) plus
//! *nominal* left and right spreads: the distances from the mean to the point
//! where the membership line reaches zero. For probabilities the nominal line may
//! extend past a domain edge, in which case the membership is clipped there and
//! the edge carries a nonzero boundary membership.

mod triplet;

pub use triplet::{parse_probability, SideSpec};

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Absolute tolerance used for comparisons throughout the crate.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("mean {0} lies outside [0, 1]")]
    MeanOutOfRange(f64),
    #[error("spread {0} must be a finite non-negative number")]
    BadSpread(f64),
    #[error("boundary membership {0} must lie in [0, 1)")]
    BadBoundaryMembership(f64),
    #[error("boundary membership given on the {0} side but the mean sits on that domain edge")]
    BoundaryAtEdge(Side),
    #[error("division by a fuzzy number whose support [{0}, {1}] contains zero")]
    DivisionByZero(f64, f64),
    #[error("alpha level {0} must lie in (0, 1]")]
    BadAlpha(f64),
    #[error("cannot parse fuzzy triplet `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => f.write_str("left"),
            Side::Right => f.write_str("right"),
        }
    }
}

/// Shape classification of a fuzzy probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Crisp,
    /// Zero membership at both 0 and 1.
    Type0,
    /// Nonzero membership at probability 1.
    Type1,
    /// Nonzero membership at probability 0.
    Type2,
    /// Nonzero membership at both edges.
    Type12,
}

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[allow(clippy::should_implement_trait)]
impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan(), "[{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo - EPS <= x && x <= self.hi + EPS
    }

    /// True when `other` lies inside `self` up to `tol`.
    pub fn encloses(&self, other: &Interval, tol: f64) -> bool {
        self.lo - tol <= other.lo && other.hi <= self.hi + tol
    }

    pub fn add(self, o: Interval) -> Interval {
        Interval::new(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn sub(self, o: Interval) -> Interval {
        Interval::new(self.lo - o.hi, self.hi - o.lo)
    }

    pub fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Interval::new(min4(c), max4(c))
    }

    /// Interval quotient; `None` when the divisor straddles or touches zero.
    pub fn div(self, o: Interval) -> Option<Interval> {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return None;
        }
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        Some(Interval::new(min4(c), max4(c)))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn min4(c: [f64; 4]) -> f64 {
    c.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max4(c: [f64; 4]) -> f64 {
    c.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Arithmetic operator for [`FuzzyValue::binary`] and [`FuzzyProbability::binary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    fn crisp(self, a: f64, b: f64) -> f64 {
        match self {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
            ArithOp::Div => a / b,
        }
    }
}

/// Linear-membership fuzzy number on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FuzzyValue {
    mean: f64,
    left: f64,
    right: f64,
}

impl FuzzyValue {
    pub fn new(left: f64, mean: f64, right: f64) -> Result<Self, FuzzyError> {
        check_spread(left)?;
        check_spread(right)?;
        if !mean.is_finite() {
            return Err(FuzzyError::Parse {
                input: mean.to_string(),
                reason: "mean must be finite".into(),
            });
        }
        Ok(FuzzyValue { mean, left, right })
    }

    pub fn crisp(x: f64) -> Self {
        FuzzyValue {
            mean: x,
            left: 0.0,
            right: 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn left_spread(&self) -> f64 {
        self.left
    }

    pub fn right_spread(&self) -> f64 {
        self.right
    }

    pub fn is_crisp(&self) -> bool {
        self.left == 0.0 && self.right == 0.0
    }

    pub fn support(&self) -> Interval {
        Interval::new(self.mean - self.left, self.mean + self.right)
    }

    pub fn membership_at(&self, x: f64) -> f64 {
        line_membership(self.mean, self.left, self.right, x)
    }

    pub fn alpha_cut(&self, alpha: f64) -> Result<Interval, FuzzyError> {
        check_alpha(alpha)?;
        Ok(Interval::new(
            self.mean - self.left * (1.0 - alpha),
            self.mean + self.right * (1.0 - alpha),
        ))
    }

    /// `a * x + b`; a negative scale mirrors the spreads.
    pub fn affine(&self, a: f64, b: f64) -> FuzzyValue {
        let (l, r) = if a >= 0.0 {
            (self.left * a, self.right * a)
        } else {
            (self.right * -a, self.left * -a)
        };
        FuzzyValue {
            mean: a * self.mean + b,
            left: l,
            right: r,
        }
    }

    /// Arithmetic on independent operands.
    ///
    /// The mean is the crisp operation on the means. The zero-membership
    /// endpoints are the extremes of the operation over the operands' supports,
    /// and the result is re-linearized with one line per side.
    pub fn binary(op: ArithOp, a: &FuzzyValue, b: &FuzzyValue) -> Result<FuzzyValue, FuzzyError> {
        let (mean, ends) = combine(op, a.mean, a.support(), b.mean, b.support())?;
        Ok(FuzzyValue {
            mean,
            left: (mean - ends.lo).max(0.0),
            right: (ends.hi - mean).max(0.0),
        })
    }

    pub fn add(&self, o: &FuzzyValue) -> FuzzyValue {
        Self::binary(ArithOp::Add, self, o).expect("addition cannot fail")
    }

    pub fn sub(&self, o: &FuzzyValue) -> FuzzyValue {
        Self::binary(ArithOp::Sub, self, o).expect("subtraction cannot fail")
    }

    pub fn mul(&self, o: &FuzzyValue) -> FuzzyValue {
        Self::binary(ArithOp::Mul, self, o).expect("multiplication cannot fail")
    }

    pub fn div(&self, o: &FuzzyValue) -> Result<FuzzyValue, FuzzyError> {
        Self::binary(ArithOp::Div, self, o)
    }
}

impl fmt::Display for FuzzyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_crisp() {
            return write_num(f, self.mean);
        }
        f.write_str("(")?;
        write_num(f, self.left)?;
        f.write_str(", ")?;
        write_num(f, self.mean)?;
        f.write_str(", ")?;
        write_num(f, self.right)?;
        f.write_str(")")
    }
}

/// Bayesian fuzzy probability with a linear membership function on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzyProbability {
    mean: f64,
    left: f64,
    right: f64,
}

impl FuzzyProbability {
    pub const ZERO: FuzzyProbability = FuzzyProbability {
        mean: 0.0,
        left: 0.0,
        right: 0.0,
    };
    pub const ONE: FuzzyProbability = FuzzyProbability {
        mean: 1.0,
        left: 0.0,
        right: 0.0,
    };

    /// Builds a fuzzy probability from its nominal spreads.
    ///
    /// A side whose mean sits on the domain edge has no extent, so its spread is
    /// normalized to zero.
    pub fn from_nominal(left: f64, mean: f64, right: f64) -> Result<Self, FuzzyError> {
        check_spread(left)?;
        check_spread(right)?;
        let mean = snap_unit(mean)?;
        Ok(FuzzyProbability {
            mean,
            left: if mean == 0.0 { 0.0 } else { left },
            right: if mean == 1.0 { 0.0 } else { right },
        })
    }

    /// Builds a fuzzy probability from triplet sides, each either a spread
    /// magnitude or a boundary membership at the corresponding domain edge.
    pub fn make(left: SideSpec, mean: f64, right: SideSpec) -> Result<Self, FuzzyError> {
        let mean = snap_unit(mean)?;
        let nominal = |spec: SideSpec, side: Side, room: f64| -> Result<f64, FuzzyError> {
            match spec {
                SideSpec::Spread(s) => {
                    check_spread(s)?;
                    Ok(s)
                }
                SideSpec::Boundary(mu) => {
                    if !(0.0..1.0).contains(&mu) {
                        return Err(FuzzyError::BadBoundaryMembership(mu));
                    }
                    if room <= 0.0 {
                        return Err(FuzzyError::BoundaryAtEdge(side));
                    }
                    Ok(room / (1.0 - mu))
                }
            }
        };
        let l = nominal(left, Side::Left, mean)?;
        let r = nominal(right, Side::Right, 1.0 - mean)?;
        Self::from_nominal(l, mean, r)
    }

    pub fn crisp(p: f64) -> Result<Self, FuzzyError> {
        Self::from_nominal(0.0, p, 0.0)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn left_nominal(&self) -> f64 {
        self.left
    }

    pub fn right_nominal(&self) -> f64 {
        self.right
    }

    pub fn is_crisp(&self) -> bool {
        self.left == 0.0 && self.right == 0.0
    }

    /// Membership at probability 0 (zero unless the left line is clipped).
    pub fn boundary_at_zero(&self) -> f64 {
        if self.left > self.mean {
            1.0 - self.mean / self.left
        } else {
            0.0
        }
    }

    /// Membership at probability 1 (zero unless the right line is clipped).
    pub fn boundary_at_one(&self) -> f64 {
        if self.right > 1.0 - self.mean {
            1.0 - (1.0 - self.mean) / self.right
        } else {
            0.0
        }
    }

    pub fn kind(&self) -> Kind {
        if self.is_crisp() {
            return Kind::Crisp;
        }
        let at0 = self.membership_at(0.0) > 0.0;
        let at1 = self.membership_at(1.0) > 0.0;
        match (at0, at1) {
            (false, false) => Kind::Type0,
            (false, true) => Kind::Type1,
            (true, false) => Kind::Type2,
            (true, true) => Kind::Type12,
        }
    }

    /// Clipped support.
    pub fn support(&self) -> Interval {
        Interval::new((self.mean - self.left).max(0.0), (self.mean + self.right).min(1.0))
    }

    /// Unclipped support of the nominal membership lines.
    pub fn nominal_support(&self) -> Interval {
        Interval::new(self.mean - self.left, self.mean + self.right)
    }

    pub fn membership_at(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        line_membership(self.mean, self.left, self.right, x)
    }

    pub fn alpha_cut(&self, alpha: f64) -> Result<Interval, FuzzyError> {
        check_alpha(alpha)?;
        Ok(self.cut_unchecked(alpha))
    }

    /// Alpha-cut that also accepts `alpha = 0`, returning the clipped support.
    pub(crate) fn cut_unchecked(&self, alpha: f64) -> Interval {
        Interval::new(
            (self.mean - self.left * (1.0 - alpha)).max(0.0),
            (self.mean + self.right * (1.0 - alpha)).min(1.0),
        )
    }

    /// `1 - p`: reflects the mean and swaps the nominal spreads.
    pub fn complement(&self) -> FuzzyProbability {
        FuzzyProbability {
            mean: 1.0 - self.mean,
            left: self.right,
            right: self.left,
        }
    }

    pub fn as_value(&self) -> FuzzyValue {
        FuzzyValue {
            mean: self.mean,
            left: self.left,
            right: self.right,
        }
    }

    /// Arithmetic on independent operands, over the nominal supports.
    ///
    /// The result mean must stay inside `[0, 1]`; the result lines are clipped at
    /// query time like any other fuzzy probability.
    pub fn binary(op: ArithOp, a: &FuzzyProbability, b: &FuzzyProbability) -> Result<FuzzyProbability, FuzzyError> {
        let (mean, ends) = combine(op, a.mean, a.nominal_support(), b.mean, b.nominal_support())?;
        FuzzyProbability::from_nominal((mean - ends.lo).max(0.0), mean, (ends.hi - mean).max(0.0))
    }

    pub fn add(&self, o: &FuzzyProbability) -> Result<FuzzyProbability, FuzzyError> {
        Self::binary(ArithOp::Add, self, o)
    }

    pub fn sub(&self, o: &FuzzyProbability) -> Result<FuzzyProbability, FuzzyError> {
        Self::binary(ArithOp::Sub, self, o)
    }

    pub fn mul(&self, o: &FuzzyProbability) -> Result<FuzzyProbability, FuzzyError> {
        Self::binary(ArithOp::Mul, self, o)
    }

    pub fn div(&self, o: &FuzzyProbability) -> Result<FuzzyProbability, FuzzyError> {
        Self::binary(ArithOp::Div, self, o)
    }

    /// True when every parameter agrees with `other` to within `tol`.
    pub fn approx_eq(&self, other: &FuzzyProbability, tol: f64) -> bool {
        (self.mean - other.mean).abs() <= tol
            && (self.left - other.left).abs() <= tol
            && (self.right - other.right).abs() <= tol
    }
}

fn combine(op: ArithOp, am: f64, a: Interval, bm: f64, b: Interval) -> Result<(f64, Interval), FuzzyError> {
    let ends = match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b).ok_or(FuzzyError::DivisionByZero(b.lo, b.hi))?,
    };
    let mean = op.crisp(am, bm);
    // Independent-operand extremes always bracket the crisp result; guard
    // against rounding only.
    Ok((mean, Interval::new(ends.lo.min(mean), ends.hi.max(mean))))
}

fn line_membership(mean: f64, left: f64, right: f64, x: f64) -> f64 {
    if x == mean {
        return 1.0;
    }
    if x < mean {
        if left == 0.0 {
            0.0
        } else {
            (1.0 - (mean - x) / left).max(0.0)
        }
    } else if right == 0.0 {
        0.0
    } else {
        (1.0 - (x - mean) / right).max(0.0)
    }
}

fn check_spread(s: f64) -> Result<(), FuzzyError> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(FuzzyError::BadSpread(s))
    }
}

fn check_alpha(alpha: f64) -> Result<(), FuzzyError> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(FuzzyError::BadAlpha(alpha))
    }
}

/// Accepts means within `EPS` of the unit interval and snaps them inside.
fn snap_unit(p: f64) -> Result<f64, FuzzyError> {
    if !p.is_finite() || !(-EPS..=1.0 + EPS).contains(&p) {
        return Err(FuzzyError::MeanOutOfRange(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

pub(crate) fn write_num(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    match f.precision() {
        Some(p) => {
            let s = format!("{:.*}", p, x);
            let s = if s.contains('.') {
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            } else {
                s
            };
            f.write_str(if s == "-0" { "0" } else { &s })
        }
        None => write!(f, "{}", x),
    }
}
