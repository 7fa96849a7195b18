//! Append-only arithmetic tape. Every table entry produced by a transformation
//! is a slot on the tape: a crisp expression in the fuzzy input parameters,
//! which the extremizer later evaluates at perturbed parameter points.

use std::collections::HashMap;

use super::counter::OpCounter;
use crate::fuzzy::Interval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot(u32);

impl Slot {
    fn index(self) -> usize {
        self.0 as usize
    }
}

/// Reference to one outcome of one parameter group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamRef {
    pub group: usize,
    pub outcome: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(f64),
    Param(ParamRef),
    Add(Slot, Slot),
    Mul(Slot, Slot),
    Div(Slot, Slot),
}

#[derive(Debug, Clone)]
pub struct Tape {
    ops: Vec<Op>,
    params: HashMap<ParamRef, Slot>,
    built: OpCounter,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape {
            ops: vec![Op::Const(0.0), Op::Const(1.0)],
            params: HashMap::new(),
            built: OpCounter::default(),
        }
    }

    pub fn zero(&self) -> Slot {
        Slot(0)
    }

    pub fn one(&self) -> Slot {
        Slot(1)
    }

    /// Arithmetic operations appended so far: one crisp evaluation of
    /// everything on the tape.
    pub fn built(&self) -> OpCounter {
        self.built
    }

    fn push(&mut self, op: Op) -> Slot {
        self.ops.push(op);
        Slot(u32::try_from(self.ops.len() - 1).expect("tape overflow"))
    }

    pub fn constant(&mut self, x: f64) -> Slot {
        if x == 0.0 {
            self.zero()
        } else if x == 1.0 {
            self.one()
        } else {
            self.push(Op::Const(x))
        }
    }

    pub fn param(&mut self, r: ParamRef) -> Slot {
        if let Some(&s) = self.params.get(&r) {
            return s;
        }
        let s = self.push(Op::Param(r));
        self.params.insert(r, s);
        s
    }

    pub fn as_const(&self, s: Slot) -> Option<f64> {
        match self.ops[s.index()] {
            Op::Const(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_zero(&self, s: Slot) -> bool {
        self.as_const(s) == Some(0.0)
    }

    pub fn add(&mut self, a: Slot, b: Slot) -> Slot {
        match (self.as_const(a), self.as_const(b)) {
            (Some(x), Some(y)) => self.constant(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => {
                self.built.additions += 1;
                self.push(Op::Add(a, b))
            }
        }
    }

    pub fn mul(&mut self, a: Slot, b: Slot) -> Slot {
        match (self.as_const(a), self.as_const(b)) {
            (Some(x), Some(y)) => self.constant(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => self.zero(),
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            _ => {
                self.built.multiplications += 1;
                self.push(Op::Mul(a, b))
            }
        }
    }

    /// Quotient; callers handle a constant-zero divisor themselves.
    pub fn div(&mut self, a: Slot, b: Slot) -> Slot {
        debug_assert!(!self.is_zero(b), "division by constant zero");
        match (self.as_const(a), self.as_const(b)) {
            (Some(x), Some(y)) => self.constant(x / y),
            (Some(0.0), _) => self.zero(),
            (_, Some(1.0)) => a,
            _ => {
                self.built.divisions += 1;
                self.push(Op::Div(a, b))
            }
        }
    }

    pub fn sum<I: IntoIterator<Item = Slot>>(&mut self, terms: I) -> Slot {
        let mut acc = self.zero();
        for t in terms {
            acc = self.add(acc, t);
        }
        acc
    }

    /// Compiles the sub-expression rooted at `root` into a flat program.
    pub fn compile(&self, root: Slot) -> Program {
        let mut needed = vec![false; root.index() + 1];
        needed[root.index()] = true;
        for i in (0..=root.index()).rev() {
            if !needed[i] {
                continue;
            }
            match self.ops[i] {
                Op::Add(a, b) | Op::Mul(a, b) | Op::Div(a, b) => {
                    needed[a.index()] = true;
                    needed[b.index()] = true;
                }
                Op::Const(_) | Op::Param(_) => {}
            }
        }
        let mut local = vec![usize::MAX; root.index() + 1];
        let mut steps = Vec::new();
        let mut groups = Vec::new();
        let mut per_eval = OpCounter::default();
        for i in 0..=root.index() {
            if !needed[i] {
                continue;
            }
            local[i] = steps.len();
            let l = |s: Slot| local[s.index()];
            let step = match self.ops[i] {
                Op::Const(x) => Step::Const(x),
                Op::Param(r) => {
                    if !groups.contains(&r.group) {
                        groups.push(r.group);
                    }
                    Step::Param(r)
                }
                Op::Add(a, b) => {
                    per_eval.additions += 1;
                    Step::Add(l(a), l(b))
                }
                Op::Mul(a, b) => {
                    per_eval.multiplications += 1;
                    Step::Mul(l(a), l(b))
                }
                Op::Div(a, b) => {
                    per_eval.divisions += 1;
                    Step::Div(l(a), l(b))
                }
            };
            steps.push(step);
        }
        groups.sort_unstable();
        Program {
            steps,
            groups,
            per_eval,
        }
    }

    /// Chained interval arithmetic over the expression, treating every
    /// parameter occurrence independently. `None` when a divisor interval
    /// touches zero.
    pub fn interval(&self, root: Slot, support: &dyn Fn(ParamRef) -> Interval) -> Option<Interval> {
        let mut memo: Vec<Option<Interval>> = vec![None; root.index() + 1];
        for i in 0..=root.index() {
            let pair = |a: Slot, b: Slot| Some((memo[a.index()]?, memo[b.index()]?));
            memo[i] = match self.ops[i] {
                Op::Const(x) => Some(Interval::point(x)),
                Op::Param(r) => Some(support(r)),
                Op::Add(a, b) => pair(a, b).map(|(x, y)| x.add(y)),
                Op::Mul(a, b) => pair(a, b).map(|(x, y)| x.mul(y)),
                Op::Div(a, b) => pair(a, b).and_then(|(x, y)| x.div(y)),
            };
        }
        memo[root.index()]
    }
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Const(f64),
    Param(ParamRef),
    Add(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
}

/// Flattened sub-expression ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Program {
    steps: Vec<Step>,
    groups: Vec<usize>,
    per_eval: OpCounter,
}

impl Program {
    /// Parameter groups the expression depends on, ascending.
    pub fn groups(&self) -> &[usize] {
        &self.groups
    }

    /// Evaluates at `point[group][outcome]`, using `scratch` as workspace.
    pub fn eval(&self, point: &[Vec<f64>], scratch: &mut Vec<f64>, counter: &mut OpCounter) -> f64 {
        scratch.clear();
        for step in &self.steps {
            let v = match *step {
                Step::Const(x) => x,
                Step::Param(r) => point[r.group][r.outcome],
                Step::Add(a, b) => scratch[a] + scratch[b],
                Step::Mul(a, b) => scratch[a] * scratch[b],
                Step::Div(a, b) => scratch[a] / scratch[b],
            };
            scratch.push(v);
        }
        *counter += self.per_eval;
        *scratch.last().expect("program has a root")
    }
}
