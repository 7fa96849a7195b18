use std::ops::{Add, AddAssign};

use serde::Serialize;

/// Counts of crisp arithmetic performed by an evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCounter {
    /// Additions and subtractions.
    pub additions: u64,
    pub multiplications: u64,
    pub divisions: u64,
    pub comparisons: u64,
}

impl OpCounter {
    pub fn total(&self) -> u64 {
        self.additions + self.multiplications + self.divisions + self.comparisons
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, o: OpCounter) {
        self.additions += o.additions;
        self.multiplications += o.multiplications;
        self.divisions += o.divisions;
        self.comparisons += o.comparisons;
    }
}

impl Add for OpCounter {
    type Output = OpCounter;

    fn add(mut self, o: OpCounter) -> OpCounter {
        self += o;
        self
    }
}
