//! Tropical semiring weights.
//!
//! A weight is a cost, the negated natural log of a probability. `plus` is
//! `min` (choice between alternatives) and `times` is `+` (concatenation), so
//! the most probable path is the one with the smallest total cost.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(f64);

impl Weight {
    /// Semiring zero: the cost of an impossible event.
    pub const ZERO: Weight = Weight(f64::INFINITY);
    /// Semiring one: the cost of a certain event.
    pub const ONE: Weight = Weight(0.0);

    /// Wraps a cost without validation. Builders validate on freeze.
    pub const fn new(cost: f64) -> Self {
        Weight(cost)
    }

    pub fn from_prob(p: f64) -> Self {
        Weight(-p.ln())
    }

    pub fn from_log_prob(lp: f64) -> Self {
        Weight(-lp)
    }

    pub const fn cost(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// Non-negative or +inf, and not NaN.
    pub fn is_valid(self) -> bool {
        self.0 >= 0.0
    }

    pub fn plus(self, other: Weight) -> Weight {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    pub fn times(self, other: Weight) -> Weight {
        Weight(self.0 + other.0)
    }

    pub fn total_cmp(&self, other: &Weight) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Default for Weight {
    fn default() -> Self {
        Weight::ONE
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        self.times(rhs)
    }
}

impl AddAssign for Weight {
    fn add_assign(&mut self, rhs: Weight) {
        self.0 += rhs.0;
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({})", self.0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}
