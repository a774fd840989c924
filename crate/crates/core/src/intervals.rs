//! Probability intervals and their sound combination.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed when comparing endpoints. Lows exceeding highs by no more
/// than this collapse to a point instead of signaling inconsistency.
pub const EPS_CONTAIN: f64 = 1e-9;

/// A closed subinterval `[lo, hi]` of `[0, 1]` bounding one conditional
/// probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbInterval {
    lo: f64,
    hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval endpoint {0} is not a finite number in [0, 1]")]
    OutOfRange(f64),
    #[error("lower bound {lo} exceeds upper bound {hi}")]
    Inverted { lo: f64, hi: f64 },
}

/// Two intervals that were supposed to bound the same quantity but do not
/// overlap.
#[derive(Clone, Copy, Debug, PartialEq, Error)]
#[error("empty intersection of {left} and {right}")]
pub struct EmptyIntersection {
    pub left: ProbInterval,
    pub right: ProbInterval,
}

impl ProbInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        for v in [lo, hi] {
            if !(0.0..=1.0).contains(&v) {
                return Err(IntervalError::OutOfRange(v));
            }
        }
        if lo > hi {
            return Err(IntervalError::Inverted { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// Builds an interval from values computed by a rule, clamping them into
    /// `[0, 1]`. NaN endpoints are treated as "no information".
    pub(crate) fn clamped(lo: f64, hi: f64) -> Self {
        let lo = if lo.is_nan() { 0.0 } else { lo.clamp(0.0, 1.0) };
        let hi = if hi.is_nan() { 1.0 } else { hi.clamp(0.0, 1.0) };
        if lo > hi {
            // callers only pass crossed bounds when fed inconsistent data;
            // intersect() is where that gets reported
            let mid = 0.5 * (lo + hi);
            return Self { lo: mid, hi: mid };
        }
        Self { lo, hi }
    }

    pub const fn vacuous() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub const fn certain() -> Self {
        Self { lo: 1.0, hi: 1.0 }
    }

    pub const fn impossible() -> Self {
        Self { lo: 0.0, hi: 0.0 }
    }

    pub fn point(p: f64) -> Result<Self, IntervalError> {
        Self::new(p, p)
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_vacuous(&self) -> bool {
        self.lo == 0.0 && self.hi == 1.0
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// `[max(lo), min(hi)]`. Crossings within [`EPS_CONTAIN`] collapse to
    /// the midpoint of the crossed endpoints.
    pub fn intersect(&self, other: &Self) -> Result<Self, EmptyIntersection> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Ok(Self { lo, hi })
        } else if lo - hi <= EPS_CONTAIN {
            let mid = 0.5 * (lo + hi);
            Ok(Self { lo: mid, hi: mid })
        } else {
            Err(EmptyIntersection {
                left: *self,
                right: *other,
            })
        }
    }

    /// True iff `inner` lies inside `self` up to [`EPS_CONTAIN`].
    pub fn contains(&self, inner: &Self) -> bool {
        self.contains_within(inner, EPS_CONTAIN)
    }

    pub fn contains_within(&self, inner: &Self, slack: f64) -> bool {
        self.lo <= inner.lo + slack && inner.hi <= self.hi + slack
    }

    pub fn contains_value(&self, p: f64) -> bool {
        self.lo - EPS_CONTAIN <= p && p <= self.hi + EPS_CONTAIN
    }

    /// Largest endpoint displacement between two intervals.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.lo - other.lo).abs().max((self.hi - other.hi).abs())
    }
}

impl Default for ProbInterval {
    fn default() -> Self {
        Self::vacuous()
    }
}

impl fmt::Display for ProbInterval {
    /// `[l.llllll;h.hhhhhh]`; std float formatting rounds ties to even.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6};{:.6}]", self.lo, self.hi)
    }
}
