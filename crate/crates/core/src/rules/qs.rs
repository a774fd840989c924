//! Quantified syllogism: bounds on `P(C|A)` from bounds on `P(B|A)`,
//! `P(A|B)`, `P(C|B)` and `P(B|C)`, i.e. eliminating the middle node `B`.
//!
//! Work in units of `|A|`. With `x = P(B|A)`, `r = P(C|B)/P(A|B)` (the size
//! of `B∩C`) and `s = r·(1 − P(B|C))/P(B|C)` (the size of `C∖B`), the
//! largest `A∩C` for fixed values is `min(x, x·r) + min(1 − x, x·s)`, i.e.
//! the minimum of the four terms
//!
//! ```text
//! 1
//! 1 − P(B|A) + P(B|A)·P(C|B)/P(A|B)
//! P(B|A)·P(C|B) / (P(A|B)·P(B|C))
//! P(B|A) + P(B|A)·P(C|B)·(1 − P(B|C)) / (P(A|B)·P(B|C))
//! ```
//!
//! and the smallest is `P(B|A)·max(0, 1 − (1 − P(C|B))/P(A|B))`.
//!
//! Over a box of input intervals the lower bound is attained at the lower
//! endpoints. The upper bound increases with `r` and `s`, so `P(C|B)` is
//! taken high and `P(A|B)`, `P(B|C)` low; it is concave piecewise linear in
//! `x`, so it is maximised over the `P(B|A)` interval at an endpoint or at
//! the kink `x = 1/(1 + s)`.

use crate::error::Result;
use crate::intervals::ProbInterval;
use crate::network::{AtomId, Network, Rule};

/// Bounds on `P(C|A)`.
///
/// Arguments are the intervals for `P(B|A)`, `P(A|B)`, `P(C|B)`, `P(B|C)`.
pub fn qs_bounds(ba: ProbInterval, ab: ProbInterval, cb: ProbInterval, bc: ProbInterval) -> ProbInterval {
    ProbInterval::clamped(qs_lower(ba, ab, cb), qs_upper(ba, ab, cb, bc))
}

fn qs_lower(ba: ProbInterval, ab: ProbInterval, cb: ProbInterval) -> f64 {
    let through_b = if ab.lo() > 0.0 {
        (1.0 - (1.0 - cb.lo()) / ab.lo()).max(0.0)
    } else if cb.lo() >= 1.0 {
        1.0
    } else {
        0.0
    };
    ba.lo() * through_b
}

fn qs_upper(ba: ProbInterval, ab: ProbInterval, cb: ProbInterval, bc: ProbInterval) -> f64 {
    // |B∩C| / |B∩A|; B∩C is empty if either conditional vanishes
    let r = if cb.hi() == 0.0 || bc.hi() == 0.0 {
        0.0
    } else if ab.lo() == 0.0 {
        f64::INFINITY
    } else {
        cb.hi() / ab.lo()
    };
    // |C∖B| / |B∩A|
    let b = bc.lo();
    let s = if b == 0.0 {
        f64::INFINITY
    } else if b >= 1.0 {
        0.0
    } else {
        r * (1.0 - b) / b
    };
    let inside = r.min(1.0);
    let value = |x: f64| {
        let outside = if s.is_infinite() { 1.0 - x } else { (1.0 - x).min(x * s) };
        x * inside + outside
    };
    let mut best = value(ba.lo()).max(value(ba.hi()));
    if s.is_finite() {
        let kink = 1.0 / (1.0 + s);
        if ba.lo() < kink && kink < ba.hi() {
            best = best.max(value(kink));
        }
    }
    best.min(1.0)
}

/// One pass of QS over every ordered triple of distinct atoms, in
/// lexicographic `(C, B, A)` order, tightening `P(C|A)`.
pub fn qs_pass(net: &mut Network, tol: f64, iteration: usize) -> Result<bool> {
    let n = net.len();
    let mut changed = false;
    for c in 0..n {
        for b in 0..n {
            if b == c {
                continue;
            }
            let (cb, bc) = (net.bound(AtomId(c), AtomId(b)), net.bound(AtomId(b), AtomId(c)));
            for a in 0..n {
                if a == b || a == c {
                    continue;
                }
                let (a, b, c) = (AtomId(a), AtomId(b), AtomId(c));
                let candidate = qs_bounds(net.bound(b, a), net.bound(a, b), cb, bc);
                if candidate.is_vacuous() {
                    continue;
                }
                changed |= net.tighten(c, a, candidate, Rule::Qs, &[c, b, a], iteration, tol)?;
            }
        }
    }
    Ok(changed)
}

/// Repeats [`qs_pass`] until a pass changes nothing by more than `tol`.
pub fn qs_sweep(net: &mut Network, tol: f64, iteration: usize) -> Result<bool> {
    const MAX_PASSES: usize = 10_000;
    let mut changed = false;
    for _ in 0..MAX_PASSES {
        if !qs_pass(net, tol, iteration)? {
            break;
        }
        changed = true;
    }
    Ok(changed)
}
