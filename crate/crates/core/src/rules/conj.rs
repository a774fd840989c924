//! Closed-form bounds for two-atom conjunctions and disjunctions.
//!
//! Each bound holds for every distribution with non-empty classes; interval
//! inputs are handled by picking, per argument, the endpoint that makes the
//! bound weakest. Terms whose denominators may vanish are dropped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::ProbInterval;
use crate::network::{AtomId, Network};
use crate::saturation::{saturate, SaturationOptions, Status};

/// `P(A|A∪B)` from `p = P(A|B)` and `q = P(B|A)`, via
/// `f(p, q) = p / (p + q − p·q)`, nondecreasing in `p` and nonincreasing
/// in `q`.
pub fn disj_membership(p: ProbInterval, q: ProbInterval) -> Result<ProbInterval> {
    if p.hi() == 0.0 && q.hi() == 0.0 {
        return Err(Error::UndefinedMembership);
    }
    let f = |p: f64, q: f64| p / (p + q - p * q);
    let lo = if p.lo() == 0.0 { 0.0 } else { f(p.lo(), q.hi()) };
    let hi = if q.lo() == 0.0 { 1.0 } else { f(p.hi(), q.lo()) };
    Ok(ProbInterval::clamped(lo, hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConjDirection {
    /// `P(C | A∩B)`
    CGivenAB,
    /// `P(A∩B | C)`
    ABGivenC,
}

/// `1 − (1 − num)/den` at lower endpoints, with the zero-denominator policy
/// of the syllogism rule.
fn one_minus_ratio_lo(num: ProbInterval, den: ProbInterval) -> f64 {
    if den.lo() > 0.0 {
        1.0 - (1.0 - num.lo()) / den.lo()
    } else if num.lo() >= 1.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    }
}

/// Upper endpoint of `num / den`.
fn ratio_hi(num: ProbInterval, den: ProbInterval) -> f64 {
    if num.hi() == 0.0 {
        0.0
    } else if den.lo() > 0.0 {
        num.hi() / den.lo()
    } else {
        f64::INFINITY
    }
}

/// Lower endpoint of `num / den`.
fn ratio_lo(num: ProbInterval, den: ProbInterval) -> f64 {
    if den.hi() > 0.0 {
        num.lo() / den.hi()
    } else {
        f64::NEG_INFINITY
    }
}

/// Lower endpoint of `1 − 1/p`, which is never positive.
fn one_minus_inverse_lo(p: ProbInterval) -> f64 {
    if p.lo() >= 1.0 {
        0.0
    } else if p.lo() > 0.0 {
        1.0 - 1.0 / p.lo()
    } else {
        f64::NEG_INFINITY
    }
}

/// Smallest value of `u·v` with `u ∈ [0, u_hi]` and `v ≤ 0` known as `v_lo`.
fn nonneg_times_nonpos_lo(u_hi: f64, v_lo: f64) -> f64 {
    if v_lo == 0.0 {
        0.0
    } else {
        u_hi * v_lo
    }
}

/// Bounds of `P(C|A∩B)` from the six pairwise arcs among `a`, `b`, `c`:
/// the double syllogism through `A` and `B` plus the two additivity bounds
/// from `P(A∩B∩C) ≥ P(A∩C) + P(B∩C) − P(C)`.
pub fn c_given_ab_closed_form(net: &Network, a: AtomId, b: AtomId, c: AtomId) -> ProbInterval {
    let ca = net.bound(c, a);
    let ba = net.bound(b, a);
    let cb = net.bound(c, b);
    let ab = net.bound(a, b);
    let bc = net.bound(b, c);
    let ac = net.bound(a, c);

    let add_b = ratio_lo(ca, ba) + nonneg_times_nonpos_lo(ratio_hi(cb, ab), one_minus_inverse_lo(bc));
    let add_a = ratio_lo(cb, ab) + nonneg_times_nonpos_lo(ratio_hi(ca, ba), one_minus_inverse_lo(ac));
    let lo = [
        0.0,
        one_minus_ratio_lo(ca, ba),
        one_minus_ratio_lo(cb, ab),
        add_b,
        add_a,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    let hi = [1.0, ratio_hi(cb, ab), ratio_hi(ca, ba)]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    ProbInterval::clamped(lo, hi)
}

/// Bounds of `P(A∩B|C)`: the syllogism display, the additivity bound
/// `P(A|C) + P(B|C) − 1`, and containment in each of `A`, `B`.
pub fn ab_given_c_closed_form(net: &Network, a: AtomId, b: AtomId, c: AtomId) -> ProbInterval {
    let ca = net.bound(c, a);
    let ba = net.bound(b, a);
    let cb = net.bound(c, b);
    let ab = net.bound(a, b);
    let bc = net.bound(b, c);
    let ac = net.bound(a, c);

    let through = |scale: ProbInterval, factor: f64| {
        if factor >= 0.0 {
            scale.lo() * factor
        } else {
            f64::NEG_INFINITY
        }
    };
    let lo = [
        0.0,
        through(ac, one_minus_ratio_lo(ba, ca)),
        through(bc, one_minus_ratio_lo(ab, cb)),
        ac.lo() + bc.lo() - 1.0,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    let scaled = |x: ProbInterval, num: ProbInterval, den: ProbInterval| {
        let r = ratio_hi(num, den);
        if x.hi() == 0.0 {
            0.0
        } else {
            x.hi() * r
        }
    };
    let hi = [ac.hi(), bc.hi(), scaled(ac, ba, ca), scaled(bc, ab, cb)]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    ProbInterval::clamped(lo, hi)
}

/// Bounds of `P(C|A∪B)` from the memberships `P(A|A∪B)`, `P(B|A∪B)`.
pub fn c_given_a_or_b_closed_form(net: &Network, a: AtomId, b: AtomId, c: AtomId) -> ProbInterval {
    let (ab, ba) = (net.bound(a, b), net.bound(b, a));
    let (Ok(ma), Ok(mb)) = (disj_membership(ab, ba), disj_membership(ba, ab)) else {
        return ProbInterval::vacuous();
    };
    let (ca, cb) = (net.bound(c, a), net.bound(c, b));
    let lo = (ca.lo() * ma.lo()).max(cb.lo() * mb.lo());
    let hi = [
        1.0,
        ca.hi() * ma.hi() + cb.hi() * mb.hi(),
        1.0 - (1.0 - ca.hi()) * ma.lo(),
        1.0 - (1.0 - cb.hi()) * mb.lo(),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    ProbInterval::clamped(lo, hi)
}

/// Bounds of `P(A∪B|C)`: at least either part, at most their sum, and
/// `P(A|C) + P(B|C)·(1 − P(A|B)/P(C|B))` (and symmetrically) from
/// `P(B∖A ∩ C) ≥ P(B∩C) − P(A∩B)`.
pub fn a_or_b_given_c_closed_form(net: &Network, a: AtomId, b: AtomId, c: AtomId) -> ProbInterval {
    let (ac, bc) = (net.bound(a, c), net.bound(b, c));
    let (ab, ba) = (net.bound(a, b), net.bound(b, a));
    let (cb, ca) = (net.bound(c, b), net.bound(c, a));
    // P(X|C) + P(Y|C)·(1 − P(X|Y)/P(C|Y))
    let sum_bound = |xc: ProbInterval, yc: ProbInterval, xy: ProbInterval, cy: ProbInterval| {
        let k = 1.0 - ratio_hi(xy, cy);
        if k == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else if k >= 0.0 {
            xc.lo() + yc.lo() * k
        } else {
            xc.lo() + yc.hi() * k
        }
    };
    let lo = [ac.lo(), bc.lo(), sum_bound(ac, bc, ab, cb), sum_bound(bc, ac, ba, ca)]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = (ac.hi() + bc.hi()).min(1.0);
    ProbInterval::clamped(lo, hi)
}

/// Bounds for `P(C|A∩B)` or `P(A∩B|C)`: the network extended with an
/// `A∩B` node is saturated, and the result is intersected with the closed
/// forms evaluated on `net`.
pub fn conj_query_bounds(
    net: &Network,
    a: AtomId,
    b: AtomId,
    c: AtomId,
    direction: ConjDirection,
    opts: &SaturationOptions,
) -> Result<ProbInterval> {
    if a == b || a == c || b == c {
        return Err(Error::SameAtom(net.name(if a == b { a } else { c }).to_string()));
    }
    let mut ext = net.clone();
    let ab = ext.add_conjunction_node(a, b)?;
    let report = saturate(&mut ext, opts);
    if let Status::Inconsistent(why) = report.status {
        return Err(Error::Inconsistent(Box::new(why)));
    }
    let (saturated, closed) = match direction {
        ConjDirection::CGivenAB => (ext.bound(c, ab), c_given_ab_closed_form(&ext, a, b, c)),
        ConjDirection::ABGivenC => (ext.bound(ab, c), ab_given_c_closed_form(&ext, a, b, c)),
    };
    saturated.intersect(&closed).map_err(|e| {
        Error::inconsistent(crate::error::Inconsistency::EmptyIntersection {
            rule: crate::network::Rule::Conj,
            operands: vec![a, b, c],
            arc: match direction {
                ConjDirection::CGivenAB => (c, ab),
                ConjDirection::ABGivenC => (ab, c),
            },
            stored: e.left,
            candidate: e.right,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;

    fn iv(lo: f64, hi: f64) -> ProbInterval {
        ProbInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert_eq!(disj_membership(iv(1.0, 1.0), iv(0.5, 0.5)).unwrap(), iv(1.0, 1.0));
        assert_eq!(disj_membership(iv(0.5, 0.5), iv(1.0, 1.0)).unwrap(), iv(0.5, 0.5));
        let m = disj_membership(iv(0.5, 0.5), iv(0.5, 0.5)).unwrap();
        assert_eq!(m.to_string(), "[0.666667;0.666667]");
        assert!(matches!(
            disj_membership(iv(0.0, 0.0), iv(0.0, 0.0)),
            Err(Error::UndefinedMembership)
        ));
        assert_eq!(disj_membership(iv(0.0, 0.3), iv(0.0, 0.2)).unwrap(), iv(0.0, 1.0));
        assert_eq!(disj_membership(iv(0.2, 0.3), iv(0.0, 0.2)).unwrap().hi(), 1.0);
    }

    #[test]
    fn membership_monotonicity_on_grid() {
        let f = |p: f64, q: f64| p / (p + q - p * q);
        let grid: Vec<f64> = (1..=100).map(|k| k as f64 / 100.0).collect();
        for (i, &p) in grid.iter().enumerate() {
            for (j, &q) in grid.iter().enumerate() {
                if i + 1 < grid.len() {
                    assert!(f(grid[i + 1], q) >= f(p, q) - 1e-15);
                }
                if j + 1 < grid.len() {
                    assert!(f(p, grid[j + 1]) <= f(p, q) + 1e-15);
                }
            }
        }
    }

    #[test]
    fn membership_matches_world_enumeration() {
        // A, B with |A∖B| = |B∖A| = |A∩B|: P(A|B) = P(B|A) = 1/2, P(A|A∪B) = 2/3
        let only_a = 1.0;
        let only_b = 1.0;
        let both = 1.0;
        let direct = (only_a + both) / (only_a + only_b + both);
        let m = disj_membership(iv(0.5, 0.5), iv(0.5, 0.5)).unwrap();
        assert!((m.lo() - direct).abs() < 1e-12);
        assert!((m.hi() - direct).abs() < 1e-12);
    }

    #[test]
    fn certain_parts_give_certain_conjunction() {
        let net = parse_kb("cond a | c = [1, 1]\ncond b | c = [1, 1]").unwrap();
        let (a, b, c) = (AtomId(0), net.lookup("b").unwrap(), net.lookup("c").unwrap());
        assert_eq!(ab_given_c_closed_form(&net, a, b, c), iv(1.0, 1.0));
        let got = conj_query_bounds(&net, a, b, c, ConjDirection::ABGivenC, &SaturationOptions::default()).unwrap();
        assert_eq!(got, iv(1.0, 1.0));
    }

    #[test]
    fn superset_caps_conditional_on_conjunction() {
        let net = parse_kb("cond c | b = [0.5, 0.6]\ncond a | b = [1, 1]").unwrap();
        let (c, b, a) = (AtomId(0), AtomId(1), AtomId(2));
        let closed = c_given_ab_closed_form(&net, a, b, c);
        assert!(closed.hi() <= 0.6 + 1e-12, "{closed}");
        let got = conj_query_bounds(&net, a, b, c, ConjDirection::CGivenAB, &SaturationOptions::default()).unwrap();
        assert!(got.hi() <= 0.6 + 1e-12, "{got}");
    }

    #[test]
    fn disjunction_of_certain_part() {
        let net = parse_kb("cond a | c = [0.7, 0.8]\ncond b | c = [0.1, 0.2]").unwrap();
        let (a, c, b) = (AtomId(0), AtomId(1), AtomId(2));
        let got = a_or_b_given_c_closed_form(&net, a, b, c);
        assert!(
            (got.lo() - 0.7).abs() < 1e-12 && (got.hi() - 1.0).abs() < 1e-12,
            "{got}"
        );
    }
}
