//! Tightening `P(C|A)` (and `P(A|C)`) under a declared conditional
//! independence on `(A, B, C)`.
//!
//! A declaration is read as also asserting that the classes it conditions on
//! overlap, so the irrelevance substitutions it licenses are defined.

use crate::error::Result;
use crate::intervals::ProbInterval;
use crate::network::{AtomId, IndepDecl, IndepKind, Network, Rule};

/// Extremes of `f` over the corners of the box spanned by `args`. A NaN at
/// any corner makes both extremes unbounded.
///
/// Exact for functions monotone in each argument separately, which covers
/// every ratio-of-products form used here.
pub fn corner_extremes<const N: usize>(args: [ProbInterval; N], f: impl Fn([f64; N]) -> f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for mask in 0..(1usize << N) {
        let mut point = [0.0; N];
        for (k, slot) in point.iter_mut().enumerate() {
            *slot = if mask >> k & 1 == 1 { args[k].hi() } else { args[k].lo() };
        }
        let v = f(point);
        if v.is_nan() {
            return (f64::NEG_INFINITY, f64::INFINITY);
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// `max(0, 1 − (1 − num)/den)` over the box, zero-denominator policy as in QS.
fn one_minus_ratio_lo(num: ProbInterval, den: ProbInterval) -> f64 {
    let v = if den.lo() > 0.0 {
        1.0 - (1.0 - num.lo()) / den.lo()
    } else if num.lo() >= 1.0 {
        1.0
    } else {
        0.0
    };
    v.max(0.0)
}

fn ratio_hi(num: ProbInterval, den: ProbInterval) -> f64 {
    if num.hi() == 0.0 {
        0.0
    } else if den.lo() > 0.0 {
        num.hi() / den.lo()
    } else {
        f64::INFINITY
    }
}

/// Candidate intervals `(for P(C|A), for P(A|C))` implied by `decl`.
pub fn indep_bounds(net: &Network, decl: &IndepDecl) -> (ProbInterval, ProbInterval) {
    let IndepDecl { kind, a, b, c } = *decl;
    let ba = net.bound(b, a);
    let ab = net.bound(a, b);
    let cb = net.bound(c, b);
    let bc = net.bound(b, c);
    match kind {
        IndepKind::Ii => {
            // P(C|B)·P(B|A) ≤ P(C|A) ≤ 1 − P(B|A) + P(C|B)·P(B|A)
            let lo = cb.lo() * ba.lo();
            let hi = (1.0 - ba.lo()) + ba.lo() * cb.hi();
            // the same bracketing for P(A|C) carried over by the 3-cycle identity
            let (_, via_ac) = corner_extremes([ba, cb, ab, bc], |[x, y, p, q]| x * y * (1.0 - q + p * q) / (p * q));
            let c_given_a = ProbInterval::clamped(lo, hi.min(via_ac));

            let lo = ab.lo() * bc.lo();
            let hi = (1.0 - bc.lo()) + bc.lo() * ab.hi();
            let (_, via_ca) = corner_extremes([bc, ab, cb, ba], |[q, p, y, x]| q * p * (1.0 - x + y * x) / (y * x));
            let a_given_c = ProbInterval::clamped(lo, hi.min(via_ca));
            (c_given_a, a_given_c)
        }
        IndepKind::I => {
            // P(C|A) = P(C|A∩B), bracketed through B alone
            let lo = one_minus_ratio_lo(cb, ab);
            let hi = ratio_hi(cb, ab).min(1.0);
            (ProbInterval::clamped(lo, hi), ProbInterval::vacuous())
        }
        IndepKind::Iii => {
            // mirror of i for P(A|C), carried to P(C|A) by the 3-cycle identity
            let lo = one_minus_ratio_lo(ab, cb);
            let hi = ratio_hi(ab, cb).min(1.0);
            let a_given_c = ProbInterval::clamped(lo, hi);
            let (ca_lo, _) = corner_extremes([ba, bc, cb, ab], |[x, q, y, p]| x / q * (1.0 - (1.0 - y) / p));
            let (_, ca_hi) = corner_extremes([ba, bc], |[x, q]| x / q);
            let c_given_a = ProbInterval::clamped(ca_lo.max(0.0), ca_hi.min(1.0));
            (c_given_a, a_given_c)
        }
    }
}

pub fn indep_tighten(net: &mut Network, decl: &IndepDecl, tol: f64, iteration: usize) -> Result<bool> {
    let (c_given_a, a_given_c) = indep_bounds(net, decl);
    let IndepDecl { a, b, c, .. } = *decl;
    let operands: [AtomId; 3] = [a, b, c];
    let mut changed = false;
    if !c_given_a.is_vacuous() {
        changed |= net.tighten(c, a, c_given_a, Rule::Indep, &operands, iteration, tol)?;
    }
    if !a_given_c.is_vacuous() {
        changed |= net.tighten(a, c, a_given_c, Rule::Indep, &operands, iteration, tol)?;
    }
    Ok(changed)
}

pub fn indep_pass(net: &mut Network, tol: f64, iteration: usize) -> Result<bool> {
    let decls = net.indeps().to_vec();
    let mut changed = false;
    for decl in &decls {
        changed |= indep_tighten(net, decl, tol, iteration)?;
    }
    Ok(changed)
}
