//! The global fixpoint: alternate syllogism sweeps (with any declared
//! independence tighteners) and generalized Bayes steps until neither
//! improves an interval.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Inconsistency, Result};
use crate::network::{DerivationTrace, Network};
use crate::rules::{bg_tighten, cycle_check, indep_pass, qs_pass, CycleCheck, EPS_CHANGE};

/// Cap on syllogism passes within one outer iteration.
const MAX_INNER_PASSES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaturationOptions {
    /// Smallest endpoint movement counted as an improvement.
    pub tol: f64,
    pub max_outer: usize,
}

impl Default for SaturationOptions {
    fn default() -> Self {
        Self {
            tol: EPS_CHANGE,
            max_outer: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Status {
    Saturated,
    MaxIterations,
    Inconsistent(Inconsistency),
}

#[derive(Clone, Debug)]
pub struct SaturationReport {
    pub iterations: usize,
    /// Distinct arcs improved by more than the tolerance.
    pub changed_arcs: usize,
    pub wall_time: Duration,
    /// Steps recorded during this run.
    pub trace: DerivationTrace,
    pub status: Status,
}

impl SaturationReport {
    pub fn is_saturated(&self) -> bool {
        self.status == Status::Saturated
    }
}

fn step_one(net: &mut Network, tol: f64, iteration: usize) -> Result<(bool, bool)> {
    let mut changed = false;
    for _ in 0..MAX_INNER_PASSES {
        let mut pass = qs_pass(net, tol, iteration)?;
        pass |= indep_pass(net, tol, iteration)?;
        if !pass {
            return Ok((changed, true));
        }
        changed = true;
    }
    Ok((changed, false))
}

fn outer_iteration(net: &mut Network, tol: f64, iteration: usize) -> Result<(bool, bool)> {
    if let CycleCheck::Violation { circuit, excess } = cycle_check(net) {
        return Err(Error::inconsistent(Inconsistency::PositiveCircuit { circuit, excess }));
    }
    let (qs_changed, settled) = step_one(net, tol, iteration)?;
    let bg_changed = bg_tighten(net, tol, iteration)?;
    Ok((qs_changed || bg_changed, settled))
}

/// Saturates `net` in place. Every entry only ever shrinks; on
/// inconsistency the network holds whatever was derived before the
/// contradiction surfaced.
pub fn saturate(net: &mut Network, opts: &SaturationOptions) -> SaturationReport {
    let start = Instant::now();
    let first_step = net.trace().len();
    let mut status = Status::MaxIterations;
    let mut iterations = 0;
    for outer in 1..=opts.max_outer {
        iterations = outer;
        match outer_iteration(net, opts.tol, outer) {
            Ok((false, true)) => {
                status = Status::Saturated;
                break;
            }
            Ok((_, settled)) => {
                if !settled {
                    status = Status::MaxIterations;
                    break;
                }
            }
            Err(Error::Inconsistent(why)) => {
                status = Status::Inconsistent(*why);
                break;
            }
            Err(other) => unreachable!("rules only fail on inconsistency: {other}"),
        }
    }
    let mut trace = DerivationTrace::default();
    let mut arcs = HashSet::new();
    for step in &net.trace().steps()[first_step..] {
        arcs.insert(step.arc);
        trace.push(step.clone());
    }
    SaturationReport {
        iterations,
        changed_arcs: arcs.len(),
        wall_time: start.elapsed(),
        trace,
        status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::ProbInterval;
    use crate::kb::parse_kb;
    use crate::network::AtomId;

    #[test]
    fn two_atoms_are_already_saturated() {
        let mut net = parse_kb("cond b | a = [0.3, 0.6]\ncond a | b = [0.2, 0.9]").unwrap();
        let report = saturate(&mut net, &SaturationOptions::default());
        assert_eq!(report.status, Status::Saturated);
        assert_eq!(report.changed_arcs, 0);
        assert_eq!(report.iterations, 1);
    }

    #[test]
    fn saturation_is_idempotent() {
        let text = "\
cond sport | student = [0.9, 0.9]
cond student | sport = [0.4, 0.4]
cond single | sport = [0.85, 0.85]
cond sport | single = [0.7, 0.7]
cond single | student = [0.61, 1.0]
";
        let mut net = parse_kb(text).unwrap();
        let first = saturate(&mut net, &SaturationOptions::default());
        assert!(first.is_saturated());
        assert!(first.changed_arcs > 0);
        let snapshot = net.clone();
        let second = saturate(&mut net, &SaturationOptions::default());
        assert!(second.is_saturated());
        assert_eq!(second.changed_arcs, 0);
        for t in net.ids() {
            for g in net.ids() {
                assert_eq!(net.bound(t, g), snapshot.bound(t, g));
            }
        }
    }

    #[test]
    fn contradiction_is_reported_not_thrown() {
        let text = "\
cond b | a = [0.9, 0.9]
cond a | b = [0.4, 0.4]
cond c | b = [1, 1]
cond b | c = [1, 1]
cond c | a = [0.1, 0.1]
cond a | c = [0.9, 0.9]
";
        let mut net = parse_kb(text).unwrap();
        let report = saturate(&mut net, &SaturationOptions::default());
        assert!(matches!(report.status, Status::Inconsistent(_)));
    }

    #[test]
    fn max_iterations_is_visible() {
        let text = "\
cond sport | student = [0.9, 0.9]
cond student | sport = [0.4, 0.4]
cond single | sport = [0.85, 0.85]
cond sport | single = [0.7, 0.7]
cond single | student = [0.61, 1.0]
";
        let mut net = parse_kb(text).unwrap();
        let opts = SaturationOptions {
            tol: 1e-9,
            max_outer: 1,
        };
        let report = saturate(&mut net, &opts);
        assert_eq!(report.status, Status::MaxIterations);
        let before = net.bound(AtomId(0), AtomId(1));
        assert!(ProbInterval::vacuous().contains(&before));
    }
}
