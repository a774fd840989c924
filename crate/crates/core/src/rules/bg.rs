//! Generalized Bayes propagation.
//!
//! For positive quantities, `P(A₁|A_k) = P(A_k|A₁) · Π P(A_i|A_{i+1}) / P(A_{i+1}|A_i)`
//! along any cycle. Weighting the arc `i → j` by
//! `ln d(i,j) = ln P_*(A_i|A_j) − ln P^*(A_j|A_i)`, the best lower bound for
//! `P(A|B)` is `P_*(B|A)·exp(longest A → B)` and the best upper bound is
//! `P^*(B|A)·exp(−longest B → A)`. Longest paths exist because no circuit
//! has positive weight in a consistent network.

use crate::error::{Error, Inconsistency, Result};
use crate::intervals::ProbInterval;
use crate::network::{AtomId, Network, Rule};

/// Circuits heavier than this signal inconsistent bounds.
pub const EPS_CYCLE: f64 = 1e-7;
/// Path relaxations gaining less than this are ignored, so rounding noise
/// on zero-weight cycles does not reroute paths around them.
const EPS_RELAX: f64 = 1e-12;

/// Log-ratio arc weights, `-inf` where either bound is zero.
#[derive(Clone, Debug)]
pub struct ArcWeightGraph {
    n: usize,
    w: Vec<f64>,
}

impl ArcWeightGraph {
    pub fn from_network(net: &Network) -> Self {
        let n = net.len();
        let mut w = vec![f64::NEG_INFINITY; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let num = net.bound(AtomId(i), AtomId(j)).lo();
                let den = net.bound(AtomId(j), AtomId(i)).hi();
                if num > 0.0 && den > 0.0 {
                    w[i * n + j] = num.ln() - den.ln();
                }
            }
        }
        Self { n, w }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Weight of the arc `i → j`, i.e. `ln d̲(i, j)`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    /// Removes both arcs between `i` and `j`.
    pub fn suppress(&mut self, i: usize, j: usize) {
        self.w[i * self.n + j] = f64::NEG_INFINITY;
        self.w[j * self.n + i] = f64::NEG_INFINITY;
    }

    /// Floyd-Warshall in the (max, +) algebra over walks of at least one arc.
    /// Stops early, returning the offending node and stage, as soon as a
    /// circuit heavier than [`EPS_CYCLE`] appears.
    pub fn longest_paths(&self) -> LongestPaths {
        let n = self.n;
        let mut dist = self.w.clone();
        let mut next: Vec<usize> = (0..n * n).map(|ij| ij % n).collect();
        let mut positive = None;
        'stages: for k in 0..n {
            for i in 0..n {
                let dik = dist[i * n + k];
                if dik == f64::NEG_INFINITY {
                    continue;
                }
                for j in 0..n {
                    let cand = dik + dist[k * n + j];
                    if cand > dist[i * n + j] + EPS_RELAX {
                        dist[i * n + j] = cand;
                        next[i * n + j] = next[i * n + k];
                    }
                }
                if dist[i * n + i] > EPS_CYCLE {
                    positive = Some(i);
                    break 'stages;
                }
            }
        }
        LongestPaths {
            n,
            dist,
            next,
            positive,
        }
    }
}

pub struct LongestPaths {
    n: usize,
    dist: Vec<f64>,
    next: Vec<usize>,
    positive: Option<usize>,
}

impl LongestPaths {
    /// Heaviest walk weight from `i` to `j`; `-inf` if `j` is unreachable.
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    /// Node sequence of the heaviest walk from `i` to `j`, both ends
    /// included. Truncated after `n + 1` hops.
    pub fn path(&self, i: usize, j: usize) -> Vec<usize> {
        let mut out = vec![i];
        if self.dist(i, j) == f64::NEG_INFINITY {
            return out;
        }
        let mut at = i;
        for _ in 0..=self.n {
            at = self.next[at * self.n + j];
            out.push(at);
            if at == j {
                break;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CycleCheck {
    Ok,
    Violation { circuit: Vec<AtomId>, excess: f64 },
}

impl CycleCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, CycleCheck::Ok)
    }

    fn into_error(self) -> Option<Error> {
        match self {
            CycleCheck::Ok => None,
            CycleCheck::Violation { circuit, excess } => {
                Some(Error::inconsistent(Inconsistency::PositiveCircuit { circuit, excess }))
            }
        }
    }
}

fn violation(graph: &ArcWeightGraph, paths: &LongestPaths) -> CycleCheck {
    match paths.positive {
        None => CycleCheck::Ok,
        Some(i) => {
            let circuit = paths.path(i, i);
            let excess = circuit.windows(2).map(|w| graph.weight(w[0], w[1])).sum::<f64>();
            CycleCheck::Violation {
                circuit: circuit.into_iter().map(AtomId).collect(),
                excess: excess.max(paths.dist(i, i)),
            }
        }
    }
}

/// Looks for a circuit of positive log-weight.
pub fn cycle_check(net: &Network) -> CycleCheck {
    let graph = ArcWeightGraph::from_network(net);
    let paths = graph.longest_paths();
    violation(&graph, &paths)
}

/// Candidate bounds for `P(a|b)` given longest paths on the current network.
fn candidate(net: &Network, paths: &LongestPaths, a: usize, b: usize) -> ProbInterval {
    let reverse = net.bound(AtomId(b), AtomId(a));
    let forward = paths.dist(a, b);
    let backward = paths.dist(b, a);
    let lo = if forward > f64::NEG_INFINITY {
        reverse.lo() * forward.exp()
    } else {
        0.0
    };
    let hi = if backward > f64::NEG_INFINITY {
        (reverse.hi() * (-backward).exp()).min(1.0)
    } else {
        1.0
    };
    ProbInterval::clamped(lo, hi)
}

/// One BG step: every arc is tightened against the longest paths of the
/// network as it stood when the step began.
///
/// Paths are computed once for all pairs. Leaving the direct arcs in does
/// not change the outcome: the direct path `A → B` yields the candidate
/// `P_*(B|A)·P_*(A|B)/P^*(B|A) ≤ P_*(A|B)`, and it can only win the maximum
/// when every longer path yields even less.
pub fn bg_tighten(net: &mut Network, tol: f64, iteration: usize) -> Result<bool> {
    let graph = ArcWeightGraph::from_network(net);
    let paths = graph.longest_paths();
    if let Some(err) = violation(&graph, &paths).into_error() {
        return Err(err);
    }
    let n = net.len();
    let mut updates = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let cand = candidate(net, &paths, a, b);
            let stored = net.bound(AtomId(a), AtomId(b));
            if cand.lo() > stored.lo() || cand.hi() < stored.hi() {
                updates.push((a, b, cand));
            }
        }
    }
    let mut changed = false;
    for (a, b, cand) in updates {
        let stored = net.bound(AtomId(a), AtomId(b));
        let mut operands: Vec<AtomId> = Vec::new();
        if cand.lo() > stored.lo() {
            operands.extend(paths.path(a, b).into_iter().map(AtomId));
        }
        if cand.hi() < stored.hi() {
            let back = paths.path(b, a).into_iter().map(AtomId);
            if operands.is_empty() {
                operands.extend(back);
            } else {
                operands.extend(back.skip(1));
            }
        }
        changed |= net.tighten(AtomId(a), AtomId(b), cand, Rule::Bg, &operands, iteration, tol)?;
    }
    Ok(changed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;

    fn iv(lo: f64, hi: f64) -> ProbInterval {
        ProbInterval::new(lo, hi).unwrap()
    }

    const STUDENTS_FIVE_ARCS: &str = "\
cond sport | student = [0.9, 0.9]
cond student | sport = [0.4, 0.4]
cond single | sport = [0.85, 0.85]
cond sport | single = [0.7, 0.7]
cond single | student = [0.61, 1.0]
";

    #[test]
    fn students_single_arc() {
        let mut net = parse_kb(STUDENTS_FIVE_ARCS).unwrap();
        assert!(bg_tighten(&mut net, 1e-9, 1).unwrap());
        let student = net.lookup("student").unwrap();
        let single = net.lookup("single").unwrap();
        let got = net.bound(student, single);
        assert!((got.lo() - 0.2233).abs() <= 0.0005, "{got}");
        assert!((got.hi() - 0.3660).abs() <= 0.0005, "{got}");
        // trace names the path student → sport → single
        let step = net.trace().for_arc((student, single)).next().unwrap();
        assert_eq!(step.rule, Rule::Bg);
        assert!(step.operands.contains(&net.lookup("sport").unwrap()));
    }

    #[test]
    fn precise_consistent_cycle_is_a_fixpoint() {
        // sizes |a| = 1, |b| = 2, |c| = 4 with |ab| = 0.5, |bc| = 1, |ac| = 0.25
        let text = "\
cond b | a = [0.5, 0.5]
cond a | b = [0.25, 0.25]
cond c | b = [0.5, 0.5]
cond b | c = [0.25, 0.25]
cond c | a = [0.25, 0.25]
cond a | c = [0.0625, 0.0625]
";
        let mut net = parse_kb(text).unwrap();
        assert!(cycle_check(&net).is_ok());
        assert!(!bg_tighten(&mut net, 1e-9, 1).unwrap());
    }

    #[test]
    fn precise_two_cycle_has_zero_weight() {
        let net = parse_kb("cond b | a = [0.9, 0.9]\ncond a | b = [0.4, 0.4]").unwrap();
        let g = ArcWeightGraph::from_network(&net);
        assert!((g.weight(0, 1) + g.weight(1, 0)).abs() < 1e-15);
        assert!(cycle_check(&net).is_ok());
    }

    #[test]
    fn positive_circuit_is_reported() {
        let text = "\
cond b | a = [0.9, 0.9]
cond a | b = [0.4, 0.4]
cond c | b = [1, 1]
cond b | c = [1, 1]
cond c | a = [0.1, 0.1]
cond a | c = [0.9, 0.9]
";
        let mut net = parse_kb(text).unwrap();
        match cycle_check(&net) {
            CycleCheck::Violation { circuit, excess } => {
                assert!(excess > EPS_CYCLE);
                assert_eq!(circuit.first(), circuit.last());
                assert!(circuit.len() >= 3);
            }
            CycleCheck::Ok => panic!("expected a violation"),
        }
        assert!(matches!(bg_tighten(&mut net, 1e-9, 1), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn unreachable_pairs_get_no_candidate() {
        let mut net = parse_kb("cond b | a = [0.3, 0.5]\natom c").unwrap();
        assert!(!bg_tighten(&mut net, 1e-9, 1).unwrap());
        let (a, b) = (net.lookup("a").unwrap(), net.lookup("b").unwrap());
        assert_eq!(net.bound(b, a), iv(0.3, 0.5));
    }
}
