//! Exact bounds by linear programming over possible worlds.
//!
//! A world fixes the truth of every base atom; a model of a network is a
//! probability distribution over the `2^n` worlds satisfying every stored
//! interval. The tightest interval for a query is the range of its
//! conditional probability over all models, found as two linear-fractional
//! programs. Independence declarations are not encoded.

mod charnes_cooper;
mod simplex;

use std::fmt;

use serde::Serialize;

pub use charnes_cooper::{
    charnes_cooper, recover, solve_simplex, FractionalProgram, LinearProgram, LpSolution, Row, VERIFY_TOL,
};
pub use simplex::{solve, LinConstraint, LpOutcome, LpProblem, Relation, Sense, MAX_PIVOTS, PIVOT_TOL};

use crate::error::{Error, Result};
use crate::intervals::ProbInterval;
use crate::network::{AtomId, AtomKind, Network};
use crate::query::{QueryExpr, Side};

/// Base atoms handled without `force`.
pub const MAX_ORACLE_ATOMS: usize = 12;
/// Lower bound on the probability of every base atom.
pub const EPS_MASS: f64 = 1e-6;

/// Origin of one row of the world program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ConstraintId {
    /// `P(target|given) ≤ hi`
    Upper {
        target: AtomId,
        given: AtomId,
    },
    /// `P(target|given) ≥ lo`
    Lower {
        target: AtomId,
        given: AtomId,
    },
    MassFloor(AtomId),
    Normalization,
}

impl ConstraintId {
    pub fn describe<'a>(&'a self, net: &'a Network) -> impl fmt::Display + 'a {
        struct Shown<'a>(&'a ConstraintId, &'a Network);
        impl fmt::Display for Shown<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let net = self.1;
                match *self.0 {
                    ConstraintId::Upper { target, given } => write!(
                        f,
                        "P({}|{}) <= {:.6}",
                        net.name(target),
                        net.name(given),
                        net.bound(target, given).hi()
                    ),
                    ConstraintId::Lower { target, given } => write!(
                        f,
                        "P({}|{}) >= {:.6}",
                        net.name(target),
                        net.name(given),
                        net.bound(target, given).lo()
                    ),
                    ConstraintId::MassFloor(a) => write!(f, "P({}) >= {EPS_MASS:e}", net.name(a)),
                    ConstraintId::Normalization => f.write_str("masses sum to 1"),
                }
            }
        }
        Shown(self, net)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleOptions {
    pub mass_floor: f64,
    /// Allow more than [`MAX_ORACLE_ATOMS`] base atoms.
    pub force: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            mass_floor: EPS_MASS,
            force: false,
        }
    }
}

/// Truth of every atom of a network in every world.
#[derive(Clone, Debug)]
pub struct WorldModel {
    n_worlds: usize,
    /// `holds[atom][world]`
    holds: Vec<Vec<bool>>,
}

impl WorldModel {
    pub fn new(net: &Network, opts: &OracleOptions) -> Result<Self> {
        let count = net.base_count();
        if count > MAX_ORACLE_ATOMS && !opts.force {
            return Err(Error::TooManyAtoms {
                count,
                limit: MAX_ORACLE_ATOMS,
            });
        }
        if count >= usize::BITS as usize - 1 {
            return Err(Error::TooManyAtoms {
                count,
                limit: usize::BITS as usize - 2,
            });
        }
        let n_worlds = 1usize << count;
        let mut bit = vec![usize::MAX; net.len()];
        for (k, atom) in net.base_atoms().enumerate() {
            bit[atom.id.0] = k;
        }
        let mut holds: Vec<Vec<bool>> = Vec::with_capacity(net.len());
        for atom in net.atoms() {
            let row = match atom.kind {
                AtomKind::Base => {
                    let k = bit[atom.id.0];
                    (0..n_worlds).map(|w| w >> k & 1 == 1).collect()
                }
                AtomKind::Conjunction(a, b) => (0..n_worlds).map(|w| holds[a.0][w] && holds[b.0][w]).collect(),
                AtomKind::Disjunction(a, b) => (0..n_worlds).map(|w| holds[a.0][w] || holds[b.0][w]).collect(),
            };
            holds.push(row);
        }
        Ok(Self { n_worlds, holds })
    }

    pub fn n_worlds(&self) -> usize {
        self.n_worlds
    }

    pub fn holds(&self, atom: AtomId, world: usize) -> bool {
        self.holds[atom.0][world]
    }

    pub fn event(&self, side: &Side) -> Vec<bool> {
        match *side {
            Side::Atom(a) => self.holds[a.0].clone(),
            Side::And(a, b) => (0..self.n_worlds)
                .map(|w| self.holds(a, w) && self.holds(b, w))
                .collect(),
            Side::Or(a, b) => (0..self.n_worlds)
                .map(|w| self.holds(a, w) || self.holds(b, w))
                .collect(),
        }
    }

    /// Homogeneous rows `coeffs · x ≤ 0` for every informative bound of `net`.
    pub fn kb_rows(&self, net: &Network) -> Vec<Row> {
        let mut rows = Vec::new();
        for target in net.ids() {
            for given in net.ids() {
                if target == given {
                    continue;
                }
                let iv = net.bound(target, given);
                let t = &self.holds[target.0];
                let g = &self.holds[given.0];
                // Σ_{T∧G} (1 − hi) x − hi Σ_{G∧¬T} x ≤ 0
                if iv.hi() < 1.0 {
                    let hi = iv.hi();
                    let coeffs = (0..self.n_worlds)
                        .map(|w| match (g[w], t[w]) {
                            (true, true) => 1.0 - hi,
                            (true, false) => -hi,
                            _ => 0.0,
                        })
                        .collect();
                    push_binding(&mut rows, ConstraintId::Upper { target, given }, coeffs);
                }
                // lo Σ_{G∧¬T} x − (1 − lo) Σ_{T∧G} x ≤ 0
                if iv.lo() > 0.0 {
                    let lo = iv.lo();
                    let coeffs = (0..self.n_worlds)
                        .map(|w| match (g[w], t[w]) {
                            (true, true) => lo - 1.0,
                            (true, false) => lo,
                            _ => 0.0,
                        })
                        .collect();
                    push_binding(&mut rows, ConstraintId::Lower { target, given }, coeffs);
                }
            }
        }
        rows
    }

    pub fn floor_rows(&self, net: &Network) -> Vec<Row> {
        net.base_atoms()
            .map(|atom| Row {
                id: ConstraintId::MassFloor(atom.id),
                coeffs: indicator(&self.holds[atom.id.0]),
            })
            .collect()
    }

    pub fn fractional_program(
        &self,
        net: &Network,
        q: &QueryExpr,
        sense: Sense,
        opts: &OracleOptions,
    ) -> FractionalProgram {
        let t = self.event(&q.target);
        let g = self.event(&q.given);
        let both: Vec<bool> = t.iter().zip(&g).map(|(t, g)| *t && *g).collect();
        FractionalProgram {
            numerator: indicator(&both),
            denominator: indicator(&g),
            rows: self.kb_rows(net),
            floors: self.floor_rows(net),
            mass_floor: opts.mass_floor,
            sense,
        }
    }
}

/// Rows with no positive coefficient hold for every `x ≥ 0`.
fn push_binding(rows: &mut Vec<Row>, id: ConstraintId, coeffs: Vec<f64>) {
    if coeffs.iter().any(|&c| c > 0.0) {
        rows.push(Row { id, coeffs });
    }
}

fn indicator(mask: &[bool]) -> Vec<f64> {
    mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Verdict {
    /// A distribution over worlds satisfying every bound.
    Consistent { witness: Vec<f64> },
    /// Rows whose nonnegative combination is contradictory.
    Infeasible { certificate: Vec<ConstraintId> },
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Consistent { .. })
    }
}

/// Decides whether some distribution over worlds satisfies `net`.
pub fn check_consistency(net: &Network, opts: &OracleOptions) -> Result<Verdict> {
    let model = WorldModel::new(net, opts)?;
    let n = model.n_worlds();
    let mut ids = vec![ConstraintId::Normalization];
    let mut constraints = vec![LinConstraint {
        coeffs: vec![1.0; n],
        relation: Relation::Eq,
        rhs: 1.0,
    }];
    for r in model.kb_rows(net) {
        ids.push(r.id);
        constraints.push(LinConstraint {
            coeffs: r.coeffs,
            relation: Relation::Le,
            rhs: 0.0,
        });
    }
    for r in model.floor_rows(net) {
        ids.push(r.id);
        constraints.push(LinConstraint {
            coeffs: r.coeffs,
            relation: Relation::Ge,
            rhs: opts.mass_floor,
        });
    }
    let problem = LpProblem {
        objective: vec![0.0; n],
        sense: Sense::Minimize,
        constraints,
    };
    match solve(&problem)? {
        LpOutcome::Optimal { x, .. } => Ok(Verdict::Consistent { witness: x }),
        LpOutcome::Infeasible { farkas } => {
            let certificate = ids
                .into_iter()
                .zip(farkas)
                .filter(|(id, y)| *y != 0.0 && *id != ConstraintId::Normalization)
                .map(|(id, _)| id)
                .collect();
            Ok(Verdict::Infeasible { certificate })
        }
        LpOutcome::Unbounded => Err(Error::Numerical("feasibility problem reported unbounded".into())),
    }
}

fn optimize(
    model: &WorldModel,
    net: &Network,
    q: &QueryExpr,
    sense: Sense,
    opts: &OracleOptions,
) -> Result<Option<f64>> {
    let fp = model.fractional_program(net, q, sense, opts);
    match solve_simplex(&charnes_cooper(&fp))? {
        LpSolution::Optimal { value, .. } => Ok(Some(value)),
        LpSolution::Infeasible => Ok(None),
        LpSolution::Unbounded => Err(Error::Numerical("conditional probability reported unbounded".into())),
    }
}

/// Tightest interval for `q` over all models of `net`.
pub fn exact_bounds(net: &Network, q: &QueryExpr, opts: &OracleOptions) -> Result<ProbInterval> {
    let model = WorldModel::new(net, opts)?;
    let lo = optimize(&model, net, q, Sense::Minimize, opts)?;
    let hi = optimize(&model, net, q, Sense::Maximize, opts)?;
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok(ProbInterval::clamped(lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0))),
        _ => match check_consistency(net, opts)? {
            Verdict::Infeasible { certificate } => Err(Error::InfeasibleKb(certificate)),
            Verdict::Consistent { .. } => Err(Error::DegenerateDenominator),
        },
    }
}

/// Exact bounds for every ordered pair of distinct base atoms,
/// `out[t][g]` for `P(t|g)`; the diagonal is `[1, 1]`.
pub fn exact_matrix(net: &Network, opts: &OracleOptions) -> Result<Vec<Vec<ProbInterval>>> {
    let base: Vec<AtomId> = net.base_atoms().map(|a| a.id).collect();
    let mut out = vec![vec![ProbInterval::certain(); base.len()]; base.len()];
    for (i, &t) in base.iter().enumerate() {
        for (j, &g) in base.iter().enumerate() {
            if i != j {
                out[i][j] = exact_bounds(net, &QueryExpr::atomic(t, g), opts)?;
            }
        }
    }
    Ok(out)
}
