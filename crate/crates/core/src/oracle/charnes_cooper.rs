//! Linear-fractional programs over world masses and their Charnes–Cooper
//! linearisation.
//!
//! `opt (c·x)/(d·x)` subject to `M x ≤ 0`, `1·x = 1`, `F_k·x ≥ ε`, `x ≥ 0`
//! becomes, with `y = x/(d·x)`,
//! `opt c·y` subject to `M y ≤ 0`, `d·y = 1`, `ε·(1·y) − F_k·y ≤ 0`, `y ≥ 0`.
//! Every row is homogeneous, so the map is a bijection between feasible
//! points with `d·x > 0` and feasible `y`, preserving the objective.

use serde::Serialize;

use super::simplex::{self, LinConstraint, LpOutcome, LpProblem, Relation, Sense};
use super::ConstraintId;
use crate::error::{Error, Result};

/// Residual allowed when checking a solution against its rows.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub id: ConstraintId,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FractionalProgram {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
    /// Homogeneous rows `coeffs · x ≤ 0`.
    pub rows: Vec<Row>,
    /// Indicator vectors with `F_k · x ≥ mass_floor`.
    pub floors: Vec<Row>,
    pub mass_floor: f64,
    pub sense: Sense,
}

impl FractionalProgram {
    pub fn len(&self) -> usize {
        self.numerator.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerator.is_empty()
    }

    /// Objective at `x`, `None` where the denominator vanishes.
    pub fn ratio(&self, x: &[f64]) -> Option<f64> {
        let d = dot(&self.denominator, x);
        (d > 0.0).then(|| dot(&self.numerator, x) / d)
    }

    /// Whether `x` satisfies every row within `tol`.
    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        x.iter().all(|&v| v >= -tol)
            && (x.iter().sum::<f64>() - 1.0).abs() <= tol
            && self.rows.iter().all(|r| dot(&r.coeffs, x) <= tol)
            && self.floors.iter().all(|f| dot(&f.coeffs, x) >= self.mass_floor - tol)
    }
}

/// The homogenised program in `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub sense: Sense,
    /// `d · y = 1`
    pub normalization: Vec<f64>,
    /// Rows `coeffs · y ≤ 0`, the homogenised floors last.
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn to_problem(&self) -> LpProblem {
        let mut constraints = Vec::with_capacity(self.rows.len() + 1);
        constraints.push(LinConstraint {
            coeffs: self.normalization.clone(),
            relation: Relation::Eq,
            rhs: 1.0,
        });
        for r in &self.rows {
            constraints.push(LinConstraint {
                coeffs: r.coeffs.clone(),
                relation: Relation::Le,
                rhs: 0.0,
            });
        }
        LpProblem {
            objective: self.objective.clone(),
            sense: self.sense,
            constraints,
        }
    }

    pub fn is_feasible(&self, y: &[f64], tol: f64) -> bool {
        y.iter().all(|&v| v >= -tol)
            && (dot(&self.normalization, y) - 1.0).abs() <= tol
            && self.rows.iter().all(|r| dot(&r.coeffs, y) <= tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum LpSolution {
    Optimal { value: f64, y: Vec<f64> },
    Infeasible,
    Unbounded,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

pub fn charnes_cooper(fp: &FractionalProgram) -> LinearProgram {
    let mut rows = fp.rows.clone();
    for f in &fp.floors {
        rows.push(Row {
            id: f.id,
            coeffs: f.coeffs.iter().map(|&v| fp.mass_floor - v).collect(),
        });
    }
    LinearProgram {
        objective: fp.numerator.clone(),
        sense: fp.sense,
        normalization: fp.denominator.clone(),
        rows,
    }
}

/// Maps `y` back to world masses.
pub fn recover(y: &[f64]) -> Option<Vec<f64>> {
    let t: f64 = y.iter().sum();
    (t > 0.0).then(|| y.iter().map(|v| v / t).collect())
}

/// Solves `lp`, checking the optimum against its rows.
pub fn solve_simplex(lp: &LinearProgram) -> Result<LpSolution> {
    match simplex::solve(&lp.to_problem())? {
        LpOutcome::Optimal { value, x } => {
            let scale = lp
                .rows
                .iter()
                .flat_map(|r| r.coeffs.iter())
                .fold(1.0_f64, |m, v| m.max(v.abs()));
            if !lp.is_feasible(&x, VERIFY_TOL * scale) {
                return Err(Error::Numerical("simplex optimum violates its constraints".into()));
            }
            Ok(LpSolution::Optimal { value, y: x })
        }
        LpOutcome::Infeasible { .. } => Ok(LpSolution::Infeasible),
        LpOutcome::Unbounded => Ok(LpSolution::Unbounded),
    }
}
