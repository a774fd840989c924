//! Dense two-phase tableau simplex. Columns enter by most negative reduced
//! cost until pivots stall, then by Bland's rule.

use std::collections::HashSet;

use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-9;
/// Reduced costs above `-COST_TOL` count as optimal.
const COST_TOL: f64 = 1e-9;
/// Loosest reduced-cost tolerance reached while escaping cycles.
const MAX_COST_TOL: f64 = 1e-5;
pub const MAX_PIVOTS: usize = 1_000_000;
/// Phase-one optimum above this (relative to the right-hand side scale)
/// means the constraints have no solution.
const FEASIBILITY_TOL: f64 = 1e-10;
/// Pivots between rebuilds of the tableau from the original rows.
const REINVERT_EVERY: usize = 16;
/// Pivot elements below this are recomputed from the original rows first.
const SMALL_PIVOT: f64 = 1e-6;
/// Basic values below `-NEGATIVE_TOL` (relative to the largest) are
/// repaired by dual pivots after phase two.
const NEGATIVE_TOL: f64 = 1e-12;
/// Relative width of a tie in the ratio test.
const RATIO_TIE: f64 = 1e-12;
/// Consecutive degenerate pivots before pricing and ties fall back to
/// Bland's rule.
const STALL_LIMIT: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Optimize `objective · x` subject to `constraints` and `x ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub sense: Sense,
    pub constraints: Vec<LinConstraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal {
        value: f64,
        x: Vec<f64>,
    },
    /// Multipliers `y`, one per constraint, with `yᵀA` sign-compatible with
    /// `x ≥ 0` and `yᵀb` contradicting it. Zeros mark constraints not
    /// needed for the contradiction.
    Infeasible {
        farkas: Vec<f64>,
    },
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows` constraint rows then one cost row, each `cols + 1` wide with
    /// the right-hand side last.
    t: Vec<f64>,
    /// The constraint rows as first built, for reinversion.
    original: Vec<f64>,
    basis: Vec<usize>,
    /// Column that is the unit vector of row `i` in `original`.
    unit: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn cost_row(&self) -> usize {
        self.rows
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > MAX_PIVOTS {
            return Err(Error::IterationLimit(MAX_PIVOTS));
        }
        let w = self.cols + 1;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                let v = self.t[r * w + j];
                if v != 0.0 {
                    self.t[i * w + j] -= f * v;
                }
            }
            self.t[i * w + c] = 0.0;
        }
        self.basis[r] = c;
        Ok(())
    }

    /// Minimizes `c` over columns with `allowed[j]`. Returns `false` if the
    /// problem is unbounded.
    fn run(&mut self, c: &[f64], allowed: &[bool]) -> Result<bool> {
        self.price(c);
        let (mut since, mut degenerate, mut tol) = (0, 0, COST_TOL);
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        loop {
            if since == REINVERT_EVERY {
                self.reinvert();
                self.price(c);
                since = 0;
            }
            let stalled = degenerate >= STALL_LIMIT;
            let improving = |tab: &Self, tol: f64| {
                let cost = tab.cost_row();
                let mut candidates = (0..tab.cols).filter(|&j| allowed[j] && tab.at(cost, j) < -tol);
                if stalled {
                    candidates.next()
                } else {
                    candidates.min_by(|&a, &b| tab.at(cost, a).total_cmp(&tab.at(cost, b)))
                }
            };
            let Some(enter) = improving(self, tol) else {
                self.reinvert();
                self.price(c);
                if improving(self, tol).is_some() {
                    since = 0;
                    continue;
                }
                return Ok(true);
            };
            let Some((r, ratio)) = self.leaving(enter, stalled) else {
                if since > 0 {
                    self.reinvert();
                    self.price(c);
                    since = 0;
                    continue;
                }
                return Ok(false);
            };
            if self.at(r, enter) < SMALL_PIVOT && since > 0 {
                self.reinvert();
                self.price(c);
                since = 0;
                continue;
            }
            self.pivot(r, enter)?;
            since += 1;
            if ratio > RATIO_TIE {
                degenerate = 0;
                seen.clear();
                continue;
            }
            degenerate += 1;
            if degenerate >= STALL_LIMIT {
                let mut basis = self.basis.clone();
                basis.sort_unstable();
                if !seen.insert(basis) {
                    // cycling on noise in the reduced costs
                    if tol >= MAX_COST_TOL {
                        return Ok(true);
                    }
                    tol *= 10.0;
                    seen.clear();
                }
            }
        }
    }

    /// Ratio test for column `enter`. Among rows whose ratio is within
    /// `RATIO_TIE` of the minimum, takes the largest pivot element, or the
    /// smallest basic index once `bland` is set.
    fn leaving(&self, enter: usize, bland: bool) -> Option<(usize, f64)> {
        let ratio = |i: usize| self.rhs(i).max(0.0) / self.at(i, enter);
        let largest = (0..self.rows).map(|i| self.at(i, enter).abs()).fold(1.0, f64::max);
        let candidates = || (0..self.rows).filter(move |&i| self.at(i, enter) > PIVOT_TOL * largest);
        let best = candidates().map(ratio).min_by(f64::total_cmp)?;
        let limit = best + RATIO_TIE * best.abs().max(1.0);
        candidates()
            .filter(|&i| ratio(i) <= limit)
            .min_by(|&a, &b| {
                if bland {
                    self.basis[a].cmp(&self.basis[b])
                } else {
                    self.at(b, enter)
                        .total_cmp(&self.at(a, enter))
                        .then(self.basis[a].cmp(&self.basis[b]))
                }
            })
            .map(|i| (i, ratio(i)))
    }

    /// Recomputes the constraint rows as `B⁻¹·original` for the current
    /// basis, discarding accumulated rounding. Leaves the tableau alone if
    /// the basis matrix is numerically singular.
    fn reinvert(&mut self) {
        let (m, w) = (self.rows, self.cols + 1);
        if m == 0 {
            return;
        }
        // augmented [B | original]
        let aw = m + w;
        let mut aug = vec![0.0; m * aw];
        for i in 0..m {
            for (k, &b) in self.basis.iter().enumerate() {
                aug[i * aw + k] = self.original[i * w + b];
            }
            aug[i * aw + m..(i + 1) * aw].copy_from_slice(&self.original[i * w..(i + 1) * w]);
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&a, &b| aug[a * aw + col].abs().total_cmp(&aug[b * aw + col].abs()))
                .unwrap_or(col);
            if aug[piv * aw + col].abs() < 1e-12 {
                return;
            }
            if piv != col {
                for j in 0..aw {
                    aug.swap(piv * aw + j, col * aw + j);
                }
            }
            let p = aug[col * aw + col];
            for j in 0..aw {
                aug[col * aw + j] /= p;
            }
            for i in 0..m {
                if i == col {
                    continue;
                }
                let f = aug[i * aw + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..aw {
                    aug[i * aw + j] -= f * aug[col * aw + j];
                }
            }
        }
        for i in 0..m {
            self.t[i * w..(i + 1) * w].copy_from_slice(&aug[i * aw + m..(i + 1) * aw]);
            // basic columns are exact unit vectors
            for (k, &b) in self.basis.iter().enumerate() {
                self.t[i * w + b] = if k == i { 1.0 } else { 0.0 };
            }
        }
    }

    /// Dual simplex pivots on rows whose basic value went negative through
    /// rounding, keeping reduced costs of `c` nonnegative. Returns whether
    /// any pivot was made.
    fn restore(&mut self, c: &[f64], allowed: &[bool]) -> Result<bool> {
        let mut moved = false;
        for _ in 0..self.rows * 4 {
            self.reinvert();
            self.price(c);
            let scale = (0..self.rows).map(|i| self.rhs(i).abs()).fold(1.0, f64::max);
            let Some(r) = (0..self.rows)
                .filter(|&i| self.rhs(i) < -NEGATIVE_TOL * scale)
                .min_by(|&a, &b| self.rhs(a).total_cmp(&self.rhs(b)))
            else {
                break;
            };
            let cost = self.cost_row();
            let largest = (0..self.cols).map(|j| self.at(r, j).abs()).fold(1.0, f64::max);
            let Some(enter) = (0..self.cols)
                .filter(|&j| allowed[j] && self.at(r, j) < -PIVOT_TOL * largest)
                .min_by(|&a, &b| {
                    let ratio = |j: usize| self.at(cost, j).max(0.0) / -self.at(r, j);
                    ratio(a).total_cmp(&ratio(b)).then(a.cmp(&b))
                })
            else {
                break;
            };
            self.pivot(r, enter)?;
            moved = true;
        }
        Ok(moved)
    }

    /// One round of iterative refinement on the basic values, using the
    /// unit columns of a freshly reinverted tableau as `B⁻¹`.
    fn refine(&mut self) {
        let (m, w) = (self.rows, self.cols + 1);
        let residual: Vec<f64> = (0..m)
            .map(|k| {
                let row = &self.original[k * w..(k + 1) * w];
                row[self.cols] - (0..m).map(|i| row[self.basis[i]] * self.rhs(i)).sum::<f64>()
            })
            .collect();
        for i in 0..m {
            let delta: f64 = (0..m).map(|k| self.at(i, self.unit[k]) * residual[k]).sum();
            self.t[i * w + self.cols] += delta;
        }
    }

    /// Rewrites the cost row as reduced costs of `c` for the current basis.
    fn price(&mut self, c: &[f64]) {
        let w = self.cols + 1;
        let cost = self.cost_row();
        for j in 0..w {
            self.t[cost * w + j] = if j < self.cols { c[j] } else { 0.0 };
        }
        for i in 0..self.rows {
            let cb = c[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for j in 0..w {
                self.t[cost * w + j] -= cb * self.t[i * w + j];
            }
        }
    }
}

/// Solves `p` up to floating point.
pub fn solve(p: &LpProblem) -> Result<LpOutcome> {
    let n = p.objective.len();
    let m = p.constraints.len();
    if let Some(bad) = p.constraints.iter().find(|c| c.coeffs.len() != n) {
        return Err(Error::Numerical(format!(
            "constraint has {} coefficients for {n} variables",
            bad.coeffs.len()
        )));
    }

    // Flip rows to a nonnegative right-hand side.
    let mut sign = vec![1.0; m];
    let mut rel = Vec::with_capacity(m);
    for (i, c) in p.constraints.iter().enumerate() {
        let r = if c.rhs < 0.0 {
            sign[i] = -1.0;
            match c.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            }
        } else {
            c.relation
        };
        rel.push(r);
    }

    // Columns: structural, one slack or surplus per inequality, one
    // artificial per row lacking a slack.
    let n_slack = rel.iter().filter(|r| **r != Relation::Eq).count();
    let n_art = rel.iter().filter(|r| **r != Relation::Le).count();
    let cols = n + n_slack + n_art;
    let w = cols + 1;
    let mut t = vec![0.0; (m + 1) * w];
    let mut basis = vec![0; m];
    let mut start_col = vec![0; m];
    let mut is_art = vec![false; cols];
    let (mut next_slack, mut next_art) = (n, n + n_slack);
    for (i, c) in p.constraints.iter().enumerate() {
        for (j, &a) in c.coeffs.iter().enumerate() {
            t[i * w + j] = sign[i] * a;
        }
        t[i * w + cols] = sign[i] * c.rhs;
        match rel[i] {
            Relation::Le => {
                t[i * w + next_slack] = 1.0;
                basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                t[i * w + next_slack] = -1.0;
                next_slack += 1;
                t[i * w + next_art] = 1.0;
                is_art[next_art] = true;
                basis[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                t[i * w + next_art] = 1.0;
                is_art[next_art] = true;
                basis[i] = next_art;
                next_art += 1;
            }
        }
        start_col[i] = basis[i];
    }
    let original = t[..m * w].to_vec();
    let mut tab = Tableau {
        rows: m,
        cols,
        t,
        original,
        basis,
        unit: start_col.clone(),
        pivots: 0,
    };

    // Phase one: minimize the sum of artificials.
    let phase_one: Vec<f64> = is_art.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
    let everything = vec![true; cols];
    tab.run(&phase_one, &everything)?;
    let infeasibility = -tab.rhs(tab.cost_row());
    let scale = p.constraints.iter().map(|c| c.rhs.abs()).fold(1.0, f64::max);
    if infeasibility > FEASIBILITY_TOL * scale {
        // Duals of the phase-one optimum: y_i = c_s − d_s for the column
        // that started basic in row i.
        let cost = tab.cost_row();
        let farkas = (0..m)
            .map(|i| {
                let s = start_col[i];
                let y = phase_one[s] - tab.at(cost, s);
                if y.abs() <= PIVOT_TOL {
                    0.0
                } else {
                    sign[i] * y
                }
            })
            .collect();
        return Ok(LpOutcome::Infeasible { farkas });
    }

    // Drive artificials out of the basis where possible.
    for i in 0..m {
        if !is_art[tab.basis[i]] {
            continue;
        }
        if let Some(j) = (0..cols).find(|&j| !is_art[j] && tab.at(i, j).abs() > PIVOT_TOL) {
            tab.pivot(i, j)?;
        }
    }

    // Phase two on the original objective, as a minimization.
    let flip = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let mut c = vec![0.0; cols];
    for (j, &v) in p.objective.iter().enumerate() {
        c[j] = flip * v;
    }
    let allowed: Vec<bool> = is_art.iter().map(|a| !a).collect();
    if !tab.run(&c, &allowed)? {
        return Ok(LpOutcome::Unbounded);
    }
    for _ in 0..3 {
        if !tab.restore(&c, &allowed)? {
            break;
        }
        if !tab.run(&c, &allowed)? {
            return Ok(LpOutcome::Unbounded);
        }
    }

    tab.reinvert();
    tab.refine();
    tab.refine();
    let mut x = vec![0.0; n];
    for i in 0..m {
        let b = tab.basis[i];
        if b < n {
            x[b] = tab.rhs(i).max(0.0);
        }
    }
    let value = p.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
    Ok(LpOutcome::Optimal { value, x })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(coeffs: &[f64], relation: Relation, rhs: f64) -> LinConstraint {
        LinConstraint {
            coeffs: coeffs.to_vec(),
            relation,
            rhs,
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let p = LpProblem {
            objective: vec![3.0, 5.0],
            sense: Sense::Maximize,
            constraints: vec![
                row(&[1.0, 0.0], Relation::Le, 4.0),
                row(&[0.0, 2.0], Relation::Le, 12.0),
                row(&[3.0, 2.0], Relation::Le, 18.0),
            ],
        };
        let LpOutcome::Optimal { value, x } = solve(&p).unwrap() else {
            panic!()
        };
        assert!((value - 36.0).abs() < 1e-9);
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + 2y, x + y = 1, y ≥ 0.25
        let p = LpProblem {
            objective: vec![1.0, 2.0],
            sense: Sense::Minimize,
            constraints: vec![
                row(&[1.0, 1.0], Relation::Eq, 1.0),
                row(&[0.0, 1.0], Relation::Ge, 0.25),
            ],
        };
        let LpOutcome::Optimal { value, .. } = solve(&p).unwrap() else {
            panic!()
        };
        assert!((value - 1.25).abs() < 1e-12);
    }

    #[test]
    fn infeasible_with_certificate() {
        // x + y ≤ 1, x + y ≥ 2
        let p = LpProblem {
            objective: vec![0.0, 0.0],
            sense: Sense::Minimize,
            constraints: vec![
                row(&[1.0, 1.0], Relation::Le, 1.0),
                row(&[1.0, 1.0], Relation::Ge, 2.0),
                row(&[1.0, 0.0], Relation::Le, 5.0),
            ],
        };
        let LpOutcome::Infeasible { farkas } = solve(&p).unwrap() else {
            panic!()
        };
        assert!(farkas[0] != 0.0 && farkas[1] != 0.0);
        assert_eq!(farkas[2], 0.0);
    }

    #[test]
    fn unbounded() {
        let p = LpProblem {
            objective: vec![1.0, 0.0],
            sense: Sense::Maximize,
            constraints: vec![row(&[1.0, -1.0], Relation::Le, 1.0)],
        };
        assert_eq!(solve(&p).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let p = LpProblem {
            objective: vec![1.0, 1.0, 0.0],
            sense: Sense::Maximize,
            constraints: vec![
                row(&[1.0, 1.0, 1.0], Relation::Eq, 1.0),
                row(&[2.0, 2.0, 2.0], Relation::Eq, 2.0),
                row(&[0.0, 0.0, 1.0], Relation::Ge, 0.5),
            ],
        };
        let LpOutcome::Optimal { value, .. } = solve(&p).unwrap() else {
            panic!()
        };
        assert!((value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the largest-coefficient rule.
        let p = LpProblem {
            objective: vec![0.75, -150.0, 0.02, -6.0],
            sense: Sense::Maximize,
            constraints: vec![
                row(&[0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0),
                row(&[0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0),
                row(&[0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0),
            ],
        };
        let LpOutcome::Optimal { value, .. } = solve(&p).unwrap() else {
            panic!()
        };
        assert!((value - 0.05).abs() < 1e-9, "{value}");
    }
}
