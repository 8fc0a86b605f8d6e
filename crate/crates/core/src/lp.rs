//! Self-contained dense linear programming and rank kernel.
//!
//! Problems here are tiny (dimensions on the order of n + m + q), so the
//! solver favors determinism over speed: a two-phase dense simplex with
//! Bland's anti-cycling rule, free variables split into positive and
//! negative parts, and artificial variables driven out (or their redundant
//! rows dropped) before phase two.

use thiserror::Error;

use crate::linalg::{clean_zero, dot};

/// Constraint satisfaction tolerance for reported solutions.
pub const LP_TOL: f64 = 1e-9;
/// Smallest pivot magnitude the elimination will accept.
pub const PIVOT_TOL: f64 = 1e-12;
/// Default relative threshold for the rank computation.
pub const RANK_TOL: f64 = 1e-10;

/// Lower-bound kind for one variable. Upper bounds, when needed, are encoded
/// as inequality rows by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

/// Maximize `objective . x` subject to `a_eq x = b_eq`, `a_ge x >= b_ge`,
/// and the per-variable lower bounds.
#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub a_ge: Vec<Vec<f64>>,
    pub b_ge: Vec<f64>,
    pub bounds: Vec<VarBound>,
}

impl LpProblem {
    fn dimension(&self) -> usize {
        self.bounds.len()
    }

    fn check_dimensions(&self) -> Result<(), LpError> {
        let n = self.dimension();
        let ok = self.objective.len() == n
            && self.a_eq.len() == self.b_eq.len()
            && self.a_ge.len() == self.b_ge.len()
            && self.a_eq.iter().all(|r| r.len() == n)
            && self.a_ge.iter().all(|r| r.len() == n);
        if !ok {
            return Err(LpError::Shape);
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.b_eq.iter().chain(&self.b_ge).all(|v| v.is_finite())
            && self
                .a_eq
                .iter()
                .chain(&self.a_ge)
                .flatten()
                .all(|v| v.is_finite());
        if !finite {
            return Err(LpError::Shape);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<f64>),
    Infeasible,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("inconsistent problem dimensions or non-finite entries")]
    Shape,
    #[error("numerical breakdown: no admissible pivot above {PIVOT_TOL:e}")]
    NumericalBreakdown,
}

/// Solves the LP with a two-phase dense simplex.
pub fn solve_lp(problem: &LpProblem) -> Result<LpOutcome, LpError> {
    problem.check_dimensions()?;
    let mut tableau = Tableau::build(problem);
    match tableau.phase_one()? {
        PhaseOne::Infeasible => return Ok(LpOutcome::Infeasible),
        PhaseOne::Feasible => {}
    }
    match tableau.phase_two()? {
        PhaseTwo::Unbounded => Ok(LpOutcome::Unbounded),
        PhaseTwo::Optimal => {
            let x = tableau.extract(problem);
            let value = dot(&problem.objective, &x);
            Ok(LpOutcome::Optimal { x, value })
        }
    }
}

/// Phase-one wrapper: returns some point satisfying the system within
/// [`LP_TOL`], or a proof of infeasibility via a positive phase-one optimum.
pub fn feasible_point(
    a_eq: &[Vec<f64>],
    b_eq: &[f64],
    a_ge: &[Vec<f64>],
    b_ge: &[f64],
    bounds: &[VarBound],
) -> Result<Feasibility, LpError> {
    let problem = LpProblem {
        objective: vec![0.0; bounds.len()],
        a_eq: a_eq.to_vec(),
        b_eq: b_eq.to_vec(),
        a_ge: a_ge.to_vec(),
        b_ge: b_ge.to_vec(),
        bounds: bounds.to_vec(),
    };
    problem.check_dimensions()?;
    let mut tableau = Tableau::build(&problem);
    match tableau.phase_one()? {
        PhaseOne::Infeasible => Ok(Feasibility::Infeasible),
        PhaseOne::Feasible => Ok(Feasibility::Feasible(tableau.extract(&problem))),
    }
}

/// Solves the system `a_eq x = b_eq`, `a_ge x >= b_ge` over free variables
/// for a solution of minimum 1-norm, via the standard envelope
/// reformulation (`s_i >= |x_i|`, minimize `sum s`). Small solutions keep
/// downstream step-length and residual arithmetic well scaled.
pub fn smallest_l1_point(
    a_eq: &[Vec<f64>],
    b_eq: &[f64],
    a_ge: &[Vec<f64>],
    b_ge: &[f64],
    n: usize,
) -> Result<Feasibility, LpError> {
    let pad = |row: &Vec<f64>| -> Vec<f64> {
        let mut extended = row.clone();
        extended.extend(std::iter::repeat_n(0.0, n));
        extended
    };
    let mut objective = vec![0.0; n];
    objective.extend(std::iter::repeat_n(-1.0, n));
    let mut a_ge_ext: Vec<Vec<f64>> = a_ge.iter().map(pad).collect();
    let mut b_ge_ext = b_ge.to_vec();
    for i in 0..n {
        // s_i - x_i >= 0 and s_i + x_i >= 0
        let mut row = vec![0.0; 2 * n];
        row[i] = -1.0;
        row[n + i] = 1.0;
        a_ge_ext.push(row);
        b_ge_ext.push(0.0);
        let mut row = vec![0.0; 2 * n];
        row[i] = 1.0;
        row[n + i] = 1.0;
        a_ge_ext.push(row);
        b_ge_ext.push(0.0);
    }
    let mut bounds = vec![VarBound::Free; n];
    bounds.extend(std::iter::repeat_n(VarBound::NonNegative, n));
    let problem = LpProblem {
        objective,
        a_eq: a_eq.iter().map(pad).collect(),
        b_eq: b_eq.to_vec(),
        a_ge: a_ge_ext,
        b_ge: b_ge_ext,
        bounds,
    };
    match solve_lp(&problem)? {
        LpOutcome::Optimal { x, .. } => Ok(Feasibility::Feasible(x[..n].to_vec())),
        LpOutcome::Infeasible => Ok(Feasibility::Infeasible),
        // the objective -sum s is bounded above by zero
        LpOutcome::Unbounded => Err(LpError::NumericalBreakdown),
    }
}

/// Numerical rank by Gaussian elimination with partial pivoting. A pivot is
/// counted when it exceeds `tol` times the matrix scale.
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = rows.len();
    let n = rows[0].len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let scale = a.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let threshold = tol * scale.max(1.0);
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        let (best_row, best) = (r..m)
            .map(|i| (i, a[i][col].abs()))
            .fold((r, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best <= threshold {
            continue;
        }
        a.swap(r, best_row);
        for i in (r + 1)..m {
            let factor = a[i][col] / a[r][col];
            if factor != 0.0 {
                let (pivot_rows, rest) = a.split_at_mut(r + 1);
                let pivot = &pivot_rows[r];
                let target = &mut rest[i - r - 1];
                for j in col..n {
                    target[j] -= factor * pivot[j];
                }
            }
        }
        r += 1;
    }
    r
}

// ---------------------------------------------------------------------------
// Simplex internals
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum ColumnKind {
    /// Structural column: (original variable index, sign).
    Structural(usize, f64),
    Surplus,
    Artificial,
}

struct Tableau {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    /// Phase-two cost (minimization form) per column.
    cost: Vec<f64>,
}

enum PhaseOne {
    Feasible,
    Infeasible,
}

enum PhaseTwo {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn build(problem: &LpProblem) -> Tableau {
        let mut kinds = Vec::new();
        let mut cost = Vec::new();
        // structural columns: split free variables into x+ - x-
        for (j, bound) in problem.bounds.iter().enumerate() {
            kinds.push(ColumnKind::Structural(j, 1.0));
            cost.push(-problem.objective[j]);
            if matches!(bound, VarBound::Free) {
                kinds.push(ColumnKind::Structural(j, -1.0));
                cost.push(problem.objective[j]);
            }
        }
        let n_structural = kinds.len();
        let n_ge = problem.a_ge.len();
        for _ in 0..n_ge {
            kinds.push(ColumnKind::Surplus);
            cost.push(0.0);
        }
        let m = problem.a_eq.len() + n_ge;
        for _ in 0..m {
            kinds.push(ColumnKind::Artificial);
            cost.push(0.0);
        }
        let ncols = kinds.len();

        let mut a = vec![vec![0.0; ncols]; m];
        let mut b = vec![0.0; m];
        let rows = problem
            .a_eq
            .iter()
            .zip(&problem.b_eq)
            .map(|(r, rhs)| (r, rhs, None))
            .chain(
                problem
                    .a_ge
                    .iter()
                    .zip(&problem.b_ge)
                    .enumerate()
                    .map(|(k, (r, rhs))| (r, rhs, Some(k))),
            );
        for (i, (row, rhs, surplus)) in rows.enumerate() {
            let mut col = 0;
            for (j, bound) in problem.bounds.iter().enumerate() {
                a[i][col] = row[j];
                col += 1;
                if matches!(bound, VarBound::Free) {
                    a[i][col] = -row[j];
                    col += 1;
                }
            }
            if let Some(k) = surplus {
                a[i][n_structural + k] = -1.0;
            }
            b[i] = *rhs;
            if b[i] < 0.0 {
                for v in a[i].iter_mut() {
                    *v = -*v;
                }
                b[i] = -b[i];
            }
            let art = n_structural + n_ge + i;
            a[i][art] = 1.0;
        }
        let basis = (0..m).map(|i| n_structural + n_ge + i).collect();
        Tableau {
            a,
            b,
            basis,
            kinds,
            cost,
        }
    }

    fn ncols(&self) -> usize {
        self.kinds.len()
    }

    fn is_artificial(&self, col: usize) -> bool {
        matches!(self.kinds[col], ColumnKind::Artificial)
    }

    /// Reduced costs for a minimization cost vector, given the current basis.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = cost[bi];
            if cb != 0.0 {
                for (dj, aij) in d.iter_mut().zip(&self.a[i]) {
                    *dj -= cb * aij;
                }
            }
        }
        d
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.a[row][col];
        for v in self.a[row].iter_mut() {
            *v /= p;
        }
        self.b[row] /= p;
        for i in 0..self.a.len() {
            if i == row {
                continue;
            }
            let factor = self.a[i][col];
            if factor != 0.0 {
                for j in 0..self.ncols() {
                    self.a[i][j] -= factor * self.a[row][j];
                }
                self.a[i][col] = 0.0;
                self.b[i] -= factor * self.b[row];
                if self.b[i].abs() < 1e-14 {
                    self.b[i] = 0.0;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule iteration for minimizing `cost`. `allow_artificial`
    /// controls whether artificial columns may enter.
    fn iterate(&mut self, cost: &[f64], allow_artificial: bool) -> Result<PhaseTwo, LpError> {
        loop {
            let d = self.reduced_costs(cost);
            let entering = (0..self.ncols()).find(|&j| {
                d[j] < -1e-11
                    && (allow_artificial || !self.is_artificial(j))
                    && !self.basis.contains(&j)
            });
            let Some(col) = entering else {
                return Ok(PhaseTwo::Optimal);
            };
            let mut leaving: Option<(usize, f64)> = None;
            let mut tiny_positive = false;
            for i in 0..self.a.len() {
                let aij = self.a[i][col];
                if aij > PIVOT_TOL {
                    let ratio = self.b[i] / aij;
                    match leaving {
                        None => leaving = Some((i, ratio)),
                        Some((best_i, best)) => {
                            // Bland: break ratio ties on the smallest basic
                            // variable index
                            if ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[i] < self.basis[best_i])
                            {
                                leaving = Some((i, ratio));
                            }
                        }
                    }
                } else if aij > 1e-14 {
                    tiny_positive = true;
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None if tiny_positive => return Err(LpError::NumericalBreakdown),
                None => return Ok(PhaseTwo::Unbounded),
            }
        }
    }

    fn phase_one(&mut self) -> Result<PhaseOne, LpError> {
        let cost: Vec<f64> = self
            .kinds
            .iter()
            .map(|k| match k {
                ColumnKind::Artificial => 1.0,
                _ => 0.0,
            })
            .collect();
        match self.iterate(&cost, false)? {
            PhaseTwo::Unbounded => unreachable!("phase one is bounded below by zero"),
            PhaseTwo::Optimal => {}
        }
        let infeasibility: f64 = self
            .basis
            .iter()
            .zip(&self.b)
            .filter(|(col, _)| self.is_artificial(**col))
            .map(|(_, v)| v)
            .sum();
        if infeasibility > LP_TOL {
            return Ok(PhaseOne::Infeasible);
        }
        self.evict_artificials()?;
        Ok(PhaseOne::Feasible)
    }

    /// Pivots basic artificials (at zero) onto structural columns, dropping
    /// rows that turn out redundant.
    fn evict_artificials(&mut self) -> Result<(), LpError> {
        let mut row = 0;
        while row < self.a.len() {
            if !self.is_artificial(self.basis[row]) {
                row += 1;
                continue;
            }
            if self.b[row] > LP_TOL {
                return Err(LpError::NumericalBreakdown);
            }
            let replacement = (0..self.ncols())
                .find(|&j| !self.is_artificial(j) && self.a[row][j].abs() > PIVOT_TOL);
            match replacement {
                Some(col) => {
                    self.pivot(row, col);
                    row += 1;
                }
                None => {
                    // redundant constraint row
                    self.a.remove(row);
                    self.b.remove(row);
                    self.basis.remove(row);
                }
            }
        }
        // artificial columns can no longer enter; zero them out so reduced
        // costs ignore them entirely
        for i in 0..self.a.len() {
            for j in 0..self.ncols() {
                if self.is_artificial(j) {
                    self.a[i][j] = 0.0;
                }
            }
        }
        Ok(())
    }

    fn phase_two(&mut self) -> Result<PhaseTwo, LpError> {
        let cost = self.cost.clone();
        self.iterate(&cost, false)
    }

    fn extract(&self, problem: &LpProblem) -> Vec<f64> {
        let mut x = vec![0.0; problem.dimension()];
        for (i, &col) in self.basis.iter().enumerate() {
            if let ColumnKind::Structural(j, sign) = self.kinds[col] {
                x[j] += sign * self.b[i];
            }
        }
        for v in x.iter_mut() {
            *v = clean_zero(*v);
        }
        x
    }
}

/// Maximum violation of the system by `x`: equality residuals, inequality
/// shortfalls, and bound violations.
pub fn residual(problem: &LpProblem, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (row, rhs) in problem.a_eq.iter().zip(&problem.b_eq) {
        worst = worst.max((dot(row, x) - rhs).abs());
    }
    for (row, rhs) in problem.a_ge.iter().zip(&problem.b_ge) {
        worst = worst.max(rhs - dot(row, x));
    }
    for (xi, bound) in x.iter().zip(&problem.bounds) {
        if matches!(bound, VarBound::NonNegative) {
            worst = worst.max(-xi);
        }
    }
    worst.max(0.0)
}
