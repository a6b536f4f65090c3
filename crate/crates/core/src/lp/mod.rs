//! Exact rational linear programming.
//!
//! Equality-constrained standard form: minimize c'x subject to Ax = b,
//! x >= 0, all data rational. Redundant rows are dropped by rational
//! Gaussian elimination, then a two-phase revised simplex with Bland's
//! anti-cycling rule runs to optimality. Results are basic solutions with
//! an exact optimality certificate (no negative reduced cost).

mod transport;

pub use transport::{solve_transportation, TransportationSolution};

use crate::error::{Error, Result};
use crate::rational::Rational;
use num::{Signed, Zero};

#[derive(Clone, Debug)]
pub struct LinearProgram {
    /// Minimization objective, one coefficient per variable.
    pub objective: Vec<Rational>,
    /// Equality constraint rows.
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct BasicSolution {
    pub status: Status,
    /// Value per variable; empty unless optimal.
    pub values: Vec<Rational>,
    /// Basic variable indices, sorted; |basis| = number of independent rows.
    pub basis: Vec<usize>,
    pub objective_value: Rational,
}

impl BasicSolution {
    fn of_status(status: Status) -> Self {
        BasicSolution {
            status,
            values: Vec::new(),
            basis: Vec::new(),
            objective_value: Rational::zero(),
        }
    }

    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, _)| j)
            .collect()
    }
}

impl LinearProgram {
    fn check(&self) -> Result<()> {
        if self.rows.len() != self.rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows, {} right-hand sides",
                self.rows.len(),
                self.rhs.len()
            )));
        }
        let n = self.objective.len();
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} coefficients for {n} variables",
                    row.len()
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of row reduction: which original rows are independent, or proof
/// that the system is inconsistent.
fn independent_rows(rows: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<usize>> {
    let m = rows.len();
    if m == 0 {
        return Some(Vec::new());
    }
    let n = rows[0].len();
    let mut work: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let mut kept = Vec::new();
    let mut used = vec![false; m];
    for col in 0..n {
        let Some(pivot_row) = (0..m).find(|&r| !used[r] && !work[r][col].is_zero()) else {
            continue;
        };
        used[pivot_row] = true;
        kept.push(pivot_row);
        let pivot = work[pivot_row][col].clone();
        let pivot_vals: Vec<Rational> = work[pivot_row].iter().map(|v| v / &pivot).collect();
        for r in 0..m {
            if used[r] && r != pivot_row {
                continue;
            }
            if r == pivot_row {
                continue;
            }
            if work[r][col].is_zero() {
                continue;
            }
            let factor = work[r][col].clone();
            for c in col..=n {
                let delta = &pivot_vals[c] * &factor;
                work[r][c] -= delta;
            }
        }
    }
    // any remaining row must be all-zero including its rhs
    for r in 0..m {
        if used[r] {
            continue;
        }
        if work[r][..n].iter().all(|v| v.is_zero()) {
            if !work[r][n].is_zero() {
                return None; // 0 = nonzero: inconsistent
            }
        } else {
            // unreachable: a nonzero row would have supplied a pivot
            unreachable!("row neither used nor reduced to zero");
        }
    }
    kept.sort_unstable();
    Some(kept)
}

struct Simplex {
    /// Sparse columns of the constraint matrix (artificials excluded).
    columns: Vec<Vec<(usize, Rational)>>,
    num_rows: usize,
    /// Basis inverse, dense.
    binv: Vec<Vec<Rational>>,
    /// Basic variable per row; indices >= columns.len() are artificials.
    basis: Vec<usize>,
    /// Membership flags for basis variables, structural and artificial.
    in_basis: Vec<bool>,
    /// Current basic values, binv * b.
    xb: Vec<Rational>,
}

impl Simplex {
    fn column(&self, j: usize) -> Option<&[(usize, Rational)]> {
        self.columns.get(j).map(|c| c.as_slice())
    }

    /// binv * A_j for a structural column, or the artificial unit column.
    fn direction(&self, j: usize) -> Vec<Rational> {
        if let Some(col) = self.column(j) {
            let mut d = vec![Rational::zero(); self.num_rows];
            for (i, row) in self.binv.iter().enumerate() {
                let mut acc = Rational::zero();
                for (r, v) in col {
                    acc += &row[*r] * v;
                }
                d[i] = acc;
            }
            d
        } else {
            let r = j - self.columns.len();
            self.binv.iter().map(|row| row[r].clone()).collect()
        }
    }

    /// Reduced cost of column j given the simplex multipliers y.
    fn reduced_cost(&self, j: usize, cost: &dyn Fn(usize) -> Rational, y: &[Rational]) -> Rational {
        let mut rc = cost(j);
        if let Some(col) = self.column(j) {
            for (r, v) in col {
                rc -= &y[*r] * v;
            }
        } else {
            rc -= y[j - self.columns.len()].clone();
        }
        rc
    }

    fn multipliers(&self, cost: &dyn Fn(usize) -> Rational) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.num_rows];
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = cost(bj);
            if cb.is_zero() {
                continue;
            }
            for (r, yr) in y.iter_mut().enumerate() {
                *yr += &cb * &self.binv[i][r];
            }
        }
        y
    }

    fn pivot(&mut self, entering: usize, row: usize, direction: &[Rational]) {
        let pivot = direction[row].clone();
        for c in 0..self.num_rows {
            self.binv[row][c] /= &pivot;
        }
        self.xb[row] /= &pivot;
        for i in 0..self.num_rows {
            if i == row || direction[i].is_zero() {
                continue;
            }
            let factor = direction[i].clone();
            for c in 0..self.num_rows {
                let delta = &self.binv[row][c] * &factor;
                self.binv[i][c] -= delta;
            }
            let delta = &self.xb[row] * &factor;
            self.xb[i] -= delta;
        }
        self.in_basis[self.basis[row]] = false;
        self.in_basis[entering] = true;
        self.basis[row] = entering;
    }

    /// Runs simplex to optimality with Bland's rule. `eligible` bounds the
    /// entering candidates (structural variables only in phase 2).
    fn run(&mut self, cost: &dyn Fn(usize) -> Rational, eligible: usize) -> Status {
        loop {
            let y = self.multipliers(cost);
            let mut entering = None;
            for j in 0..eligible {
                if self.in_basis[j] {
                    continue;
                }
                if self.reduced_cost(j, cost, &y).is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(entering) = entering else {
                return Status::Optimal;
            };
            let direction = self.direction(entering);
            // ratio test; Bland tie-break by smallest basic variable index
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.num_rows {
                if !direction[i].is_positive() {
                    continue;
                }
                let ratio = &self.xb[i] / &direction[i];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((best_i, best)) => {
                        if ratio < *best
                            || (ratio == *best && self.basis[i] < self.basis[*best_i])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Status::Unbounded;
            };
            self.pivot(entering, row, &direction);
        }
    }

    fn objective(&self, cost: &dyn Fn(usize) -> Rational) -> Rational {
        self.basis
            .iter()
            .zip(&self.xb)
            .fold(Rational::zero(), |acc, (&j, x)| acc + cost(j) * x)
    }
}

/// Solves the program exactly. When optimal, the returned solution is basic
/// (vertex): at most one nonzero per independent row, and every reduced cost
/// is nonnegative.
pub fn solve_lp(lp: &LinearProgram) -> Result<BasicSolution> {
    lp.check()?;
    let n = lp.objective.len();
    let Some(kept) = independent_rows(&lp.rows, &lp.rhs) else {
        return Ok(BasicSolution::of_status(Status::Infeasible));
    };
    let m = kept.len();
    if m == 0 {
        // no constraints: optimum is 0 at the origin unless some cost is negative
        if lp.objective.iter().any(|c| c.is_negative()) {
            return Ok(BasicSolution::of_status(Status::Unbounded));
        }
        return Ok(BasicSolution {
            status: Status::Optimal,
            values: vec![Rational::zero(); n],
            basis: Vec::new(),
            objective_value: Rational::zero(),
        });
    }

    // orient rows so b >= 0, build sparse columns
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for &r in &kept {
        if lp.rhs[r].is_negative() {
            rows.push(lp.rows[r].iter().map(|v| -v).collect());
            rhs.push(-lp.rhs[r].clone());
        } else {
            rows.push(lp.rows[r].clone());
            rhs.push(lp.rhs[r].clone());
        }
    }
    let mut columns: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                columns[j].push((i, v.clone()));
            }
        }
    }

    let identity = |size: usize| -> Vec<Vec<Rational>> {
        (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| {
                        if i == j {
                            Rational::from_integer(1.into())
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect()
    };

    let mut in_basis = vec![false; n + m];
    for flag in in_basis.iter_mut().skip(n) {
        *flag = true;
    }
    let mut simplex = Simplex {
        columns,
        num_rows: m,
        binv: identity(m),
        basis: (n..n + m).collect(),
        in_basis,
        xb: rhs,
    };

    // phase 1: minimize the sum of artificials; once an artificial leaves
    // the basis it is dropped, which is sound and keeps Bland's rule fast
    let phase1 = |j: usize| -> Rational {
        if j >= n {
            Rational::from_integer(1.into())
        } else {
            Rational::zero()
        }
    };
    let status = simplex.run(&phase1, n);
    debug_assert_eq!(status, Status::Optimal, "phase 1 cannot be unbounded");
    if simplex.objective(&phase1).is_positive() {
        return Ok(BasicSolution::of_status(Status::Infeasible));
    }
    // drive any zero-valued artificials out of the basis
    for row in 0..m {
        if simplex.basis[row] < n {
            continue;
        }
        let mut replaced = false;
        for j in 0..n {
            if simplex.in_basis[j] {
                continue;
            }
            let d = simplex.direction(j);
            if !d[row].is_zero() {
                simplex.pivot(j, row, &d);
                replaced = true;
                break;
            }
        }
        // rows are independent, so a replacement always exists
        debug_assert!(replaced, "artificial stuck in basis on independent rows");
    }

    // phase 2 over the structural variables
    let objective = lp.objective.clone();
    let phase2 = move |j: usize| -> Rational {
        objective.get(j).cloned().unwrap_or_else(Rational::zero)
    };
    match simplex.run(&phase2, n) {
        Status::Unbounded => Ok(BasicSolution::of_status(Status::Unbounded)),
        Status::Infeasible => unreachable!(),
        Status::Optimal => {
            let mut values = vec![Rational::zero(); n];
            for (i, &j) in simplex.basis.iter().enumerate() {
                debug_assert!(j < n);
                values[j] = simplex.xb[i].clone();
            }
            let objective_value = lp
                .objective
                .iter()
                .zip(&values)
                .fold(Rational::zero(), |acc, (c, v)| acc + c * v);
            let mut basis = simplex.basis.clone();
            basis.sort_unstable();
            Ok(BasicSolution {
                status: Status::Optimal,
                values,
                basis,
                objective_value,
            })
        }
    }
}

/// Solves the square system M y = r by rational Gaussian elimination.
/// Returns None when M is singular.
fn solve_square(mut m: Vec<Vec<Rational>>, mut r: Vec<Rational>) -> Option<Vec<Rational>> {
    let size = m.len();
    let mut perm: Vec<usize> = (0..size).collect();
    for col in 0..size {
        let pivot_row = (col..size).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, pivot_row);
        r.swap(col, pivot_row);
        perm.swap(col, pivot_row);
        let pivot = m[col][col].clone();
        for c in col..size {
            m[col][c] /= &pivot;
        }
        r[col] /= &pivot;
        for i in 0..size {
            if i == col || m[i][col].is_zero() {
                continue;
            }
            let factor = m[i][col].clone();
            for c in col..size {
                let delta = &m[col][c] * &factor;
                m[i][c] -= delta;
            }
            let delta = &r[col] * &factor;
            r[i] -= delta;
        }
    }
    Some(r)
}

/// Re-verifies the optimality certificate of a basic solution: primal
/// feasibility, support inside the basis, and nonnegative reduced cost for
/// every variable under the multipliers of the returned basis. All exact.
pub fn verify_optimality(lp: &LinearProgram, sol: &BasicSolution) -> bool {
    if sol.status != Status::Optimal {
        return false;
    }
    let n = lp.objective.len();
    if sol.values.len() != n {
        return false;
    }
    if sol.values.iter().any(|v| v.is_negative()) {
        return false;
    }
    for (row, b) in lp.rows.iter().zip(&lp.rhs) {
        let lhs = row
            .iter()
            .zip(&sol.values)
            .fold(Rational::zero(), |acc, (a, x)| acc + a * x);
        if lhs != *b {
            return false;
        }
    }
    for j in sol.support() {
        if !sol.basis.contains(&j) {
            return false;
        }
    }
    let Some(kept) = independent_rows(&lp.rows, &lp.rhs) else {
        return false;
    };
    if sol.basis.len() != kept.len() {
        return false;
    }
    // multipliers y solve B^T y = c_B over the independent rows
    let bt: Vec<Vec<Rational>> = sol
        .basis
        .iter()
        .map(|&j| kept.iter().map(|&r| lp.rows[r][j].clone()).collect())
        .collect();
    let cb: Vec<Rational> = sol.basis.iter().map(|&j| lp.objective[j].clone()).collect();
    let Some(y) = solve_square(bt, cb) else {
        return false;
    };
    for j in 0..n {
        let mut rc = lp.objective[j].clone();
        for (pos, &r) in kept.iter().enumerate() {
            rc -= &y[pos] * &lp.rows[r][j];
        }
        if rc.is_negative() {
            return false;
        }
    }
    true
}
