//! Bounded-variable primal revised simplex.
//!
//! Every row `i` gets a logical column `e_i`: bounds `[0, inf)` for a `<=`
//! row and `[0, 0]` for an equality. Rows the crash basis cannot make
//! feasible receive an artificial column and a phase 1 that minimizes the
//! artificials; phase 2 then runs on the real objective with the
//! artificials fixed at zero.
//!
//! The basis inverse is kept explicitly (row-major, dense) and updated with
//! a product-form step restricted to the nonzeros of the pivot row and
//! column. It is rebuilt from the identity every [`REINVERT_EVERY`] pivots,
//! which also recomputes the basic values from scratch.

use crate::error::{Error, Result};

pub const REINVERT_EVERY: usize = 50;
pub const MAX_PIVOTS: usize = 1_000_000;
/// Consecutive degenerate pivots before switching to Bland's rule.
pub const BLAND_AFTER: usize = 1000;

const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const ZERO_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
}

/// `min c x` subject to `A x (<=|=) rhs`, `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    /// Row-sparse constraint matrix: `(variable, coefficient)` per row.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub senses: Vec<RowSense>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Magnitude the feasibility threshold scales with.
    pub tolerance_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    /// Structural values (meaningful when `status` is `Optimal`).
    pub x: Vec<f64>,
    pub pivots: usize,
}

impl LpProblem {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars;
        let m = self.rows.len();
        if self.objective.len() != n || self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Shape("objective or bound vectors do not match the variable count".into()));
        }
        if self.senses.len() != m || self.rhs.len() != m {
            return Err(Error::Shape("row senses or right-hand sides do not match the row count".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                if j >= n {
                    return Err(Error::Index(format!("row {i} references variable {j} of {n}")));
                }
                if !v.is_finite() {
                    return Err(Error::Argument(format!("non-finite coefficient in row {i}")));
                }
            }
        }
        for j in 0..n {
            if !self.lower[j].is_finite() || self.upper[j].is_nan() || !self.objective[j].is_finite() {
                return Err(Error::Argument(format!(
                    "variable {j} needs a finite lower bound and objective coefficient"
                )));
            }
        }
        if self.rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("non-finite right-hand side".into()));
        }
        Ok(())
    }
}

struct Simplex {
    m: usize,
    /// Column-sparse matrix over structurals, logicals and artificials.
    cols: Vec<Vec<(usize, f64)>>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    position: Vec<Option<usize>>,
    binv: Vec<f64>,
    /// Simplex multipliers `c_B B^-1`, updated with every basis change.
    y: Vec<f64>,
    rhs: Vec<f64>,
    feas_tol: f64,
    pivots: usize,
    since_reinvert: usize,
    degenerate_run: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl Simplex {
    fn binv_row(&self, r: usize) -> &[f64] {
        &self.binv[r * self.m..(r + 1) * self.m]
    }

    /// `B^-1 a_j`
    fn ftran(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let m = self.m;
        for &(i, a) in &self.cols[j] {
            for (r, o) in out.iter_mut().enumerate() {
                *o += self.binv[r * m + i] * a;
            }
        }
    }

    fn duals(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (r, &j) in self.basis.iter().enumerate() {
            let c = self.cost[j];
            if c != 0.0 {
                for (yi, b) in y.iter_mut().zip(self.binv_row(r)) {
                    *yi += c * b;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64]) -> f64 {
        self.cost[j] - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>()
    }

    /// Replace the basic column at position `r` using `alpha = B^-1 a_q`.
    fn update_inverse(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let piv = alpha[r];
        let row_nz: Vec<usize> = (0..m).filter(|&c| self.binv[r * m + c] != 0.0).collect();
        for &c in &row_nz {
            self.binv[r * m + c] /= piv;
        }
        for (k, &ak) in alpha.iter().enumerate() {
            if k == r || ak == 0.0 {
                continue;
            }
            for &c in &row_nz {
                let v = self.binv[r * m + c];
                self.binv[k * m + c] -= ak * v;
            }
        }
    }

    fn set_basic(&mut self, r: usize, j: usize) {
        let old = self.basis[r];
        self.position[old] = None;
        self.basis[r] = j;
        self.position[j] = Some(r);
    }

    /// Rebuild `B^-1` by pivoting the current basic columns into the
    /// identity, then recompute the basic values.
    fn reinvert(&mut self) -> Result<()> {
        let m = self.m;
        let target = self.basis.clone();
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            self.binv[i * m + i] = 1.0;
        }
        // position r is held by the placeholder e_r until claimed
        let mut claimed = vec![false; m];
        let mut placed: Vec<Option<usize>> = vec![None; m];
        let is_unit = |cols: &Vec<Vec<(usize, f64)>>, j: usize| -> Option<usize> {
            match cols[j].as_slice() {
                [(i, v)] if *v == 1.0 => Some(*i),
                _ => None,
            }
        };
        let unit_rows: Vec<bool> = {
            let mut u = vec![false; m];
            for &j in &target {
                if let Some(i) = is_unit(&self.cols, j) {
                    u[i] = true;
                }
            }
            u
        };
        let mut alpha = vec![0.0; m];
        let mut deferred_units = Vec::new();
        for &j in &target {
            if let Some(i) = is_unit(&self.cols, j) {
                deferred_units.push((i, j));
                continue;
            }
            self.ftran(j, &mut alpha);
            let pick = |prefer_free: bool| {
                (0..m)
                    .filter(|&r| !claimed[r] && (!prefer_free || !unit_rows[r]))
                    .max_by(|&a, &b| alpha[a].abs().total_cmp(&alpha[b].abs()))
            };
            let r = match pick(true) {
                Some(r) if alpha[r].abs() > PIVOT_TOL => r,
                _ => match pick(false) {
                    Some(r) if alpha[r].abs() > PIVOT_TOL => r,
                    _ => return Err(Error::Degenerate("basis matrix became singular".into())),
                },
            };
            self.update_inverse(r, &alpha);
            claimed[r] = true;
            placed[r] = Some(j);
        }
        for (i, j) in deferred_units {
            if claimed[i] {
                // its natural slot was taken; pivot it in like any column
                self.ftran(j, &mut alpha);
                let r = (0..m)
                    .filter(|&r| !claimed[r])
                    .max_by(|&a, &b| alpha[a].abs().total_cmp(&alpha[b].abs()))
                    .filter(|&r| alpha[r].abs() > PIVOT_TOL)
                    .ok_or_else(|| Error::Degenerate("basis matrix became singular".into()))?;
                self.update_inverse(r, &alpha);
                claimed[r] = true;
                placed[r] = Some(j);
            } else {
                claimed[i] = true;
                placed[i] = Some(j);
            }
        }
        for p in &mut self.position {
            *p = None;
        }
        for (r, j) in placed.into_iter().enumerate() {
            let j = j.expect("every position claimed");
            self.basis[r] = j;
            self.position[j] = Some(r);
        }
        self.recompute_basic_values();
        self.y = self.duals();
        self.since_reinvert = 0;
        Ok(())
    }

    fn recompute_basic_values(&mut self) {
        let m = self.m;
        let mut resid = self.rhs.clone();
        for (j, col) in self.cols.iter().enumerate() {
            if self.position[j].is_none() && self.x[j] != 0.0 {
                for &(i, a) in col {
                    resid[i] -= a * self.x[j];
                }
            }
        }
        for r in 0..m {
            let v: f64 = self.binv_row(r).iter().zip(&resid).map(|(b, q)| b * q).sum();
            self.x[self.basis[r]] = v;
        }
    }

    fn objective(&self) -> f64 {
        self.cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    fn step(&mut self, alpha: &mut [f64]) -> Result<Step> {
        let bland = self.degenerate_run >= BLAND_AFTER;
        let y = &self.y;
        let mut entering: Option<(usize, f64)> = None;
        for j in 0..self.cols.len() {
            if self.position[j].is_some() || self.ub[j] - self.lb[j] <= 0.0 {
                continue;
            }
            let d = self.reduced_cost(j, y);
            let at_upper = self.x[j] >= self.ub[j];
            let improving = if at_upper { d > DUAL_TOL } else { d < -DUAL_TOL };
            if !improving {
                continue;
            }
            if bland {
                entering = Some((j, d));
                break;
            }
            if entering.is_none_or(|(_, best)| d.abs() > best.abs()) {
                entering = Some((j, d));
            }
        }
        let Some((q, d)) = entering else {
            return Ok(Step::Optimal);
        };
        // +1: entering increases from its lower bound; -1: decreases from upper
        let dir = if d < 0.0 { 1.0 } else { -1.0 };
        self.ftran(q, alpha);

        // entering bound flip competes with the basic variables
        let flip = self.ub[q] - self.lb[q];
        let mut t = flip;
        let mut leave: Option<usize> = None;
        for (r, &a) in alpha.iter().enumerate() {
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basis[r];
            // basic value moves by -dir * a per unit step
            let rate = -dir * a;
            let room = if rate < 0.0 {
                (self.x[j] - self.lb[j]).max(0.0) / -rate
            } else if self.ub[j].is_finite() {
                (self.ub[j] - self.x[j]).max(0.0) / rate
            } else {
                continue;
            };
            let take = match leave {
                None => room < t,
                Some(_) if room < t - ZERO_TOL => true,
                Some(lr) if room <= t + ZERO_TOL => {
                    if bland {
                        j < self.basis[lr]
                    } else {
                        a.abs() > alpha[lr].abs()
                    }
                }
                Some(_) => false,
            };
            if take {
                t = if leave.is_none() { room } else { room.min(t) };
                leave = Some(r);
            }
        }
        if leave.is_none() && !t.is_finite() {
            return Ok(Step::Unbounded);
        }

        self.x[q] += dir * t;
        for (r, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                let j = self.basis[r];
                self.x[j] -= dir * t * a;
            }
        }
        if t <= ZERO_TOL {
            self.degenerate_run += 1;
        } else {
            self.degenerate_run = 0;
        }
        self.pivots += 1;
        match leave {
            Some(r) => {
                let j = self.basis[r];
                let rate = -dir * alpha[r];
                self.x[j] = if rate < 0.0 { self.lb[j] } else { self.ub[j] };
                let f = d / alpha[r];
                let m = self.m;
                for (c, yc) in self.y.iter_mut().enumerate() {
                    *yc += f * self.binv[r * m + c];
                }
                self.update_inverse(r, alpha);
                self.set_basic(r, q);
                self.since_reinvert += 1;
                if self.since_reinvert >= REINVERT_EVERY {
                    self.reinvert()?;
                }
            }
            None => {
                self.x[q] = if dir > 0.0 { self.ub[q] } else { self.lb[q] };
            }
        }
        Ok(Step::Pivoted)
    }

    fn run(&mut self, alpha: &mut [f64]) -> Result<Step> {
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(Error::SolverStall(self.pivots));
            }
            match self.step(alpha)? {
                Step::Pivoted => {}
                done => return Ok(done),
            }
        }
    }
}

/// Solve an LP to optimality.
pub fn solve(lp: &LpProblem) -> Result<LpSolution> {
    lp.check()?;
    let n = lp.num_vars;
    let m = lp.rows.len();
    for j in 0..n {
        if lp.upper[j] < lp.lower[j] {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: f64::INFINITY,
                x: vec![],
                pivots: 0,
            });
        }
    }

    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, row) in lp.rows.iter().enumerate() {
        for &(j, a) in row {
            if a != 0.0 {
                cols[j].push((i, a));
            }
        }
    }
    let mut lb = lp.lower.clone();
    let mut ub = lp.upper.clone();
    for (i, s) in lp.senses.iter().enumerate() {
        cols.push(vec![(i, 1.0)]);
        lb.push(0.0);
        ub.push(match s {
            RowSense::Le => f64::INFINITY,
            RowSense::Eq => 0.0,
        });
    }
    let mut x: Vec<f64> = lb.clone();

    // residual each row must absorb with the structurals at their lower bounds
    let mut resid = lp.rhs.clone();
    for (j, col) in cols.iter().enumerate().take(n) {
        for &(i, a) in col {
            resid[i] -= a * x[j];
        }
    }
    let scale = lp.rhs.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let feas_tol = 1e-9 * scale;

    // crash: a structural singleton column can take the row when the
    // logical cannot
    let mut basis: Vec<usize> = (0..m).map(|i| n + i).collect();
    let row_ok = |i: usize, v: f64| match lp.senses[i] {
        RowSense::Le => v >= -feas_tol,
        RowSense::Eq => v.abs() <= feas_tol,
    };
    let mut needs_artificial = Vec::new();
    for i in 0..m {
        if row_ok(i, resid[i]) {
            x[n + i] = resid[i];
            continue;
        }
        let singleton = (0..n).find(|&j| {
            matches!(cols[j].as_slice(), [(r, a)] if *r == i && {
                let v = lb[j] + resid[i] / a;
                v >= lb[j] && v <= ub[j]
            })
        });
        match singleton {
            Some(j) => {
                let a = cols[j][0].1;
                x[j] = lb[j] + resid[i] / a;
                basis[i] = j;
                x[n + i] = 0.0;
            }
            None => needs_artificial.push(i),
        }
    }
    let mut cost = vec![0.0; cols.len()];
    for &i in &needs_artificial {
        // logical sits at its bound; the artificial carries the residual
        x[n + i] = 0.0;
        let sign = if resid[i] >= 0.0 { 1.0 } else { -1.0 };
        cols.push(vec![(i, sign)]);
        lb.push(0.0);
        ub.push(f64::INFINITY);
        x.push(0.0);
        cost.push(1.0);
        basis[i] = cols.len() - 1;
    }
    let total = cols.len();
    let mut position = vec![None; total];
    for (r, &j) in basis.iter().enumerate() {
        position[j] = Some(r);
    }
    let mut s = Simplex {
        m,
        cols,
        lb,
        ub,
        cost,
        x,
        basis,
        position,
        binv: Vec::new(),
        y: Vec::new(),
        rhs: lp.rhs.clone(),
        feas_tol,
        pivots: 0,
        since_reinvert: 0,
        degenerate_run: 0,
    };
    s.reinvert()?;
    let mut alpha = vec![0.0; m];

    let first_artificial = n + m;
    if total > first_artificial {
        match s.run(&mut alpha)? {
            Step::Optimal => {}
            _ => unreachable!("phase 1 is bounded below by zero"),
        }
        s.reinvert()?;
        let infeas: f64 = s.x[first_artificial..].iter().sum();
        if infeas > s.feas_tol * (m as f64).max(1.0) {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: f64::INFINITY,
                x: vec![],
                pivots: s.pivots,
            });
        }
        for j in first_artificial..total {
            s.ub[j] = 0.0;
            s.cost[j] = 0.0;
            if s.position[j].is_none() {
                s.x[j] = 0.0;
            }
        }
    }
    s.cost[..n].copy_from_slice(&lp.objective);
    s.y = s.duals();
    s.degenerate_run = 0;
    let outcome = s.run(&mut alpha)?;
    s.reinvert()?;
    if let Step::Unbounded = outcome {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            x: s.x[..n].to_vec(),
            pivots: s.pivots,
        });
    }
    // snap tiny bound violations left by rounding
    for j in 0..total {
        if s.x[j] < s.lb[j] && s.x[j] > s.lb[j] - s.feas_tol {
            s.x[j] = s.lb[j];
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: s.objective(),
        x: s.x[..n].to_vec(),
        pivots: s.pivots,
    })
}

/// Largest constraint or bound violation of `x`.
pub fn primal_residual(lp: &LpProblem, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in lp.rows.iter().enumerate() {
        let lhs: f64 = row.iter().map(|&(j, a)| a * x[j]).sum();
        let v = match lp.senses[i] {
            RowSense::Le => (lhs - lp.rhs[i]).max(0.0),
            RowSense::Eq => (lhs - lp.rhs[i]).abs(),
        };
        worst = worst.max(v);
    }
    for j in 0..lp.num_vars {
        worst = worst.max(lp.lower[j] - x[j]).max(x[j] - lp.upper[j]);
    }
    worst
}
