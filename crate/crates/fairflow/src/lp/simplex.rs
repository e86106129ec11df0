//! Bounded-variable two-phase revised simplex with a dense basis inverse.
//!
//! Scope and behaviour:
//!
//! * every row gets a slack turning it into an equality; phase 1 drives a
//!   full artificial basis to zero, phase 2 optimises the real objective
//!   with artificials pinned at zero;
//! * nonbasic variables sit at a bound (lower preferred) or, if both bounds
//!   are infinite, at zero; entering steps may simply flip a variable to its
//!   other bound;
//! * pricing is Dantzig (most negative reduced cost, lowest index on ties)
//!   and switches to Bland's rule while a run of degenerate pivots lasts,
//!   which guarantees termination;
//! * the basis inverse is updated in O(m²) per pivot and refactorised from
//!   scratch periodically to bound drift.
//!
//! Everything is index-ordered and free of randomness or hashing, so a given
//! model always takes the same pivot sequence and returns the same solution.

use super::{LpError, LpModel, LpSolution, LpStatus, Relation};

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Tolerance on constraint violation and on the phase-1 residual.
    pub feas_tol: f64,
    /// Reduced-cost tolerance for optimality.
    pub opt_tol: f64,
    /// Pivot cap across both phases.
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            feas_tol: 1e-9,
            opt_tol: 1e-9,
            max_iterations: 50_000,
        }
    }
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN_LIMIT: usize = 25;
/// Pivots between basis refactorisations.
const REFACTOR_EVERY: usize = 128;
/// Steps below this count as degenerate.
const DEGENERATE_STEP: f64 = 1e-11;
/// Direction entries smaller than this cannot block or pivot.
const PIVOT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VStat {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic with both bounds infinite, parked at zero.
    Free,
}

enum StepOutcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Worker {
    m: usize,
    ncols: usize,
    nstruct: usize,
    /// Column-sparse constraint matrix, `(row, value)` per column.
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    status: Vec<VStat>,
    basis: Vec<usize>,
    /// Dense row-major basis inverse, `m x m`.
    binv: Vec<f64>,
    iterations: usize,
    pivots_since_refactor: usize,
    degenerate_run: usize,
    opts: SimplexOptions,
}

/// Solves `model` to optimality (or reports infeasibility / unboundedness /
/// the iteration cap).  The model is validated first.
pub fn solve_simplex(model: &LpModel, opts: &SimplexOptions) -> Result<LpSolution, LpError> {
    model.validate()?;
    let mut w = Worker::new(model, *opts);

    // Phase 1: minimise the artificial residual.
    for k in 0..w.m {
        w.cost[w.nstruct + w.m + k] = 1.0;
    }
    let outcome = w.iterate()?;
    if matches!(outcome, StepOutcome::IterationLimit) {
        return Ok(w.finish(model, LpStatus::IterationLimit));
    }
    let residual: f64 = (0..w.m).map(|k| w.x[w.nstruct + w.m + k].abs()).sum();
    let scale = 1.0 + w.rhs.iter().fold(0.0f64, |acc, b| acc.max(b.abs()));
    if residual > w.opts.feas_tol * scale {
        return Ok(w.finish(model, LpStatus::Infeasible));
    }

    // Phase 2: pin artificials at zero, restore the real objective.
    for k in 0..w.m {
        let art = w.nstruct + w.m + k;
        w.cost[art] = 0.0;
        w.lower[art] = 0.0;
        w.upper[art] = 0.0;
        if w.status[art] != VStat::Basic {
            w.status[art] = VStat::AtLower;
            w.x[art] = 0.0;
        }
    }
    for c in w.cost[..w.nstruct].iter_mut() {
        *c = 0.0;
    }
    for &(var, coeff) in model.objective() {
        w.cost[var] = coeff;
    }
    w.degenerate_run = 0;
    let status = match w.iterate()? {
        StepOutcome::Optimal => LpStatus::Optimal,
        StepOutcome::Unbounded => LpStatus::Unbounded,
        StepOutcome::IterationLimit => LpStatus::IterationLimit,
    };
    Ok(w.finish(model, status))
}

impl Worker {
    fn new(model: &LpModel, opts: SimplexOptions) -> Self {
        let nstruct = model.num_vars();
        let m = model.num_rows();
        let ncols = nstruct + 2 * m;

        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ncols];
        let mut lower = vec![0.0; ncols];
        let mut upper = vec![0.0; ncols];
        for (var, &(lo, hi)) in model.bounds().iter().enumerate() {
            lower[var] = lo;
            upper[var] = hi;
        }
        let mut rhs = vec![0.0; m];
        for (i, row) in model.rows().iter().enumerate() {
            rhs[i] = row.rhs;
            for &(var, value) in &row.coeffs {
                cols[var].push((i, value));
            }
            let slack = nstruct + i;
            cols[slack].push((i, 1.0));
            let (lo, hi) = match row.relation {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            lower[slack] = lo;
            upper[slack] = hi;
        }

        // Park structural and slack variables at a finite bound (or zero).
        let mut x = vec![0.0; ncols];
        let mut status = vec![VStat::AtLower; ncols];
        for j in 0..nstruct + m {
            if lower[j].is_finite() {
                status[j] = VStat::AtLower;
                x[j] = lower[j];
            } else if upper[j].is_finite() {
                status[j] = VStat::AtUpper;
                x[j] = upper[j];
            } else {
                status[j] = VStat::Free;
                x[j] = 0.0;
            }
        }

        // Artificial basis absorbing the initial residual, with unit
        // columns signed so that every artificial starts non-negative.
        let mut residual = rhs.clone();
        for j in 0..nstruct + m {
            if x[j] != 0.0 {
                for &(i, a) in &cols[j] {
                    residual[i] -= a * x[j];
                }
            }
        }
        let mut basis = Vec::with_capacity(m);
        let mut binv = vec![0.0; m * m];
        for (k, &r) in residual.iter().enumerate() {
            let art = nstruct + m + k;
            let sign = if r >= 0.0 { 1.0 } else { -1.0 };
            cols[art].push((k, sign));
            lower[art] = 0.0;
            upper[art] = f64::INFINITY;
            x[art] = r.abs();
            status[art] = VStat::Basic;
            basis.push(art);
            binv[k * m + k] = sign;
        }

        Worker {
            m,
            ncols,
            nstruct,
            cols,
            lower,
            upper,
            rhs,
            cost: vec![0.0; ncols],
            x,
            status,
            basis,
            binv,
            iterations: 0,
            pivots_since_refactor: 0,
            degenerate_run: 0,
            opts,
        }
    }

    /// Runs simplex pivots until the current objective is optimal or the
    /// problem is detected unbounded / the iteration cap is hit.
    fn iterate(&mut self) -> Result<StepOutcome, LpError> {
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Ok(StepOutcome::IterationLimit);
            }

            // Duals y = c_B' B^-1.
            let mut y = vec![0.0; self.m];
            for (k, &var) in self.basis.iter().enumerate() {
                let cb = self.cost[var];
                if cb != 0.0 {
                    let row = &self.binv[k * self.m..(k + 1) * self.m];
                    for (i, yi) in y.iter_mut().enumerate() {
                        *yi += cb * row[i];
                    }
                }
            }

            // Pricing: Dantzig normally, Bland while degeneracy persists.
            let bland = self.degenerate_run >= DEGENERATE_RUN_LIMIT;
            let mut entering: Option<(usize, f64, f64)> = None; // (col, score, direction)
            for j in 0..self.ncols {
                if self.status[j] == VStat::Basic || self.lower[j] == self.upper[j] {
                    continue;
                }
                let mut d = self.cost[j];
                for &(i, a) in &self.cols[j] {
                    d -= y[i] * a;
                }
                let candidate = match self.status[j] {
                    VStat::AtLower => (d < -self.opts.opt_tol).then_some((-d, 1.0)),
                    VStat::AtUpper => (d > self.opts.opt_tol).then_some((d, -1.0)),
                    VStat::Free => {
                        (d.abs() > self.opts.opt_tol).then(|| (d.abs(), -d.signum()))
                    }
                    VStat::Basic => unreachable!(),
                };
                if let Some((score, dir)) = candidate {
                    if bland {
                        entering = Some((j, score, dir));
                        break;
                    }
                    if entering.map_or(true, |(_, best, _)| score > best) {
                        entering = Some((j, score, dir));
                    }
                }
            }
            let Some((q, _, dir)) = entering else {
                return Ok(StepOutcome::Optimal);
            };

            // Direction of basic values: w = B^-1 a_q.
            let mut wdir = vec![0.0; self.m];
            for &(i, a) in &self.cols[q] {
                if a != 0.0 {
                    for k in 0..self.m {
                        wdir[k] += self.binv[k * self.m + i] * a;
                    }
                }
            }

            // Ratio test. The entering variable may travel at most the
            // distance to its own opposite bound.
            let own_limit = if self.lower[q].is_finite() && self.upper[q].is_finite() {
                self.upper[q] - self.lower[q]
            } else {
                f64::INFINITY
            };
            let mut theta = own_limit;
            let mut leaving: Option<(usize, VStat)> = None; // (basis slot, bound hit)
            for k in 0..self.m {
                let rate = -dir * wdir[k]; // change of basic value per unit step
                let var = self.basis[k];
                let (bound, hit) = if rate < -PIVOT_EPS {
                    (self.lower[var], VStat::AtLower)
                } else if rate > PIVOT_EPS {
                    (self.upper[var], VStat::AtUpper)
                } else {
                    continue;
                };
                if !bound.is_finite() {
                    continue;
                }
                let room = if rate < 0.0 {
                    self.x[var] - bound
                } else {
                    bound - self.x[var]
                };
                let t = (room / rate.abs()).max(0.0);
                let better = match leaving {
                    None => t < theta,
                    // Lowest variable index breaks exact ties.
                    Some((slot, _)) => {
                        t < theta || (t == theta && var < self.basis[slot])
                    }
                };
                if better {
                    theta = t;
                    leaving = Some((k, hit));
                }
            }

            if theta.is_infinite() {
                return Ok(StepOutcome::Unbounded);
            }

            // Move the entering variable and the basic values.
            if theta != 0.0 {
                self.x[q] += dir * theta;
                for k in 0..self.m {
                    let var = self.basis[k];
                    self.x[var] -= dir * theta * wdir[k];
                }
            }
            self.iterations += 1;
            self.degenerate_run = if theta <= DEGENERATE_STEP {
                self.degenerate_run + 1
            } else {
                0
            };

            match leaving {
                None => {
                    // Bound flip: the entering variable reached its other bound.
                    self.status[q] = match self.status[q] {
                        VStat::AtLower => VStat::AtUpper,
                        VStat::AtUpper => VStat::AtLower,
                        other => other,
                    };
                    let snap = match self.status[q] {
                        VStat::AtLower => self.lower[q],
                        _ => self.upper[q],
                    };
                    self.x[q] = snap;
                }
                Some((slot, hit)) => {
                    let out = self.basis[slot];
                    self.status[out] = hit;
                    self.x[out] = match hit {
                        VStat::AtLower => self.lower[out],
                        _ => self.upper[out],
                    };
                    self.status[q] = VStat::Basic;
                    self.basis[slot] = q;
                    self.update_binv(slot, &wdir)?;
                    self.pivots_since_refactor += 1;
                    if self.pivots_since_refactor >= REFACTOR_EVERY {
                        self.refactorize()?;
                        self.recompute_basics();
                    }
                }
            }
        }
    }

    /// Elementary (eta) update of the dense inverse after `basis[slot]`
    /// changed; `wdir` is B^-1 times the entering column.
    fn update_binv(&mut self, slot: usize, wdir: &[f64]) -> Result<(), LpError> {
        let m = self.m;
        let pivot = wdir[slot];
        if pivot.abs() < PIVOT_EPS {
            return Err(LpError::Numerical("vanishing pivot in basis update".into()));
        }
        let inv = 1.0 / pivot;
        for i in 0..m {
            self.binv[slot * m + i] *= inv;
        }
        for k in 0..m {
            if k == slot {
                continue;
            }
            let f = wdir[k];
            if f != 0.0 {
                for i in 0..m {
                    self.binv[k * m + i] -= f * self.binv[slot * m + i];
                }
            }
        }
        Ok(())
    }

    /// Rebuilds the dense inverse from the basis columns (Gauss-Jordan with
    /// partial pivoting).
    fn refactorize(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut mat = vec![0.0; m * m];
        for (k, &var) in self.basis.iter().enumerate() {
            for &(i, a) in &self.cols[var] {
                mat[i * m + k] = a;
            }
        }
        let mut inv = vec![0.0; m * m];
        for k in 0..m {
            inv[k * m + k] = 1.0;
        }
        for col in 0..m {
            let mut best = col;
            for r in col + 1..m {
                if mat[r * m + col].abs() > mat[best * m + col].abs() {
                    best = r;
                }
            }
            if mat[best * m + col].abs() < 1e-12 {
                return Err(LpError::Numerical("singular basis".into()));
            }
            if best != col {
                for c in 0..m {
                    mat.swap(col * m + c, best * m + c);
                    inv.swap(col * m + c, best * m + c);
                }
            }
            let piv = 1.0 / mat[col * m + col];
            for c in 0..m {
                mat[col * m + c] *= piv;
                inv[col * m + c] *= piv;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = mat[r * m + col];
                if f != 0.0 {
                    for c in 0..m {
                        mat[r * m + c] -= f * mat[col * m + c];
                        inv[r * m + c] -= f * inv[col * m + c];
                    }
                }
            }
        }
        // inv now holds (P B)^-1 pieces composed; mat was reduced in place,
        // so inv = B^-1 directly.
        self.binv = inv;
        self.pivots_since_refactor = 0;
        Ok(())
    }

    /// Recomputes basic values from the bounds of the nonbasic variables;
    /// clears accumulated drift after a refactorisation.
    fn recompute_basics(&mut self) {
        let m = self.m;
        let mut adj = self.rhs.clone();
        for j in 0..self.ncols {
            if self.status[j] != VStat::Basic && self.x[j] != 0.0 {
                for &(i, a) in &self.cols[j] {
                    adj[i] -= a * self.x[j];
                }
            }
        }
        for k in 0..m {
            let mut v = 0.0;
            for i in 0..m {
                v += self.binv[k * m + i] * adj[i];
            }
            self.x[self.basis[k]] = v;
        }
    }

    fn finish(self, model: &LpModel, status: LpStatus) -> LpSolution {
        let x = self.x[..self.nstruct].to_vec();
        let objective_value = model.objective_value(&x);
        LpSolution {
            status,
            x,
            objective_value,
            iterations: self.iterations,
        }
    }
}
