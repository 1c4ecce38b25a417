//! Bounded-variable primal revised simplex.
//!
//! Every row `i` gets a logical variable `r_i` with `A x - r = 0`, so row
//! senses become bounds on `r`. Phase 1 minimises the sum of bound violations
//! of the basic variables (composite objective, recomputed each iteration);
//! phase 2 minimises the real objective. The basis is held as a sparse LU
//! factorisation plus a product-form eta file that is refactorised every
//! `refactor_every` pivots.

use crate::error::MilpError;
use crate::lu::LuFactors;
use crate::problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Free,
    Fixed,
}

/// Final basis of a solve, usable as a starting point for a related LP with
/// the same rows and columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub status: Vec<VarStatus>,
}

#[derive(Debug, Clone)]
pub struct LpOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub pivot_tol: f64,
    pub max_iter: usize,
    pub refactor_every: usize,
    /// Consecutive degenerate pivots after which Bland's rule takes over.
    pub bland_after: usize,
    pub scale: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            feas_tol: 1e-7,
            opt_tol: 1e-7,
            pivot_tol: 1e-9,
            max_iter: 1_000_000,
            refactor_every: 50,
            bland_after: 1000,
            scale: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    /// Structural column values.
    pub x: Vec<f64>,
    /// Row activities `a_i · x`.
    pub row_activity: Vec<f64>,
    /// Dual value per row: sensitivity of the optimum to the row bound.
    pub duals: Vec<f64>,
    /// Reduced cost per structural column.
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
    pub basis: Option<Basis>,
}

/// Solve the LP relaxation of `problem` (integrality ignored).
pub fn solve_lp(problem: &Problem, opts: &LpOptions) -> Result<LpSolution, MilpError> {
    let lower: Vec<f64> = problem.columns.iter().map(|c| c.lower).collect();
    let upper: Vec<f64> = problem.columns.iter().map(|c| c.upper).collect();
    solve_lp_with(problem, &lower, &upper, None, opts)
}

/// Solve the LP relaxation with overridden column bounds, optionally starting
/// from a previous basis.
pub fn solve_lp_with(
    problem: &Problem,
    lower: &[f64],
    upper: &[f64],
    start: Option<&Basis>,
    opts: &LpOptions,
) -> Result<LpSolution, MilpError> {
    problem.validate()?;
    let mut s = Simplex::new(problem, lower, upper, opts);
    if let Some(status) = s.trivially_infeasible() {
        return Ok(s.finish(status, problem));
    }
    s.install_basis(start);
    let status = s.run()?;
    Ok(s.finish(status, problem))
}

struct Eta {
    pos: usize,
    pivot: f64,
    col: Vec<(usize, f64)>,
}

struct Simplex {
    m: usize,
    n: usize,
    /// Scaled structural columns; logical `n + i` is `-e_i` implicitly.
    cols: Vec<Vec<(usize, f64)>>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    col_scale: Vec<f64>,
    row_scale: Vec<f64>,
    obj_scale: f64,
    x: Vec<f64>,
    status: Vec<VarStatus>,
    head: Vec<usize>,
    pos: Vec<usize>,
    lu: Option<LuFactors>,
    etas: Vec<Eta>,
    opts: LpOptions,
    iterations: usize,
    // scratch
    work_m: Vec<f64>,
}

const NOT_BASIC: usize = usize::MAX;

fn pow2_round(v: f64) -> f64 {
    if !v.is_finite() || v <= 0.0 {
        1.0
    } else {
        2f64.powi(v.log2().round() as i32)
    }
}

impl Simplex {
    fn new(problem: &Problem, lower: &[f64], upper: &[f64], opts: &LpOptions) -> Self {
        let m = problem.n_rows();
        let n = problem.n_cols();
        let mut cols = problem.column_major();
        let mut row_scale = vec![1.0; m];
        let mut col_scale = vec![1.0; n];
        if opts.scale {
            for _pass in 0..2 {
                let mut rmin = vec![f64::INFINITY; m];
                let mut rmax = vec![0.0f64; m];
                for (j, col) in cols.iter().enumerate() {
                    for &(i, v) in col {
                        let a = (v * row_scale[i] * col_scale[j]).abs();
                        rmin[i] = rmin[i].min(a);
                        rmax[i] = rmax[i].max(a);
                    }
                }
                for i in 0..m {
                    if rmax[i] > 0.0 {
                        row_scale[i] *= pow2_round(1.0 / (rmin[i] * rmax[i]).sqrt());
                    }
                }
                for (j, col) in cols.iter().enumerate() {
                    let (mut cmin, mut cmax) = (f64::INFINITY, 0.0f64);
                    for &(i, v) in col {
                        let a = (v * row_scale[i] * col_scale[j]).abs();
                        cmin = cmin.min(a);
                        cmax = cmax.max(a);
                    }
                    if cmax > 0.0 {
                        col_scale[j] *= pow2_round(1.0 / (cmin * cmax).sqrt());
                    }
                }
            }
        }
        for (j, col) in cols.iter_mut().enumerate() {
            for e in col.iter_mut() {
                e.1 *= row_scale[e.0] * col_scale[j];
            }
        }
        let mut lb = Vec::with_capacity(n + m);
        let mut ub = Vec::with_capacity(n + m);
        for j in 0..n {
            lb.push(lower[j] / col_scale[j]);
            ub.push(upper[j] / col_scale[j]);
        }
        for (i, row) in problem.rows.iter().enumerate() {
            let (lo, hi) = row.activity_bounds();
            lb.push(lo * row_scale[i]);
            ub.push(hi * row_scale[i]);
        }
        let mut cost: Vec<f64> = (0..n).map(|j| problem.objective[j] * col_scale[j]).collect();
        let cmax = cost.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let obj_scale = if opts.scale && cmax > 0.0 { pow2_round(1.0 / cmax) } else { 1.0 };
        for c in cost.iter_mut() {
            *c *= obj_scale;
        }
        cost.extend(std::iter::repeat(0.0).take(m));
        Simplex {
            m,
            n,
            cols,
            lb,
            ub,
            cost,
            col_scale,
            row_scale,
            obj_scale,
            x: vec![0.0; n + m],
            status: vec![VarStatus::AtLower; n + m],
            head: Vec::new(),
            pos: vec![NOT_BASIC; n + m],
            lu: None,
            etas: Vec::new(),
            opts: opts.clone(),
            iterations: 0,
            work_m: vec![0.0; m],
        }
    }

    /// Crossed bounds (from branching) or empty rows with an infeasible rhs.
    fn trivially_infeasible(&self) -> Option<LpStatus> {
        let tol = self.opts.feas_tol;
        for j in 0..self.n + self.m {
            if self.lb[j] > self.ub[j] + tol {
                return Some(LpStatus::Infeasible);
            }
        }
        None
    }

    fn nonbasic_status(&self, j: usize) -> VarStatus {
        let (l, u) = (self.lb[j], self.ub[j]);
        if l == u {
            VarStatus::Fixed
        } else if l.is_finite() {
            VarStatus::AtLower
        } else if u.is_finite() {
            VarStatus::AtUpper
        } else {
            VarStatus::Free
        }
    }

    fn value_for(&self, j: usize, st: VarStatus) -> f64 {
        match st {
            VarStatus::AtLower | VarStatus::Fixed => self.lb[j],
            VarStatus::AtUpper => self.ub[j],
            VarStatus::Free => 0.0,
            VarStatus::Basic => self.x[j],
        }
    }

    fn install_basis(&mut self, start: Option<&Basis>) {
        let nt = self.n + self.m;
        let usable = start
            .filter(|b| b.status.len() == nt && b.status.iter().filter(|&&s| s == VarStatus::Basic).count() == self.m);
        match usable {
            Some(b) => {
                self.head.clear();
                for j in 0..nt {
                    let st = b.status[j];
                    if st == VarStatus::Basic {
                        self.pos[j] = self.head.len();
                        self.head.push(j);
                        self.status[j] = VarStatus::Basic;
                    } else {
                        self.pos[j] = NOT_BASIC;
                        let st = match st {
                            VarStatus::AtUpper if self.ub[j].is_finite() => VarStatus::AtUpper,
                            VarStatus::AtLower if self.lb[j].is_finite() => VarStatus::AtLower,
                            _ => self.nonbasic_status(j),
                        };
                        let st = if self.lb[j] == self.ub[j] { VarStatus::Fixed } else { st };
                        self.status[j] = st;
                        self.x[j] = self.value_for(j, st);
                    }
                }
            }
            None => {
                self.head = (self.n..nt).collect();
                for j in 0..nt {
                    if j >= self.n {
                        self.pos[j] = j - self.n;
                        self.status[j] = VarStatus::Basic;
                    } else {
                        self.pos[j] = NOT_BASIC;
                        let st = self.nonbasic_status(j);
                        self.status[j] = st;
                        self.x[j] = self.value_for(j, st);
                    }
                }
            }
        }
    }

    fn column_of(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            self.cols[j].clone()
        } else {
            vec![(j - self.n, -1.0)]
        }
    }

    /// Factorise the current basis, swapping dependent columns for logicals.
    fn refactor(&mut self) -> Result<(), MilpError> {
        self.etas.clear();
        for _attempt in 0..3 {
            let bcols: Vec<Vec<(usize, f64)>> = self.head.iter().map(|&j| self.column_of(j)).collect();
            match LuFactors::factorize(self.m, &bcols) {
                Ok(lu) => {
                    self.lu = Some(lu);
                    return Ok(());
                }
                Err((_, sing)) => {
                    log::debug!("basis repair: {} dependent columns", sing.cols.len());
                    for (&p, &r) in sing.cols.iter().zip(&sing.rows) {
                        let out = self.head[p];
                        let logical = self.n + r;
                        let st = self.nonbasic_status(out);
                        self.status[out] = st;
                        self.pos[out] = NOT_BASIC;
                        self.x[out] = self.value_for(out, st);
                        if self.pos[logical] != NOT_BASIC {
                            // should not happen: the logical's row would be pivoted
                            return Err(MilpError::SingularBasis { row: r });
                        }
                        self.head[p] = logical;
                        self.pos[logical] = p;
                        self.status[logical] = VarStatus::Basic;
                    }
                }
            }
        }
        let row = self.head.first().copied().unwrap_or(0);
        Err(MilpError::SingularBasis { row })
    }

    fn ftran(&self, rhs: &mut [f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        if let Some(lu) = &self.lu {
            lu.solve(rhs, &mut out);
        }
        for e in &self.etas {
            let xp = out[e.pos] / e.pivot;
            if xp != 0.0 {
                for &(i, a) in &e.col {
                    if i != e.pos {
                        out[i] -= a * xp;
                    }
                }
            }
            out[e.pos] = xp;
        }
        out
    }

    fn btran(&self, c: &mut [f64]) -> Vec<f64> {
        for e in self.etas.iter().rev() {
            let mut acc = c[e.pos];
            for &(i, a) in &e.col {
                if i != e.pos {
                    acc -= a * c[i];
                }
            }
            c[e.pos] = acc / e.pivot;
        }
        let mut y = vec![0.0; self.m];
        if let Some(lu) = &self.lu {
            lu.solve_transpose(c, &mut y);
        }
        y
    }

    fn recompute_basics(&mut self) {
        let mut rhs = std::mem::take(&mut self.work_m);
        rhs.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.n {
            if self.pos[j] == NOT_BASIC && self.x[j] != 0.0 {
                for &(i, a) in &self.cols[j] {
                    rhs[i] -= a * self.x[j];
                }
            }
        }
        for i in 0..self.m {
            let j = self.n + i;
            if self.pos[j] == NOT_BASIC {
                rhs[i] += self.x[j];
            }
        }
        let xb = self.ftran(&mut rhs);
        for (p, &j) in self.head.iter().enumerate() {
            self.x[j] = xb[p];
        }
        self.work_m = rhs;
    }

    fn dot_col(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            self.cols[j].iter().map(|&(i, a)| a * y[i]).sum()
        } else {
            -y[j - self.n]
        }
    }

    fn run(&mut self) -> Result<LpStatus, MilpError> {
        self.refactor()?;
        self.recompute_basics();
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut final_checks = 0;
        let tol = self.opts.feas_tol;
        loop {
            if self.etas.len() >= self.opts.refactor_every {
                self.refactor()?;
                self.recompute_basics();
            }
            if self.iterations >= self.opts.max_iter {
                return Ok(LpStatus::IterationLimit);
            }
            // phase selection
            let mut cb = vec![0.0; self.m];
            let mut phase1 = false;
            let mut sum_inf = 0.0;
            for (p, &j) in self.head.iter().enumerate() {
                let v = self.x[j];
                if v < self.lb[j] - tol {
                    cb[p] = -1.0;
                    phase1 = true;
                    sum_inf += self.lb[j] - v;
                } else if v > self.ub[j] + tol {
                    cb[p] = 1.0;
                    phase1 = true;
                    sum_inf += v - self.ub[j];
                }
            }
            if !phase1 {
                for (p, &j) in self.head.iter().enumerate() {
                    cb[p] = self.cost[j];
                }
            }
            let y = self.btran(&mut cb);

            // pricing
            let mut enter: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..self.n + self.m {
                let st = self.status[j];
                if matches!(st, VarStatus::Basic | VarStatus::Fixed) {
                    continue;
                }
                let cj = if phase1 { 0.0 } else { self.cost[j] };
                let d = cj - self.dot_col(j, &y);
                let eligible = match st {
                    VarStatus::AtLower => d < -self.opts.opt_tol,
                    VarStatus::AtUpper => d > self.opts.opt_tol,
                    VarStatus::Free => d.abs() > self.opts.opt_tol,
                    _ => false,
                };
                if !eligible {
                    continue;
                }
                if bland {
                    enter = Some((j, d));
                    break;
                }
                if d.abs() > best {
                    best = d.abs();
                    enter = Some((j, d));
                }
            }

            let Some((q, dq)) = enter else {
                if phase1 {
                    if sum_inf > tol {
                        // confirm on a fresh factorisation before declaring
                        if final_checks < 2 {
                            final_checks += 1;
                            self.refactor()?;
                            self.recompute_basics();
                            continue;
                        }
                        return Ok(LpStatus::Infeasible);
                    }
                    continue;
                }
                // optimal: verify on a fresh factorisation
                if !self.etas.is_empty() && final_checks < 3 {
                    final_checks += 1;
                    self.refactor()?;
                    self.recompute_basics();
                    continue;
                }
                return Ok(LpStatus::Optimal);
            };
            let dir = if dq < 0.0 { 1.0 } else { -1.0 };

            let mut a_q = vec![0.0; self.m];
            for (i, a) in self.column_of(q) {
                a_q[i] = a;
            }
            let alpha = self.ftran(&mut a_q);

            // Harris ratio test, pass 1
            let ptol = self.opts.pivot_tol;
            let mut theta_max = f64::INFINITY;
            for (p, &j) in self.head.iter().enumerate() {
                let a = alpha[p];
                if a.abs() <= ptol {
                    continue;
                }
                let delta = -dir * a;
                if let Some(r) = self.block_ratio(j, delta, phase1, tol) {
                    theta_max = theta_max.min(r);
                }
            }
            let flip = self.ub[q] - self.lb[q];
            // pass 2
            let mut leave: Option<(usize, f64, bool)> = None; // (pos, ratio, to_upper)
            let mut best_piv = 0.0;
            if theta_max.is_finite() {
                for (p, &j) in self.head.iter().enumerate() {
                    let a = alpha[p];
                    if a.abs() <= ptol {
                        continue;
                    }
                    let delta = -dir * a;
                    if let Some((r, to_upper)) = self.exact_ratio(j, delta, phase1, tol) {
                        if r <= theta_max && a.abs() > best_piv {
                            best_piv = a.abs();
                            leave = Some((p, r.max(0.0), to_upper));
                        } else if bland && r <= theta_max && a.abs() == best_piv {
                            if let Some((lp, _, _)) = leave {
                                if j < self.head[lp] {
                                    leave = Some((p, r.max(0.0), to_upper));
                                }
                            }
                        }
                    }
                }
            }

            let step_bound = leave.map(|l| l.1).unwrap_or(f64::INFINITY);
            if flip.is_finite() && flip <= step_bound {
                // bound flip
                let theta = flip;
                self.apply_step(q, dir, theta, &alpha);
                let st = if dir > 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                self.status[q] = st;
                self.x[q] = if dir > 0.0 { self.ub[q] } else { self.lb[q] };
                self.iterations += 1;
                degenerate = 0;
                bland = false;
                continue;
            }
            let Some((r, theta, to_upper)) = leave else {
                if phase1 {
                    // numerical trouble: the phase-1 objective is bounded below
                    if final_checks < 3 {
                        final_checks += 1;
                        self.refactor()?;
                        self.recompute_basics();
                        continue;
                    }
                    return Ok(LpStatus::IterationLimit);
                }
                return Ok(LpStatus::Unbounded);
            };

            self.apply_step(q, dir, theta, &alpha);
            let out = self.head[r];
            self.x[out] = if to_upper { self.ub[out] } else { self.lb[out] };
            self.status[out] = if self.lb[out] == self.ub[out] {
                VarStatus::Fixed
            } else if to_upper {
                VarStatus::AtUpper
            } else {
                VarStatus::AtLower
            };
            self.pos[out] = NOT_BASIC;
            self.head[r] = q;
            self.pos[q] = r;
            self.status[q] = VarStatus::Basic;
            let col: Vec<(usize, f64)> =
                alpha.iter().enumerate().filter(|(_, &a)| a != 0.0).map(|(i, &a)| (i, a)).collect();
            self.etas.push(Eta { pos: r, pivot: alpha[r], col });
            self.iterations += 1;

            if theta <= 1e-12 {
                degenerate += 1;
                if degenerate >= self.opts.bland_after {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }
        }
    }

    /// Relaxed (Harris) blocking ratio of basic variable `j` moving at rate `delta`.
    fn block_ratio(&self, j: usize, delta: f64, phase1: bool, tol: f64) -> Option<f64> {
        let v = self.x[j];
        let (l, u) = (self.lb[j], self.ub[j]);
        if delta < 0.0 {
            if phase1 && v < l - tol {
                return None;
            }
            let bound = if phase1 && v > u + tol { u } else { l };
            if !bound.is_finite() {
                return None;
            }
            Some((v - bound + tol) / -delta)
        } else {
            if phase1 && v > u + tol {
                return None;
            }
            let bound = if phase1 && v < l - tol { l } else { u };
            if !bound.is_finite() {
                return None;
            }
            Some((bound - v + tol) / delta)
        }
    }

    fn exact_ratio(&self, j: usize, delta: f64, phase1: bool, tol: f64) -> Option<(f64, bool)> {
        let v = self.x[j];
        let (l, u) = (self.lb[j], self.ub[j]);
        if delta < 0.0 {
            if phase1 && v < l - tol {
                return None;
            }
            if phase1 && v > u + tol {
                return Some(((v - u) / -delta, true));
            }
            if !l.is_finite() {
                return None;
            }
            Some(((v - l) / -delta, false))
        } else {
            if phase1 && v > u + tol {
                return None;
            }
            if phase1 && v < l - tol {
                return Some(((l - v) / delta, false));
            }
            if !u.is_finite() {
                return None;
            }
            Some(((u - v) / delta, true))
        }
    }

    fn apply_step(&mut self, q: usize, dir: f64, theta: f64, alpha: &[f64]) {
        if theta == 0.0 {
            return;
        }
        self.x[q] += dir * theta;
        for (p, &j) in self.head.iter().enumerate() {
            if alpha[p] != 0.0 {
                self.x[j] -= dir * theta * alpha[p];
            }
        }
    }

    fn finish(mut self, status: LpStatus, problem: &Problem) -> LpSolution {
        let n = self.n;
        let m = self.m;
        let x: Vec<f64> = (0..n).map(|j| self.x[j] * self.col_scale[j]).collect();
        let row_activity: Vec<f64> = problem.rows.iter().map(|r| r.activity(&x)).collect();
        let objective = problem.objective_value(&x);
        let (duals, reduced_costs) = if status == LpStatus::Optimal && self.lu.is_some() {
            let mut cb: Vec<f64> = self.head.iter().map(|&j| self.cost[j]).collect();
            let y = self.btran(&mut cb);
            let duals = (0..m).map(|i| y[i] * self.row_scale[i] / self.obj_scale).collect();
            let rc = (0..n)
                .map(|j| {
                    if self.pos[j] != NOT_BASIC {
                        0.0
                    } else {
                        (self.cost[j] - self.dot_col(j, &y)) / self.col_scale[j] / self.obj_scale
                    }
                })
                .collect();
            (duals, rc)
        } else {
            (vec![0.0; m], vec![0.0; n])
        };
        let basis = if self.head.len() == m { Some(Basis { status: std::mem::take(&mut self.status) }) } else { None };
        LpSolution { status, objective, x, row_activity, duals, reduced_costs, iterations: self.iterations, basis }
    }
}
