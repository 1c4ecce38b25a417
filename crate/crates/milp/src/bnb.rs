//! Best-first branch-and-bound over the LP relaxation.
//!
//! Open nodes are ordered by parent LP bound, then depth (deeper first), then
//! node id. Each round pops a
//! fixed-size batch, solves the node LPs (possibly in parallel) and then
//! processes the results strictly in node-id order, so the search is
//! identical for sequential and parallel execution.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::Instant;

use crate::error::MilpError;
use crate::exec::{map_slice, Execution};
use crate::problem::Problem;
use crate::simplex::{solve_lp_with, Basis, LpOptions, LpStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BnbStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Time limit reached with an incumbent; the gap is reported.
    GapLimit,
    NodeLimit,
    TimeLimit,
}

#[derive(Debug, Clone)]
pub struct BnbOptions {
    pub lp: LpOptions,
    pub int_tol: f64,
    pub rel_gap: f64,
    pub max_nodes: usize,
    pub time_limit_s: Option<f64>,
    /// Nodes solved per round. Fixed so the tree does not depend on the
    /// number of worker threads.
    pub batch: usize,
    pub exec: Execution,
    /// Branching priority per column; fractional columns with the highest
    /// priority are branched on first. Empty means all equal.
    pub priority: Vec<i32>,
}

impl Default for BnbOptions {
    fn default() -> Self {
        BnbOptions {
            lp: LpOptions::default(),
            int_tol: 1e-6,
            rel_gap: 1e-6,
            max_nodes: 200_000,
            time_limit_s: None,
            batch: 4,
            exec: Execution::default(),
            priority: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BnbSolution {
    pub status: BnbStatus,
    pub objective: Option<f64>,
    pub best_bound: f64,
    pub nodes: usize,
    pub x: Option<Vec<f64>>,
    /// Objective of the root LP relaxation.
    pub root_bound: f64,
    pub lp_iterations: usize,
}

impl BnbSolution {
    pub fn gap(&self) -> f64 {
        match self.objective {
            Some(obj) => ((obj - self.best_bound) / obj.abs().max(1.0)).max(0.0),
            None => f64::INFINITY,
        }
    }
}

struct Node {
    id: u64,
    depth: u32,
    bound: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    basis: Option<Arc<Basis>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: smallest bound pops first, ties dive.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| self.depth.cmp(&other.depth))
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Most fractional integer column among those of the highest priority; ties
/// go to the lowest column id.
fn branching_column(x: &[f64], int_cols: &[usize], int_tol: f64, priority: &[i32]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    let mut best_key = (i32::MIN, int_tol);
    for &j in int_cols {
        let f = (x[j] - x[j].round()).abs();
        if f <= int_tol {
            continue;
        }
        let key = (priority.get(j).copied().unwrap_or(0), f);
        if best.is_none() || key.0 > best_key.0 || (key.0 == best_key.0 && key.1 > best_key.1) {
            best_key = key;
            best = Some((j, x[j]));
        }
    }
    best
}

/// Moves each fractional integer column to its floor or ceiling, cheaper side
/// first, as long as every row it touches stays within its activity bounds.
/// Returns the rounded point when all of them could be moved.
fn simple_rounding(
    problem: &Problem,
    by_col: &[Vec<(usize, f64)>],
    row_bounds: &[(f64, f64)],
    x: &[f64],
    int_cols: &[usize],
    node: &Node,
    int_tol: f64,
) -> Option<Vec<f64>> {
    let mut activity: Vec<f64> = problem.rows.iter().map(|r| r.activity(x)).collect();
    let mut x = x.to_vec();
    for (k, &j) in int_cols.iter().enumerate() {
        let v = x[j];
        if (v - v.round()).abs() <= int_tol {
            x[j] = v.round();
            continue;
        }
        let (lo, hi) = (v.floor().max(node.lower[k]), v.ceil().min(node.upper[k]));
        let mut candidates = [lo, hi];
        if problem.objective[j] < 0.0 || (problem.objective[j] == 0.0 && hi - v < v - lo) {
            candidates.swap(0, 1);
        }
        let fits = |target: f64, activity: &[f64]| {
            let delta = target - v;
            by_col[j].iter().all(|&(i, a)| {
                let (rlo, rhi) = row_bounds[i];
                let act = activity[i] + a * delta;
                let tol = 1e-9 * (1.0 + act.abs());
                act >= rlo - tol && act <= rhi + tol
            })
        };
        let target = candidates.into_iter().find(|&t| (t - t.round()).abs() == 0.0 && fits(t, &activity))?;
        for &(i, a) in &by_col[j] {
            activity[i] += a * (target - v);
        }
        x[j] = target;
    }
    Some(x)
}

pub fn branch_and_bound(problem: &Problem, opts: &BnbOptions) -> Result<BnbSolution, MilpError> {
    problem.validate()?;
    if !opts.priority.is_empty() && opts.priority.len() != problem.n_cols() {
        return Err(MilpError::InvalidModel(format!(
            "{} branching priorities for {} columns",
            opts.priority.len(),
            problem.n_cols()
        )));
    }
    let start = Instant::now();
    let int_cols = problem.integer_columns();
    let base_lower: Vec<f64> = problem.columns.iter().map(|c| c.lower).collect();
    let base_upper: Vec<f64> = problem.columns.iter().map(|c| c.upper).collect();
    // integer bounds rounded inwards
    let root_lower: Vec<f64> = int_cols.iter().map(|&j| (base_lower[j] - opts.int_tol).ceil()).collect();
    let root_upper: Vec<f64> = int_cols.iter().map(|&j| (base_upper[j] + opts.int_tol).floor()).collect();

    let mut heap = BinaryHeap::new();
    heap.push(Node { id: 0, depth: 0, bound: f64::NEG_INFINITY, lower: root_lower, upper: root_upper, basis: None });
    let mut next_id = 1u64;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut gap_pruned_bound = f64::INFINITY;
    let mut nodes = 0usize;
    let mut lp_iterations = 0usize;
    let mut root_bound = f64::NAN;
    let mut lost_nodes = false;
    let batch = opts.batch.max(1);
    let by_col = problem.column_major();
    let row_bounds: Vec<(f64, f64)> = problem.rows.iter().map(|r| r.activity_bounds()).collect();

    let prune_tol = |inc: f64| opts.rel_gap * inc.abs().max(1.0);

    let status = loop {
        if heap.is_empty() {
            break if incumbent.is_some() { BnbStatus::Optimal } else { BnbStatus::Infeasible };
        }
        if nodes >= opts.max_nodes {
            break BnbStatus::NodeLimit;
        }
        if let Some(limit) = opts.time_limit_s {
            if start.elapsed().as_secs_f64() > limit {
                break if incumbent.is_some() { BnbStatus::GapLimit } else { BnbStatus::TimeLimit };
            }
        }
        let mut round = Vec::with_capacity(batch);
        while round.len() < batch {
            let Some(node) = heap.pop() else { break };
            if let Some((inc, _)) = &incumbent {
                if node.bound >= inc - prune_tol(*inc) {
                    gap_pruned_bound = gap_pruned_bound.min(node.bound);
                    continue;
                }
            }
            round.push(node);
        }
        if round.is_empty() {
            continue;
        }
        let results = map_slice(opts.exec, &round, |node| {
            let mut lower = base_lower.clone();
            let mut upper = base_upper.clone();
            for (k, &j) in int_cols.iter().enumerate() {
                lower[j] = node.lower[k];
                upper[j] = node.upper[k];
            }
            solve_lp_with(problem, &lower, &upper, node.basis.as_deref(), &opts.lp)
        });
        for (node, res) in round.into_iter().zip(results) {
            let lp = res?;
            nodes += 1;
            lp_iterations += lp.iterations;
            if node.id == 0 {
                root_bound = lp.objective;
            }
            match lp.status {
                LpStatus::Infeasible => continue,
                LpStatus::Unbounded => {
                    if node.id == 0 {
                        return Ok(BnbSolution {
                            status: BnbStatus::Unbounded,
                            objective: None,
                            best_bound: f64::NEG_INFINITY,
                            nodes,
                            x: None,
                            root_bound: f64::NEG_INFINITY,
                            lp_iterations,
                        });
                    }
                    lost_nodes = true;
                    continue;
                }
                LpStatus::IterationLimit => {
                    log::warn!("node {} hit the LP iteration limit", node.id);
                    lost_nodes = true;
                    continue;
                }
                LpStatus::Optimal => {}
            }
            if let Some((inc, _)) = &incumbent {
                if lp.objective >= inc - prune_tol(*inc) {
                    gap_pruned_bound = gap_pruned_bound.min(lp.objective);
                    continue;
                }
            }
            match branching_column(&lp.x, &int_cols, opts.int_tol, &opts.priority) {
                None => {
                    let mut x = lp.x;
                    for &j in &int_cols {
                        x[j] = x[j].round();
                    }
                    log::debug!("incumbent {} at node {}", lp.objective, node.id);
                    incumbent = Some((lp.objective, x));
                }
                Some((j, v)) => {
                    if let Some(x) =
                        simple_rounding(problem, &by_col, &row_bounds, &lp.x, &int_cols, &node, opts.int_tol)
                    {
                        let obj = problem.objective_value(&x);
                        if incumbent.as_ref().map_or(true, |(inc, _)| obj < *inc) {
                            log::debug!("rounded incumbent {obj} at node {}", node.id);
                            incumbent = Some((obj, x));
                        }
                        let inc = incumbent.as_ref().map(|(o, _)| *o).unwrap();
                        if lp.objective >= inc - prune_tol(inc) {
                            gap_pruned_bound = gap_pruned_bound.min(lp.objective);
                            continue;
                        }
                    }
                    let k = int_cols.binary_search(&j).expect("integer column");
                    let basis = lp.basis.map(Arc::new);
                    let mut down = Node {
                        id: next_id,
                        depth: node.depth + 1,
                        bound: lp.objective,
                        lower: node.lower.clone(),
                        upper: node.upper.clone(),
                        basis: basis.clone(),
                    };
                    down.upper[k] = v.floor();
                    let mut up = Node {
                        id: next_id + 1,
                        depth: node.depth + 1,
                        bound: lp.objective,
                        lower: node.lower,
                        upper: node.upper,
                        basis,
                    };
                    up.lower[k] = v.ceil();
                    next_id += 2;
                    heap.push(down);
                    heap.push(up);
                }
            }
        }
    };

    let open_bound = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let (objective, x) = match incumbent {
        Some((o, x)) => (Some(o), Some(x)),
        None => (None, None),
    };
    let mut best_bound = open_bound.min(gap_pruned_bound);
    if let Some(o) = objective {
        best_bound = best_bound.min(o);
    }
    if best_bound == f64::INFINITY {
        best_bound = root_bound;
    }
    let status = if status == BnbStatus::Optimal && lost_nodes { BnbStatus::NodeLimit } else { status };
    Ok(BnbSolution { status, objective, best_bound, nodes, x, root_bound, lp_iterations })
}
