//! Solver-independent feasibility check of a candidate point.

use crate::problem::Problem;

#[derive(Debug, Clone, Default)]
pub struct FeasibilityReport {
    pub max_row_violation: f64,
    pub max_bound_violation: f64,
    pub max_integrality_violation: f64,
    /// Human-readable description of each violation above tolerance.
    pub violations: Vec<String>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check rows, bounds and integrality of `x` against `problem` with absolute
/// tolerance `tol`, reading nothing but the problem data.
pub fn check_point(problem: &Problem, x: &[f64], tol: f64) -> FeasibilityReport {
    let mut rep = FeasibilityReport::default();
    if x.len() != problem.n_cols() {
        rep.violations.push(format!("point has {} entries for {} columns", x.len(), problem.n_cols()));
        return rep;
    }
    for (j, c) in problem.columns.iter().enumerate() {
        let v = (c.lower - x[j]).max(x[j] - c.upper).max(0.0);
        rep.max_bound_violation = rep.max_bound_violation.max(v);
        if v > tol || x[j].is_nan() {
            rep.violations.push(format!("column {} = {} outside [{}, {}]", c.name, x[j], c.lower, c.upper));
        }
        if c.kind.is_integral() {
            let f = (x[j] - x[j].round()).abs();
            rep.max_integrality_violation = rep.max_integrality_violation.max(f);
            if f > tol {
                rep.violations.push(format!("column {} = {} is not integral", c.name, x[j]));
            }
        }
    }
    for r in &problem.rows {
        let a = r.activity(x);
        let (lo, hi) = r.activity_bounds();
        let v = (lo - a).max(a - hi).max(0.0);
        rep.max_row_violation = rep.max_row_violation.max(v);
        if v > tol || a.is_nan() {
            rep.violations.push(format!("row {} activity {} outside [{}, {}]", r.name, a, lo, hi));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Row, Sense, VarKind};

    #[test]
    fn flags_each_kind_of_violation() {
        let mut p = Problem::new("v");
        p.add_column("x", 0.0, 1.0, VarKind::Integer, 0.0);
        p.add_row(Row::new("r", vec![(0, 1.0)], Sense::Ge, 0.8));
        assert!(check_point(&p, &[1.0], 1e-9).is_feasible());
        let rep = check_point(&p, &[0.5], 1e-9);
        assert_eq!(rep.violations.len(), 2);
        let rep = check_point(&p, &[2.0], 1e-9);
        assert_eq!(rep.violations.len(), 1);
    }
}
