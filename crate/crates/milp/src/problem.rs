//! Sparse MILP container shared by the simplex, branch-and-bound and MPS code.

use std::collections::HashSet;

use crate::error::MilpError;

/// Integrality class of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

impl VarKind {
    pub fn is_integral(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

/// Row sense. `Le` is `a·x <= rhs`, `Ge` is `a·x >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

/// A linear row. Coefficients are kept sorted by column id with no duplicates
/// and no explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    /// MPS-style range. `None` for ordinary rows.
    pub range: Option<f64>,
}

impl Row {
    pub fn new(name: impl Into<String>, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Self {
        let mut coeffs: Vec<(usize, f64)> = coeffs.into_iter().filter(|&(_, v)| v != 0.0).collect();
        coeffs.sort_by_key(|&(c, _)| c);
        Row { name: name.into(), coeffs, sense, rhs, range: None }
    }

    /// Activity interval `[lo, hi]` implied by sense, rhs and range.
    pub fn activity_bounds(&self) -> (f64, f64) {
        match (self.sense, self.range) {
            (Sense::Le, None) => (f64::NEG_INFINITY, self.rhs),
            (Sense::Ge, None) => (self.rhs, f64::INFINITY),
            (Sense::Eq, None) => (self.rhs, self.rhs),
            (Sense::Le, Some(r)) => (self.rhs - r.abs(), self.rhs),
            (Sense::Ge, Some(r)) => (self.rhs, self.rhs + r.abs()),
            (Sense::Eq, Some(r)) if r >= 0.0 => (self.rhs, self.rhs + r),
            (Sense::Eq, Some(r)) => (self.rhs + r, self.rhs),
        }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(c, v)| v * x[c]).sum()
    }
}

/// Minimisation problem `min c·x  s.t.  rows, lower <= x <= upper, integrality`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Problem {
    pub name: String,
    pub columns: Vec<Column>,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

impl Problem {
    pub fn new(name: impl Into<String>) -> Self {
        Problem { name: name.into(), ..Default::default() }
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_column(&mut self, name: impl Into<String>, lower: f64, upper: f64, kind: VarKind, cost: f64) -> usize {
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0.0), upper.min(1.0)),
            _ => (lower, upper),
        };
        self.columns.push(Column { name: name.into(), lower, upper, kind });
        self.objective.push(cost);
        self.columns.len() - 1
    }

    pub fn add_row(&mut self, row: Row) -> usize {
        self.rows.push(row);
        self.rows.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.coeffs.len()).sum()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn integer_columns(&self) -> Vec<usize> {
        self.columns.iter().enumerate().filter(|(_, c)| c.kind.is_integral()).map(|(j, _)| j).collect()
    }

    /// Column-major copy of the constraint matrix: for each column the list of
    /// `(row, value)` pairs in row order.
    pub fn column_major(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.n_cols()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in &row.coeffs {
                cols[j].push((i, v));
            }
        }
        cols
    }

    /// Structural checks: every row references valid columns, no duplicate
    /// entries, unique names, consistent bounds.
    pub fn validate(&self) -> Result<(), MilpError> {
        if self.objective.len() != self.columns.len() {
            return Err(MilpError::InvalidModel(format!(
                "objective has {} entries for {} columns",
                self.objective.len(),
                self.columns.len()
            )));
        }
        let mut names = HashSet::with_capacity(self.columns.len());
        for c in &self.columns {
            if !names.insert(c.name.as_str()) {
                return Err(MilpError::InvalidModel(format!("duplicate column name {}", c.name)));
            }
            if c.lower.is_nan() || c.upper.is_nan() || c.lower > c.upper {
                return Err(MilpError::InvalidModel(format!(
                    "column {} has bounds [{}, {}]",
                    c.name, c.lower, c.upper
                )));
            }
        }
        let mut row_names = HashSet::with_capacity(self.rows.len());
        for r in &self.rows {
            if !row_names.insert(r.name.as_str()) {
                return Err(MilpError::InvalidModel(format!("duplicate row name {}", r.name)));
            }
            let mut prev: Option<usize> = None;
            for &(j, v) in &r.coeffs {
                if j >= self.columns.len() {
                    return Err(MilpError::InvalidModel(format!("row {} references column {}", r.name, j)));
                }
                if prev.is_some_and(|p| p >= j) {
                    return Err(MilpError::InvalidModel(format!(
                        "row {} has unsorted or duplicate entry for column {}",
                        r.name, j
                    )));
                }
                if !v.is_finite() {
                    return Err(MilpError::InvalidModel(format!("row {} has non-finite coefficient", r.name)));
                }
                prev = Some(j);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_drops_zeros_and_sorts() {
        let r = Row::new("r", vec![(3, 1.0), (1, 0.0), (0, -2.0)], Sense::Le, 1.0);
        assert_eq!(r.coeffs, vec![(0, -2.0), (3, 1.0)]);
    }

    #[test]
    fn validate_rejects_duplicates() {
        let mut p = Problem::new("p");
        p.add_column("x", 0.0, 1.0, VarKind::Continuous, 0.0);
        p.add_row(Row { name: "r".into(), coeffs: vec![(0, 1.0), (0, 2.0)], sense: Sense::Le, rhs: 0.0, range: None });
        assert!(p.validate().is_err());
    }

    #[test]
    fn range_bounds_follow_mps_rules() {
        let mut r = Row::new("r", vec![(0, 1.0)], Sense::Eq, 4.0);
        r.range = Some(-2.0);
        assert_eq!(r.activity_bounds(), (2.0, 4.0));
        r.sense = Sense::Ge;
        assert_eq!(r.activity_bounds(), (4.0, 6.0));
    }
}
