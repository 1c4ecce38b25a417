//! Sparse LU factorisation of a simplex basis.
//!
//! Right-looking Gaussian elimination with Markowitz pivot selection and
//! threshold partial pivoting. Columns are kept in count buckets so that the
//! (very common) singleton columns are eliminated without any search.

/// Relative threshold for accepting a pivot within its column.
const PIVOT_THRESHOLD: f64 = 0.1;
/// Absolute magnitude below which an entry is never used as a pivot.
const ABS_PIVOT_TOL: f64 = 1e-11;
/// Number of low-count columns inspected per Markowitz search.
const SEARCH_COLS: usize = 4;

#[derive(Debug, Clone)]
struct Step {
    row: usize,
    col: usize,
    diag: f64,
    /// Multipliers `(row, l)`: row `row_i -= l * row_pivot`.
    l: Vec<(usize, f64)>,
    /// Off-diagonal entries of the pivot row `(col, value)`.
    u: Vec<(usize, f64)>,
}

/// Rows and columns left without a pivot when the basis is singular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Singular {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LuFactors {
    m: usize,
    steps: Vec<Step>,
}

struct Buckets {
    head: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    count: Vec<usize>,
    live: Vec<bool>,
}

const NIL: usize = usize::MAX;

impl Buckets {
    fn new(m: usize) -> Self {
        Buckets {
            head: vec![NIL; m + 2],
            next: vec![NIL; m],
            prev: vec![NIL; m],
            count: vec![0; m],
            live: vec![false; m],
        }
    }

    fn insert(&mut self, c: usize, count: usize) {
        let count = count.min(self.head.len() - 1);
        self.count[c] = count;
        self.live[c] = true;
        self.prev[c] = NIL;
        self.next[c] = self.head[count];
        if self.head[count] != NIL {
            self.prev[self.head[count]] = c;
        }
        self.head[count] = c;
    }

    fn remove(&mut self, c: usize) {
        if !self.live[c] {
            return;
        }
        let (p, n) = (self.prev[c], self.next[c]);
        if p != NIL {
            self.next[p] = n;
        } else {
            self.head[self.count[c]] = n;
        }
        if n != NIL {
            self.prev[n] = p;
        }
        self.live[c] = false;
    }

    fn update(&mut self, c: usize, count: usize) {
        self.remove(c);
        self.insert(c, count);
    }
}

impl LuFactors {
    /// Factorise the `m x m` matrix whose `k`-th column is `columns[k]`
    /// (entries `(row, value)`).
    pub fn factorize(m: usize, columns: &[Vec<(usize, f64)>]) -> Result<Self, (Self, Singular)> {
        debug_assert_eq!(columns.len(), m);
        let mut cols: Vec<Vec<(usize, f64)>> = columns.to_vec();
        let mut row_pat: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (c, col) in cols.iter().enumerate() {
            for &(r, _) in col {
                row_pat[r].push(c);
            }
        }
        let mut buckets = Buckets::new(m);
        for (c, col) in cols.iter().enumerate() {
            buckets.insert(c, col.len());
        }
        let mut row_done = vec![false; m];
        let mut col_done = vec![false; m];
        let mut work_pos = vec![NIL; m];
        let mut steps = Vec::with_capacity(m);
        let mut bad_cols = Vec::new();

        for _ in 0..m {
            // Empty active columns cannot be pivoted.
            while buckets.head[0] != NIL {
                let c = buckets.head[0];
                buckets.remove(c);
                col_done[c] = true;
                bad_cols.push(c);
            }
            let Some((pr, pc)) = Self::choose_pivot(&cols, &row_pat, &buckets, m) else {
                // Every remaining column is numerically empty.
                let mut any = false;
                for c in 0..m {
                    if buckets.live[c] {
                        buckets.remove(c);
                        col_done[c] = true;
                        bad_cols.push(c);
                        any = true;
                    }
                }
                if any {
                    continue;
                }
                break;
            };
            let pivot_col = std::mem::take(&mut cols[pc]);
            buckets.remove(pc);
            col_done[pc] = true;
            row_done[pr] = true;
            let diag = pivot_col.iter().find(|e| e.0 == pr).map(|e| e.1).unwrap_or(0.0);
            let l: Vec<(usize, f64)> = pivot_col.iter().filter(|e| e.0 != pr).map(|&(i, v)| (i, v / diag)).collect();
            for &(i, _) in &pivot_col {
                if let Some(k) = row_pat[i].iter().position(|&c| c == pc) {
                    row_pat[i].swap_remove(k);
                }
            }
            let pivot_row_cols = std::mem::take(&mut row_pat[pr]);
            let mut u = Vec::with_capacity(pivot_row_cols.len());
            for &k in &pivot_row_cols {
                let col = &mut cols[k];
                let Some(idx) = col.iter().position(|e| e.0 == pr) else { continue };
                let ukv = col.swap_remove(idx).1;
                u.push((k, ukv));
                if !l.is_empty() && ukv != 0.0 {
                    for (idx, &(r, _)) in col.iter().enumerate() {
                        work_pos[r] = idx;
                    }
                    for &(i, li) in &l {
                        let p = work_pos[i];
                        if p != NIL {
                            col[p].1 -= li * ukv;
                        } else {
                            col.push((i, -li * ukv));
                            row_pat[i].push(k);
                        }
                    }
                    for &(r, _) in col.iter() {
                        work_pos[r] = NIL;
                    }
                }
                let cnt = col.len();
                buckets.update(k, cnt);
            }
            steps.push(Step { row: pr, col: pc, diag, l, u });
        }

        let lu = LuFactors { m, steps };
        if bad_cols.is_empty() {
            Ok(lu)
        } else {
            let rows = (0..m).filter(|&r| !row_done[r]).collect();
            bad_cols.sort_unstable();
            Err((lu, Singular { rows, cols: bad_cols }))
        }
    }

    fn choose_pivot(
        cols: &[Vec<(usize, f64)>],
        row_pat: &[Vec<usize>],
        buckets: &Buckets,
        m: usize,
    ) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None; // (cost, row, col)
        let mut inspected = 0;
        for count in 1..buckets.head.len() {
            let mut c = buckets.head[count];
            while c != NIL {
                let col = &cols[c];
                let colmax = col.iter().fold(0.0f64, |a, e| a.max(e.1.abs()));
                if colmax > ABS_PIVOT_TOL {
                    for &(r, v) in col {
                        if v.abs() >= PIVOT_THRESHOLD * colmax && v.abs() > ABS_PIVOT_TOL {
                            let cost = (row_pat[r].len() - 1) * (col.len() - 1);
                            let better = match best {
                                None => true,
                                Some((bc, br, bcol)) => cost < bc || (cost == bc && (c, r) < (bcol, br)),
                            };
                            if better {
                                best = Some((cost, r, c));
                            }
                        }
                    }
                    inspected += 1;
                }
                if best.is_some_and(|b| b.0 == 0) || inspected >= SEARCH_COLS {
                    return best.map(|(_, r, c)| (r, c));
                }
                c = buckets.next[c];
            }
            if count > m {
                break;
            }
        }
        best.map(|(_, r, c)| (r, c))
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// Pivot pairs `(row, col)` that were eliminated.
    pub fn pivots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.steps.iter().map(|s| (s.row, s.col))
    }

    /// Solve `B x = b`. `b` is indexed by row and overwritten; the result is
    /// indexed by column.
    pub fn solve(&self, b: &mut [f64], x: &mut [f64]) {
        for s in &self.steps {
            let br = b[s.row];
            if br != 0.0 {
                for &(i, l) in &s.l {
                    b[i] -= l * br;
                }
            }
        }
        for s in self.steps.iter().rev() {
            let mut v = b[s.row];
            for &(k, u) in &s.u {
                v -= u * x[k];
            }
            x[s.col] = v / s.diag;
        }
    }

    /// Solve `B^T y = c`. `c` is indexed by column and overwritten; the result
    /// is indexed by row.
    pub fn solve_transpose(&self, c: &mut [f64], y: &mut [f64]) {
        for s in &self.steps {
            let w = c[s.col] / s.diag;
            y[s.row] = w;
            if w != 0.0 {
                for &(k, u) in &s.u {
                    c[k] -= u * w;
                }
            }
        }
        for s in self.steps.iter().rev() {
            let mut acc = 0.0;
            for &(i, l) in &s.l {
                acc += l * y[i];
            }
            y[s.row] -= acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_to_cols(a: &[Vec<f64>]) -> Vec<Vec<(usize, f64)>> {
        let m = a.len();
        (0..m).map(|c| (0..m).filter(|&r| a[r][c] != 0.0).map(|r| (r, a[r][c])).collect()).collect()
    }

    fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    #[test]
    fn solves_small_dense_system() {
        let a = vec![
            vec![4.0, 1.0, 0.0, 2.0],
            vec![1.0, 3.0, 1.0, 0.0],
            vec![0.0, 1.0, 5.0, 1.0],
            vec![2.0, 0.0, 1.0, 6.0],
        ];
        let lu = LuFactors::factorize(4, &dense_to_cols(&a)).unwrap();
        let xt = [1.0, -2.0, 0.5, 3.0];
        let mut b = matvec(&a, &xt);
        let mut x = vec![0.0; 4];
        lu.solve(&mut b, &mut x);
        for (p, q) in x.iter().zip(xt) {
            assert!((p - q).abs() < 1e-12);
        }
        // transpose
        let at: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| a[j][i]).collect()).collect();
        let mut c = matvec(&at, &xt);
        let mut y = vec![0.0; 4];
        lu.solve_transpose(&mut c, &mut y);
        for (p, q) in y.iter().zip(xt) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn permuted_identity_with_negative_signs() {
        let cols = vec![vec![(2, -1.0)], vec![(0, -1.0)], vec![(1, 2.0), (2, 1.0)]];
        let lu = LuFactors::factorize(3, &cols).unwrap();
        let mut b = vec![1.0, 4.0, 3.0];
        let mut x = vec![0.0; 3];
        lu.solve(&mut b, &mut x);
        // -x1 = 1, 2 x2 = 4, -x0 + x2 = 3
        assert_eq!(x, vec![-1.0, -1.0, 2.0]);
    }

    #[test]
    fn reports_singular_columns() {
        let cols = vec![vec![(0, 1.0), (1, 1.0)], vec![(0, 2.0), (1, 2.0)], vec![(2, 1.0)]];
        let (_, sing) = LuFactors::factorize(3, &cols).unwrap_err();
        assert_eq!(sing.cols.len(), 1);
        assert_eq!(sing.rows.len(), 1);
    }
}
