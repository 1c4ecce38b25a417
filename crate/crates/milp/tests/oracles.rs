//! Randomised cross-checks of the simplex and branch-and-bound against
//! brute-force oracles that share no code with the solver.

use iesplan_milp::{
    branch_and_bound, check_point, solve_lp, BnbOptions, BnbStatus, LpOptions, LpStatus, Problem, Row, Sense, VarKind,
};
use proptest::prelude::*;

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-10 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

fn feasible(p: &Problem, x: &[f64], fixed: &[(usize, f64)]) -> bool {
    let mut full = x.to_vec();
    for &(j, v) in fixed {
        full[j] = v;
    }
    check_point(&Problem { columns: relax(p), ..p.clone() }, &full, 1e-7).is_feasible()
}

fn relax(p: &Problem) -> Vec<iesplan_milp::Column> {
    p.columns.iter().map(|c| iesplan_milp::Column { kind: VarKind::Continuous, ..c.clone() }).collect()
}

/// Minimum of the LP over the free columns (others fixed) by enumerating
/// every vertex of the bounded polytope.
fn vertex_oracle(p: &Problem, fixed: &[(usize, f64)]) -> Option<f64> {
    let n = p.n_cols();
    let free: Vec<usize> = (0..n).filter(|j| !fixed.iter().any(|f| f.0 == *j)).collect();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for r in &p.rows {
        let mut a = vec![0.0; free.len()];
        let mut shift = 0.0;
        for &(j, v) in &r.coeffs {
            if let Some(k) = free.iter().position(|&f| f == j) {
                a[k] = v;
            } else {
                shift += v * fixed.iter().find(|f| f.0 == j).unwrap().1;
            }
        }
        let (lo, hi) = r.activity_bounds();
        for b in [lo, hi] {
            if b.is_finite() {
                planes.push((a.clone(), b - shift));
            }
        }
    }
    for (k, &j) in free.iter().enumerate() {
        let mut e = vec![0.0; free.len()];
        e[k] = 1.0;
        planes.push((e.clone(), p.columns[j].lower));
        planes.push((e, p.columns[j].upper));
    }
    let d = free.len();
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..d).collect();
    let eval = |x: &[f64]| -> Option<f64> {
        let mut full = vec![0.0; n];
        for (k, &j) in free.iter().enumerate() {
            full[j] = x[k];
        }
        if feasible(p, &full, fixed) {
            let mut f = full.clone();
            for &(j, v) in fixed {
                f[j] = v;
            }
            Some(p.objective_value(&f))
        } else {
            None
        }
    };
    if d == 0 {
        return eval(&[]);
    }
    loop {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_dense(a, b) {
            if let Some(v) = eval(&x) {
                best = Some(best.map_or(v, |bv: f64| bv.min(v)));
            }
        }
        // next combination
        let mut k = d;
        loop {
            if k == 0 {
                return best;
            }
            k -= 1;
            if idx[k] < planes.len() - d + k {
                idx[k] += 1;
                for t in k + 1..d {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn sense_of(k: u8) -> Sense {
    match k % 3 {
        0 => Sense::Le,
        1 => Sense::Ge,
        _ => Sense::Eq,
    }
}

type ColSpec = (i32, i32, i32, bool);
type RowSpec = (Vec<i32>, u8, i32);

fn build(cols: &[ColSpec], rows: &[RowSpec]) -> Problem {
    let mut p = Problem::new("rand");
    for (k, &(lo, width, c, int)) in cols.iter().enumerate() {
        let kind = if int { VarKind::Integer } else { VarKind::Continuous };
        p.add_column(format!("x{k}"), lo as f64, (lo + width) as f64, kind, c as f64);
    }
    for (k, (coef, s, rhs)) in rows.iter().enumerate() {
        let coeffs = coef.iter().enumerate().take(cols.len()).map(|(j, &v)| (j, v as f64)).collect();
        p.add_row(Row::new(format!("r{k}"), coeffs, sense_of(*s), *rhs as f64));
    }
    p
}

fn col_strategy() -> impl Strategy<Value = ColSpec> {
    (-3i32..=1, 0i32..=4, -5i32..=5, any::<bool>())
}

fn row_strategy() -> impl Strategy<Value = RowSpec> {
    (prop::collection::vec(-4i32..=4, 3), any::<u8>(), -6i32..=8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn lp_matches_vertex_enumeration(
        cols in prop::collection::vec(col_strategy(), 1..=3),
        rows in prop::collection::vec(row_strategy(), 0..=3),
    ) {
        let p = build(&cols, &rows);
        let lp = solve_lp(&p, &LpOptions::default()).unwrap();
        match vertex_oracle(&p, &[]) {
            None => prop_assert_eq!(lp.status, LpStatus::Infeasible),
            Some(v) => {
                prop_assert_eq!(lp.status, LpStatus::Optimal);
                prop_assert!((lp.objective - v).abs() <= 1e-6 * (1.0 + v.abs()), "lp {} oracle {}", lp.objective, v);
                let relaxed = Problem { columns: relax(&p), ..p.clone() };
                prop_assert!(check_point(&relaxed, &lp.x, 1e-6).is_feasible());
            }
        }
    }

    #[test]
    fn bnb_matches_enumeration(
        cols in prop::collection::vec(col_strategy(), 1..=3),
        rows in prop::collection::vec(row_strategy(), 0..=3),
    ) {
        let p = build(&cols, &rows);
        let ints = p.integer_columns();
        // enumerate integer assignments, oracle the continuous rest
        let mut best: Option<f64> = None;
        let ranges: Vec<Vec<f64>> = ints
            .iter()
            .map(|&j| {
                let c = &p.columns[j];
                (c.lower as i64..=c.upper as i64).map(|v| v as f64).collect()
            })
            .collect();
        let total: usize = ranges.iter().map(|r| r.len()).product();
        for mut k in 0..total {
            let mut fixed = Vec::new();
            for (t, &j) in ints.iter().enumerate() {
                fixed.push((j, ranges[t][k % ranges[t].len()]));
                k /= ranges[t].len();
            }
            if let Some(v) = vertex_oracle(&p, &fixed) {
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
        let s = branch_and_bound(&p, &BnbOptions::default()).unwrap();
        match best {
            None => prop_assert_eq!(s.status, BnbStatus::Infeasible),
            Some(v) => {
                prop_assert_eq!(s.status, BnbStatus::Optimal);
                let obj = s.objective.unwrap();
                prop_assert!((obj - v).abs() <= 1e-6 * (1.0 + v.abs()), "bnb {} oracle {}", obj, v);
                prop_assert!(s.root_bound <= obj + 1e-9);
                prop_assert!(check_point(&p, s.x.as_ref().unwrap(), 1e-6).is_feasible());
            }
        }
    }
}

/// KKT certificate on a larger random LP: primal feasibility, sign-correct
/// reduced costs and row duals, complementary slackness.
#[test]
fn kkt_certificate_on_random_sparse_lps() {
    use rand::{Rng, SeedableRng};
    let opts = LpOptions::default();
    for seed in 0..20u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (n, m) = (80, 50);
        let mut p = Problem::new("kkt");
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
        for j in 0..n {
            p.add_column(format!("x{j}"), 0.0, 10.0, VarKind::Continuous, rng.gen_range(-3.0..3.0));
        }
        for i in 0..m {
            let mut coeffs: Vec<(usize, f64)> = Vec::new();
            for j in 0..n {
                if rng.gen_bool(0.08) {
                    coeffs.push((j, rng.gen_range(-2.0..2.0)));
                }
            }
            let act: f64 = coeffs.iter().map(|&(j, v)| v * x0[j]).sum();
            let sense = sense_of(rng.gen());
            let rhs = match sense {
                Sense::Le => act + rng.gen_range(0.0..1.0),
                Sense::Ge => act - rng.gen_range(0.0..1.0),
                Sense::Eq => act,
            };
            p.add_row(Row::new(format!("r{i}"), coeffs, sense, rhs));
        }
        let s = solve_lp(&p, &opts).unwrap();
        assert_eq!(s.status, LpStatus::Optimal, "seed {seed}");
        assert!(check_point(&p, &s.x, 1e-6).is_feasible());
        let tol = 1e-6;
        for j in 0..n {
            let d = p.objective[j]
                - p.rows
                    .iter()
                    .map(|r| {
                        r.coeffs.iter().find(|e| e.0 == j).map_or(0.0, |e| e.1)
                            * s.duals[p.rows.iter().position(|q| q.name == r.name).unwrap()]
                    })
                    .sum::<f64>();
            let c = &p.columns[j];
            if s.x[j] > c.lower + 1e-6 && s.x[j] < c.upper - 1e-6 {
                assert!(d.abs() < tol, "seed {seed} col {j} interior with d={d}");
            } else if s.x[j] <= c.lower + 1e-6 {
                assert!(d > -tol, "seed {seed} col {j} at lower with d={d}");
            } else {
                assert!(d < tol, "seed {seed} col {j} at upper with d={d}");
            }
        }
        for (i, r) in p.rows.iter().enumerate() {
            let (lo, hi) = r.activity_bounds();
            let a = s.row_activity[i];
            let y = s.duals[i];
            if a > lo + 1e-6 && a < hi - 1e-6 {
                assert!(y.abs() < tol, "seed {seed} row {i} slack with dual {y}");
            } else if (a - hi).abs() <= 1e-6 && lo < hi {
                assert!(y < tol, "seed {seed} row {i} at upper with dual {y}");
            } else if (a - lo).abs() <= 1e-6 && lo < hi {
                assert!(y > -tol, "seed {seed} row {i} at lower with dual {y}");
            }
        }
        // strong duality through the certificate
        assert!(s.objective.is_finite());
    }
}
