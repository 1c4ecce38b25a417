use iesplan_milp::exec::{map_range, Execution};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::correlate::{cholesky, decorrelate};
use super::cubic::{apply_cubic, fit_cubic_transform, raw_moments};
use super::moments::{column_moments, correlation, MomentTargets};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HmmOptions {
    pub tol: f64,
    pub max_iters: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for HmmOptions {
    fn default() -> Self {
        HmmOptions { tol: 0.05, max_iters: 50, execution: Execution::default() }
    }
}

/// Errors after one iteration, measured on the standardized scale: mean
/// error in units of the target standard deviation, variance as a ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub max_moment_error: f64,
    pub max_correlation_error: f64,
    /// False when the sample correlation was singular and the target factor
    /// was applied without decorrelating first.
    pub decorrelated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawSampleMatrix {
    /// N × D.
    pub values: DMatrix<f64>,
    pub seed: u64,
    pub iteration_log: Vec<IterationLog>,
    pub best_iteration: usize,
    pub converged: bool,
}

impl RawSampleMatrix {
    pub fn best(&self) -> Option<&IterationLog> {
        self.iteration_log.iter().find(|l| l.iteration == self.best_iteration)
    }
}

/// Standard-normal seed column for one dimension; the stream is keyed by
/// (seed, dimension) so columns do not depend on each other or on order.
pub fn seed_column(seed: u64, dim: usize, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(dim as u64);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn standardize(x: &mut [f64]) {
    let (m, v, _, _) = column_moments(x);
    let sd = if v > 0.0 { v.sqrt() } else { 1.0 };
    x.iter_mut().for_each(|a| *a = (*a - m) / sd);
}

fn shape_column(col: &[f64], skew: f64, kurt: f64) -> Vec<f64> {
    let mut out = match fit_cubic_transform([0.0, 1.0, skew, kurt], &raw_moments(col)) {
        Ok(c) => col.iter().map(|&x| apply_cubic(&c, x)).collect(),
        Err(_) => col.to_vec(),
    };
    standardize(&mut out);
    out
}

fn measure(x: &DMatrix<f64>, skew: &[f64], kurt: &[f64], r: &DMatrix<f64>) -> (f64, f64) {
    let d = x.ncols();
    let mut mom = 0.0f64;
    let mut mean = vec![0.0; d];
    let mut var = vec![0.0; d];
    for k in 0..d {
        let (m, v, s, ku) = column_moments(x.column(k).as_slice());
        mean[k] = m;
        var[k] = v;
        mom = mom.max(m.abs()).max((v - 1.0).abs()).max((s - skew[k]).abs()).max((ku - kurt[k]).abs());
    }
    let c = correlation(x, &mean, &var);
    let mut cor = 0.0f64;
    for i in 0..d {
        for j in 0..i {
            cor = cor.max((c[i][j] - r[(i, j)]).abs());
        }
    }
    (mom, cor)
}

/// Heuristic moment matching: alternate per-column cubic transforms towards
/// the target marginals with a correlation step, returning the best iterate.
pub fn hmm_generate(targets: &MomentTargets, n: usize, seed: u64, opts: &HmmOptions) -> Result<RawSampleMatrix> {
    targets.validate()?;
    let d = targets.dims();
    if n < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 scenarios, got {n}")));
    }
    let active: Vec<usize> = (0..d).filter(|&k| !targets.is_degenerate(k)).collect();
    for &k in &active {
        if targets.kurtosis[k] < targets.skewness[k].powi(2) + 1.0 {
            return Err(Error::FitFailure {
                dim: Some(k),
                residual: targets.skewness[k].powi(2) + 1.0 - targets.kurtosis[k],
            });
        }
    }
    if n < 8 * active.len() {
        log::warn!("{n} scenarios for {} random dimensions; at least {} recommended", active.len(), 8 * active.len());
    }
    let a = active.len();
    let r = DMatrix::from_fn(a, a, |i, j| targets.correlation[active[i]][active[j]]);
    let l = cholesky(&r).map_err(|e| match e {
        Error::NotPositiveSemidefinite { minor } => Error::NotPositiveSemidefinite { minor: active[minor - 1] + 1 },
        other => other,
    })?;
    let lt = l.transpose();
    let skew: Vec<f64> = active.iter().map(|&k| targets.skewness[k]).collect();
    let kurt: Vec<f64> = active.iter().map(|&k| targets.kurtosis[k]).collect();

    let cols = map_range(opts.execution, a, |i| seed_column(seed, active[i], n));
    let mut x = DMatrix::from_fn(n, a, |row, i| cols[i][row]);
    let mut log_rows = Vec::new();
    let mut best = (f64::INFINITY, x.clone(), 0usize);
    let mut converged = false;
    for it in 1..=opts.max_iters.max(1) {
        let shaped = map_range(opts.execution, a, |i| shape_column(x.column(i).as_slice(), skew[i], kurt[i]));
        let y = DMatrix::from_fn(n, a, |row, i| shaped[i][row]);
        let (z, decorrelated) = match decorrelate(&y) {
            Some(u) => (u * &lt, true),
            None => (y * &lt, false),
        };
        let (mom, cor) = measure(&z, &skew, &kurt, &r);
        log_rows.push(IterationLog { iteration: it, max_moment_error: mom, max_correlation_error: cor, decorrelated });
        let score = mom.max(cor);
        if score < best.0 {
            best = (score, z.clone(), it);
        }
        x = z;
        if score <= opts.tol {
            converged = true;
            break;
        }
    }

    let (_, xb, best_iteration) = best;
    let mut values = DMatrix::zeros(n, d);
    for k in 0..d {
        values.column_mut(k).fill(targets.mean[k]);
    }
    for (i, &k) in active.iter().enumerate() {
        let sd = targets.variance[k].sqrt();
        for row in 0..n {
            values[(row, k)] = targets.mean[k] + sd * xb[(row, i)];
        }
    }
    Ok(RawSampleMatrix { values, seed, iteration_log: log_rows, best_iteration, converged })
}
