use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};

pub const FIT_TOL: f64 = 1e-10;
pub const FIT_MAX_ITERS: usize = 100;

/// Raw moments E[X^k], k = 1..=12, of a sample.
pub fn raw_moments(x: &[f64]) -> [f64; 12] {
    let mut m = [0.0; 12];
    for &v in x {
        let mut p = 1.0;
        for mk in m.iter_mut() {
            p *= v;
            *mk += p;
        }
    }
    let n = x.len() as f64;
    m.iter_mut().for_each(|v| *v /= n);
    m
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// E[p(X)] for a polynomial p given E[X^k] with m[0] = 1.
fn expect(p: &[f64], m: &[f64; 13], shift: usize) -> f64 {
    p.iter().enumerate().map(|(i, c)| c * m[i + shift]).sum()
}

/// Residual of the standardized moment system and its Jacobian.
fn system(theta: &Vector4<f64>, m: &[f64; 13], target: &[f64; 4]) -> (Vector4<f64>, Matrix4<f64>) {
    let p = [theta[0], theta[1], theta[2], theta[3]];
    let mut powers = vec![vec![1.0]];
    for k in 1..=4 {
        let next = poly_mul(&powers[k - 1], &p);
        powers.push(next);
    }
    let mut f = Vector4::zeros();
    let mut jac = Matrix4::zeros();
    for k in 1..=4 {
        f[k - 1] = expect(&powers[k], m, 0) - target[k - 1];
        for l in 0..4 {
            jac[(k - 1, l)] = k as f64 * expect(&powers[k - 1], m, l);
        }
    }
    (f, jac)
}

/// Coefficients (a, b, c, d) of Y = a + bX + cX² + dX³ such that Y has the
/// target mean, variance, skewness and kurtosis, where X has the given raw
/// moments. Damped Newton from the affine solution.
pub fn fit_cubic_transform(target: [f64; 4], seed_moments: &[f64; 12]) -> Result<[f64; 4]> {
    let [mean, var, skew, kurt] = target;
    if !(var > 0.0) || target.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("target variance must be positive and finite, got {var}")));
    }
    let bound = skew * skew + 1.0;
    if kurt < bound {
        return Err(Error::FitFailure { dim: None, residual: bound - kurt });
    }
    let mut m = [1.0; 13];
    m[1..].copy_from_slice(seed_moments);
    let seed_var = m[2] - m[1] * m[1];
    if !(seed_var > 0.0) || m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("seed moments must be finite with positive variance".into()));
    }
    let sd_seed = seed_var.sqrt();
    let goal = [0.0, 1.0, skew, kurt];
    let mut theta = Vector4::new(-m[1] / sd_seed, 1.0 / sd_seed, 0.0, 0.0);
    let (mut f, mut jac) = system(&theta, &m, &goal);
    let mut iters = 0;
    while f.amax() > FIT_TOL && iters < FIT_MAX_ITERS {
        iters += 1;
        let Some(step) = jac.lu().solve(&(-f)) else { break };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = theta + step * lambda;
            let (ft, jt) = system(&trial, &m, &goal);
            if ft.norm() < f.norm() {
                theta = trial;
                f = ft;
                jac = jt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if f.amax() > FIT_TOL {
        return Err(Error::FitFailure { dim: None, residual: f.amax() });
    }
    let sd = var.sqrt();
    Ok([mean + sd * theta[0], sd * theta[1], sd * theta[2], sd * theta[3]])
}

pub fn apply_cubic(c: &[f64; 4], x: f64) -> f64 {
    c[0] + x * (c[1] + x * (c[2] + x * c[3]))
}
