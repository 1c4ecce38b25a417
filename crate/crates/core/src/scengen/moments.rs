use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-dimension first four moments plus the correlation matrix.
///
/// A dimension with zero variance is degenerate: generation sets it to its
/// mean and leaves it out of the correlation step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTargets {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub skewness: Vec<f64>,
    /// Standardized fourth moment (3 for a normal).
    pub kurtosis: Vec<f64>,
    pub correlation: Vec<Vec<f64>>,
}

impl MomentTargets {
    pub fn dims(&self) -> usize {
        self.mean.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dims();
        if [self.variance.len(), self.skewness.len(), self.kurtosis.len(), self.correlation.len()]
            .iter()
            .any(|&l| l != d)
            || self.correlation.iter().any(|r| r.len() != d)
        {
            return Err(Error::InvalidParameter(format!("moment targets must all have {d} dimensions")));
        }
        for k in 0..d {
            let vals = [self.mean[k], self.variance[k], self.skewness[k], self.kurtosis[k]];
            if vals.iter().any(|v| !v.is_finite()) || self.variance[k] < 0.0 {
                return Err(Error::InvalidParameter(format!("dimension {k}: moments must be finite, variance >= 0")));
            }
            if (self.correlation[k][k] - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("correlation diagonal {k} is not 1")));
            }
            for l in 0..k {
                let (a, b) = (self.correlation[k][l], self.correlation[l][k]);
                if (a - b).abs() > 1e-9 || !(-1.0..=1.0).contains(&a) {
                    return Err(Error::InvalidParameter(format!("correlation entry ({k}, {l}) = {a} invalid")));
                }
            }
        }
        Ok(())
    }

    pub fn correlation_matrix(&self) -> DMatrix<f64> {
        let d = self.dims();
        DMatrix::from_fn(d, d, |i, j| self.correlation[i][j])
    }

    pub fn is_degenerate(&self, dim: usize) -> bool {
        self.variance[dim] <= 0.0
    }
}

/// Mean, population variance, skewness and kurtosis of one column.
pub fn column_moments(x: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 <= 0.0 {
        return (mean, 0.0, 0.0, 0.0);
    }
    (mean, m2, m3 / m2.powf(1.5), m4 / (m2 * m2))
}

fn is_constant(x: &[f64], mean: f64, var: f64) -> bool {
    var <= 1e-14 * mean.abs().max(1.0).powi(2) || x.iter().all(|&v| v == x[0])
}

/// Sample statistics with the population (divide by N) convention.
pub fn sample_moments(values: &DMatrix<f64>) -> Result<MomentTargets> {
    let (n, d) = values.shape();
    if n < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 samples for fourth moments, got {n}")));
    }
    let mut t = MomentTargets {
        mean: vec![0.0; d],
        variance: vec![0.0; d],
        skewness: vec![0.0; d],
        kurtosis: vec![0.0; d],
        correlation: vec![vec![0.0; d]; d],
    };
    for k in 0..d {
        let col = values.column(k);
        let (mean, var, skew, kurt) = column_moments(col.as_slice());
        if is_constant(col.as_slice(), mean, var) {
            return Err(Error::DegenerateDimension { dim: k });
        }
        t.mean[k] = mean;
        t.variance[k] = var;
        t.skewness[k] = skew;
        t.kurtosis[k] = kurt;
    }
    t.correlation = correlation(values, &t.mean, &t.variance);
    Ok(t)
}

/// Sample correlation of the columns given their means and variances.
/// Columns with zero variance get a unit diagonal and zero off-diagonals.
pub(crate) fn correlation(values: &DMatrix<f64>, mean: &[f64], var: &[f64]) -> Vec<Vec<f64>> {
    let (n, d) = values.shape();
    let mut r = vec![vec![0.0; d]; d];
    for i in 0..d {
        r[i][i] = 1.0;
        if var[i] <= 0.0 {
            continue;
        }
        let ci = values.column(i);
        for j in 0..i {
            if var[j] <= 0.0 {
                continue;
            }
            let cj = values.column(j);
            let cov = ci.iter().zip(cj.iter()).map(|(a, b)| (a - mean[i]) * (b - mean[j])).sum::<f64>() / n as f64;
            let c = cov / (var[i] * var[j]).sqrt();
            r[i][j] = c;
            r[j][i] = c;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn two_point_distribution() {
        let col: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect();
        let m = sample_moments(&DMatrix::from_column_slice(100, 1, &col)).unwrap();
        assert!(m.mean[0].abs() < 1e-15);
        assert!((m.variance[0] - 1.0).abs() < 1e-15);
        assert!(m.skewness[0].abs() < 1e-15);
        assert!((m.kurtosis[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_column_is_degenerate() {
        let v = DMatrix::from_fn(10, 2, |i, j| if j == 0 { i as f64 } else { 4.2 });
        assert!(matches!(sample_moments(&v), Err(Error::DegenerateDimension { dim: 1 })));
    }

    #[test]
    fn normal_draws_have_kurtosis_near_three() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let col: Vec<f64> = (0..1000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let m = sample_moments(&DMatrix::from_column_slice(1000, 1, &col)).unwrap();
        // oracle: direct summation
        let mean = col.iter().sum::<f64>() / 1000.0;
        let m2 = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 1000.0;
        let m4 = col.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / 1000.0;
        assert!((m.kurtosis[0] - m4 / (m2 * m2)).abs() < 1e-12);
        assert!((m.kurtosis[0] - 3.0).abs() < 0.3);
    }
}
