use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

const PSD_TOL: f64 = 1e-10;

/// Lower-triangular L with L·Lᵀ = R. Semidefinite matrices are accepted: a
/// zero pivot yields a zero column as long as the rest of that column is
/// also zero.
pub fn cholesky(r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = r.nrows();
    if r.ncols() != d {
        return Err(Error::InvalidParameter("correlation matrix must be square".into()));
    }
    let mut l = DMatrix::<f64>::zeros(d, d);
    for k in 0..d {
        let mut piv = r[(k, k)];
        for j in 0..k {
            piv -= l[(k, j)] * l[(k, j)];
        }
        if piv < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { minor: k + 1 });
        }
        let lkk = if piv > PSD_TOL { piv.sqrt() } else { 0.0 };
        l[(k, k)] = lkk;
        for i in k + 1..d {
            let mut s = r[(i, k)];
            for j in 0..k {
                s -= l[(i, j)] * l[(k, j)];
            }
            if lkk > 0.0 {
                l[(i, k)] = s / lkk;
            } else if s.abs() > 1e-8 {
                return Err(Error::NotPositiveSemidefinite { minor: k + 1 });
            }
        }
    }
    Ok(l)
}

/// values · Lᵀ for L·Lᵀ = R.
pub fn impose_correlation(values: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if r.nrows() != values.ncols() {
        return Err(Error::InvalidParameter(format!(
            "correlation is {}x{} for {} columns",
            r.nrows(),
            r.ncols(),
            values.ncols()
        )));
    }
    let l = cholesky(r)?;
    Ok(values * l.transpose())
}

/// Map standardized columns to exactly uncorrelated ones, or `None` when the
/// sample correlation is singular (e.g. fewer samples than dimensions).
pub fn decorrelate(values: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = values.nrows() as f64;
    let r = values.transpose() * values / n;
    let l = cholesky(&r).ok()?;
    if (0..l.nrows()).any(|k| l[(k, k)] < 1e-8) {
        return None;
    }
    let lt = l.transpose();
    let inv = lt.try_inverse()?;
    Some(values * inv)
}

/// Nearest-ish valid correlation matrix: clip negative eigenvalues and
/// rescale to a unit diagonal.
pub fn repair_psd(r: &DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(r.clone());
    if eig.eigenvalues.iter().all(|&v| v >= floor) {
        return r.clone();
    }
    let clipped = eig.eigenvalues.map(|v| v.max(floor));
    let m = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    let d: Vec<f64> = (0..m.nrows()).map(|i| m[(i, i)].sqrt()).collect();
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| if i == j { 1.0 } else { m[(i, j)] / (d[i] * d[j]) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scengen::moments::sample_moments;

    fn uncorrelated_pair() -> DMatrix<f64> {
        // Columns of ±1 patterns with zero mean, unit variance and zero
        // cross-product.
        let a = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let b = [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
        DMatrix::from_fn(8, 2, |i, j| if j == 0 { a[i] } else { b[i] })
    }

    #[test]
    fn identity_is_noop() {
        let x = uncorrelated_pair();
        assert_eq!(impose_correlation(&x, &DMatrix::identity(2, 2)).unwrap(), x);
    }

    #[test]
    fn imposes_exact_correlation() {
        let r = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let y = impose_correlation(&uncorrelated_pair(), &r).unwrap();
        let m = sample_moments(&y).unwrap();
        assert!((m.correlation[0][1] - 0.5).abs() < 1e-10);
        assert!(m.mean.iter().all(|v| v.abs() < 1e-10));
        assert!(m.variance.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn rejects_non_correlation_matrix() {
        let r = DMatrix::from_row_slice(2, 2, &[1.0, 1.2, 1.2, 1.0]);
        assert!(matches!(
            impose_correlation(&uncorrelated_pair(), &r),
            Err(Error::NotPositiveSemidefinite { minor: 2 })
        ));
    }

    #[test]
    fn semidefinite_is_accepted() {
        let r = DMatrix::from_element(3, 3, 1.0);
        let l = cholesky(&r).unwrap();
        assert!((&l * l.transpose() - r).amax() < 1e-12);
    }

    #[test]
    fn repair_yields_valid_matrix() {
        let r = DMatrix::from_row_slice(3, 3, &[1.0, 0.9, -0.9, 0.9, 1.0, 0.9, -0.9, 0.9, 1.0]);
        assert!(cholesky(&r).is_err());
        let fixed = repair_psd(&r, 1e-6);
        assert!(cholesky(&fixed).is_ok());
        assert!((0..3).all(|i| (fixed[(i, i)] - 1.0).abs() < 1e-12));
    }
}
