//! Square roots of symmetric positive semidefinite matrices.

use super::{symmetric_eigen, Matrix};
use crate::math::{abs, sqrt};
use crate::{Error, Result};

/// Relative size below which negative eigenvalues are treated as quadrature
/// noise and clipped to zero.
pub const PSD_CLIP: f64 = 1e-12;

fn clipped_eigenvalues(values: &mut [f64]) -> Result<()> {
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(abs(*v)));
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -PSD_CLIP * scale {
                return Err(Error::NonPsdArgument { min_eigenvalue: *v });
            }
            *v = 0.0;
        }
    }
    Ok(())
}

/// Principal square root by symmetric eigendecomposition.
pub fn psd_sqrt(m: &Matrix) -> Result<Matrix> {
    let mut eig = symmetric_eigen(m)?;
    clipped_eigenvalues(&mut eig.values)?;
    let n = m.rows();
    let v = &eig.vectors;
    let mut out = Matrix::zeros(n, n);
    for (k, &lam) in eig.values.iter().enumerate() {
        let s = sqrt(lam);
        if s == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = v[(i, k)] * s;
            for j in 0..n {
                out[(i, j)] += vik * v[(j, k)];
            }
        }
    }
    out.symmetrize();
    Ok(out)
}

/// `Tr √m`, needing only the eigenvalues.
pub fn psd_sqrt_trace(m: &Matrix) -> Result<f64> {
    let mut eig = symmetric_eigen(m)?;
    clipped_eigenvalues(&mut eig.values)?;
    Ok(eig.values.iter().map(|v| sqrt(*v)).sum())
}
