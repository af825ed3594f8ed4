//! Hermitian eigenproblems. nalgebra's `SymmetricEigen` loses accuracy on
//! the heavily degenerate spectra of spin-only Hamiltonians, so the
//! decomposition is delegated to faer and checked by reconstruction.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::NumError;

const RECONSTRUCTION_TOL: f64 = 1e-10;

/// Spectral decomposition of a Hermitian matrix, usable to evaluate
/// functions of it.
pub struct HermitianEigen {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    pub fn new(h: &DMatrix<Complex64>) -> Result<Self, NumError> {
        let n = h.nrows();
        let m = Mat::<Complex64>::from_fn(n, n, |r, c| h[(r, c)]);
        let eig = m.self_adjoint_eigen(Side::Lower).map_err(|_| NumError::Eigen(f64::NAN))?;
        let s = eig.S().column_vector();
        let u = eig.U();
        let values: Vec<f64> = (0..n).map(|k| s[k].re).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| u[(r, c)]);
        let out = Self { values, vectors };
        let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let defect = (out.function(|l| Complex64::new(l, 0.0)) - h).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
        if !(defect <= RECONSTRUCTION_TOL) {
            return Err(NumError::Eigen(defect));
        }
        Ok(out)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.values.clone()
    }

    /// `f(H)` for a function of the eigenvalue.
    pub fn function<F: Fn(f64) -> Complex64>(&self, f: F) -> DMatrix<Complex64> {
        let d = DVector::from_iterator(self.values.len(), self.values.iter().map(|&l| f(l)));
        let mut scaled = self.vectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= d[k];
        }
        scaled * self.vectors.adjoint()
    }
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<f64>, NumError> {
    Ok(HermitianEigen::new(h)?.eigenvalues())
}
