use ndarray::{Array1, Array2, Axis as NdAxis, ShapeBuilder};
use ndarray_linalg::{Eigh, UPLO};

use crate::error::{Error, Result};
use crate::{Matrix, C64};

/// Tolerance for accepting an operator as Hermitian before exponentiation.
pub const HERMITIAN_TOL: f64 = 1e-8;

pub fn identity(d: usize) -> Matrix {
    Array2::eye(d)
}

pub fn dagger(m: &Matrix) -> Matrix {
    m.t().mapv(|v| v.conj())
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn hermiticity_deviation(m: &Matrix) -> f64 {
    let (r, c) = m.dim();
    if r != c {
        return f64::INFINITY;
    }
    let mut dev = 0.0f64;
    for i in 0..r {
        for j in i..r {
            dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    dev
}

pub fn ensure_hermitian(m: &Matrix, tol: f64) -> Result<()> {
    let deviation = hermiticity_deviation(m);
    if deviation <= tol {
        Ok(())
    } else {
        Err(Error::NonHermitian { deviation })
    }
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn eigh(m: &Matrix) -> Result<(Array1<f64>, Matrix)> {
    // The LAPACK wrapper conjugates eigenvectors of row-major complex input,
    // so always hand it a column-major copy.
    let mut f = Array2::zeros(m.dim().f());
    f.assign(m);
    Ok(f.eigh(UPLO::Lower)?)
}

/// Cached spectral decomposition for repeated functions of one operator.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Array1<f64>,
    pub vectors: Matrix,
}

impl HermitianEigen {
    pub fn new(h: &Matrix) -> Result<Self> {
        ensure_hermitian(h, HERMITIAN_TOL)?;
        let (values, vectors) = eigh(h)?;
        Ok(Self { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// `exp(-i t H)`.
    pub fn exp_i(&self, t: f64) -> Matrix {
        let phases = self.values.mapv(|e| C64::from_polar(1.0, -t * e));
        let scaled = &self.vectors * &phases.insert_axis(NdAxis(0));
        scaled.dot(&dagger(&self.vectors))
    }

    /// Coefficients of `v` in the eigenbasis.
    pub fn to_eigenbasis(&self, v: &Array1<C64>) -> Array1<C64> {
        dagger(&self.vectors).dot(v)
    }

    /// `exp(-i t H) v` given `v` already expressed in the eigenbasis.
    pub fn evolve_from_eigenbasis(&self, coeffs: &Array1<C64>, t: f64) -> Array1<C64> {
        let rotated: Array1<C64> = coeffs
            .iter()
            .zip(self.values.iter())
            .map(|(c, &e)| c * C64::from_polar(1.0, -t * e))
            .collect();
        self.vectors.dot(&rotated)
    }
}

/// `exp(-i t H)` through the eigendecomposition of Hermitian `H`.
pub fn mat_exp_hermitian(h: &Matrix, t: f64) -> Result<Matrix> {
    Ok(HermitianEigen::new(h)?.exp_i(t))
}
