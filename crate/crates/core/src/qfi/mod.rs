//! Fisher information: numerics in this file, closed forms in
//! [`closed_form`] so that simulation and analytics never share code.

pub mod closed_form;

use ndarray::Array1;
use ndarray_linalg::SVD;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::quantum::{dagger, eigh, ensure_hermitian, DensityMatrix, HermitianEigen, StateVector, HERMITIAN_TOL};
use crate::{Matrix, C64};

pub use closed_form::{
    analytic_haar_avg, depolarize_factor, haar_ramsey_loss_avg, loss_qfi_closed_form, loss_remaining_probability,
    sector_generator, weingarten_haar_avg, GeneratorDescriptor,
};

/// Default eigenvalue-pair cutoff for [`qfi_mixed`], relative to the trace.
pub const DEFAULT_MIXED_TOL: f64 = 1e-12;

/// Default step of [`qfi_fd_oracle`].
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Default probe angle of [`cfi_fiducial_measurement`].
pub const DEFAULT_THETA: f64 = 1e-3;

/// Eigenvalues of `rho` below this are treated as exact zeros when taking
/// matrix square roots.
const SQRT_CLAMP: f64 = 1e-12;

/// Monte-Carlo estimate with seed provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QfiStats {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub master_seed: u64,
    pub ensemble: String,
}

impl QfiStats {
    /// Mean and standard error of `values`, summed in index order.
    pub fn from_samples(values: &[f64], master_seed: u64, ensemble: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("at least one sample is required"));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std_error = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std_error,
            samples: values.len(),
            master_seed,
            ensemble: ensemble.into(),
        })
    }

    /// `|mean - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            return if self.mean == target { 0.0 } else { f64::INFINITY };
        }
        (self.mean - target).abs() / self.std_error
    }
}

fn check_operator(dim: usize, g: &Matrix) -> Result<()> {
    ensure_dim(dim, g.nrows())?;
    ensure_dim(dim, g.ncols())?;
    ensure_hermitian(g, HERMITIAN_TOL)
}

/// `<G^2> - <G>^2` in a pure state.
pub fn variance(state: &StateVector, g: &Matrix) -> Result<f64> {
    check_operator(state.dim(), g)?;
    let a = state.amplitudes();
    let ga = g.dot(a);
    let mean: C64 = a.iter().zip(ga.iter()).map(|(x, y)| x.conj() * y).sum();
    let second: f64 = ga.iter().map(|v| v.norm_sqr()).sum();
    Ok((second - mean.re * mean.re).max(0.0))
}

/// `4 Var(G)`.
pub fn qfi_pure(state: &StateVector, g: &Matrix) -> Result<f64> {
    Ok(4.0 * variance(state, g)?)
}

/// Mixed-state QFI for the unitary family `exp(-i theta G) rho exp(i theta G)`.
pub fn qfi_mixed(rho: &DensityMatrix, g: &Matrix, tol: f64) -> Result<f64> {
    check_operator(rho.dim(), g)?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let (vals, vecs) = eigh(rho.matrix())?;
    let gg = dagger(&vecs).dot(g).dot(&vecs);
    let cut = tol * rho.trace();
    let d = vals.len();
    let mut f = 0.0;
    for i in 0..d {
        for j in 0..d {
            let s = vals[i] + vals[j];
            if s > cut {
                f += (vals[i] - vals[j]).powi(2) / s * gg[[i, j]].norm_sqr();
            }
        }
    }
    Ok(2.0 * f)
}

/// QFI of a general family from `rho` and `d rho / d theta`.
pub fn qfi_from_derivative(rho: &DensityMatrix, drho: &Matrix, tol: f64) -> Result<f64> {
    check_operator(rho.dim(), drho)?;
    let (vals, vecs) = eigh(rho.matrix())?;
    let dd = dagger(&vecs).dot(drho).dot(&vecs);
    let cut = tol * rho.trace();
    let d = vals.len();
    let mut f = 0.0;
    for i in 0..d {
        for j in 0..d {
            let s = vals[i] + vals[j];
            if s > cut {
                f += dd[[i, j]].norm_sqr() / s;
            }
        }
    }
    Ok(2.0 * f)
}

fn psd_sqrt(m: &Matrix) -> Result<Matrix> {
    let (vals, vecs) = eigh(m)?;
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    if let Some(min) = vals.iter().copied().reduce(f64::min) {
        if min < -1e-8 * scale {
            return Err(Error::InvalidState(format!(
                "matrix not positive semidefinite (eigenvalue {min:e})"
            )));
        }
    }
    let roots: Array1<C64> = vals.mapv(|v| C64::new(if v > SQRT_CLAMP * scale { v.sqrt() } else { 0.0 }, 0.0));
    let scaled = &vecs * &roots.insert_axis(ndarray::Axis(0));
    Ok(scaled.dot(&dagger(&vecs)))
}

/// Root fidelity `Tr|sqrt(rho) sqrt(sigma)|`.
pub fn root_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    ensure_dim(rho.dim(), sigma.dim())?;
    let m = psd_sqrt(rho.matrix())?.dot(&psd_sqrt(sigma.matrix())?);
    let (_, s, _) = m.svd(false, false)?;
    Ok(s.sum())
}

/// Independent QFI estimate from the Bures distance between
/// `rho(theta0 - h/2)` and `rho(theta0 + h/2)`: `8 (1 - sqrt F) / h^2`.
pub fn qfi_fd_oracle<F>(family: F, theta0: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    if !(h > 0.0) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let a = family(theta0 - h / 2.0)?;
    let b = family(theta0 + h / 2.0)?;
    let f = root_fidelity(&a, &b)?;
    Ok((8.0 * (1.0 - f) / (h * h)).max(0.0))
}

/// Real symmetric 2x2 Fisher information matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QfiMatrix {
    pub entries: [[f64; 2]; 2],
}

impl QfiMatrix {
    pub fn is_psd(&self, tol: f64) -> bool {
        let [[a, b], [c, d]] = self.entries;
        (b - c).abs() <= tol && a >= -tol && d >= -tol && a * d - b * c >= -tol * (1.0 + a.abs() * d.abs())
    }

    /// `|F_12| / mean(F_11, F_22)`.
    pub fn off_diagonal_ratio(&self) -> f64 {
        let [[a, b], [_, d]] = self.entries;
        b.abs() / (0.5 * (a + d))
    }
}

/// QFIM at the origin of `Ubar e^{i t1 G1} e^{i t2 G2} e^{t1 t2 [G1,G2]/2} U |0>`.
///
/// The derivatives there are `i Ubar G_j U |0>`, so the entries reduce to
/// the symmetrised covariance of `G_1, G_2` in `U|0>`.
pub fn qfim_two_param(u: &Matrix, g1: &Matrix, g2: &Matrix) -> Result<QfiMatrix> {
    let d = u.nrows();
    ensure_dim(d, u.ncols())?;
    check_operator(d, g1)?;
    check_operator(d, g2)?;
    let psi = u.column(0).to_owned();
    let a = g1.dot(&psi);
    let b = g2.dot(&psi);
    let dot = |x: &Array1<C64>, y: &Array1<C64>| -> C64 { x.iter().zip(y.iter()).map(|(p, q)| p.conj() * q).sum() };
    let m1 = dot(&psi, &a);
    let m2 = dot(&psi, &b);
    let f11 = 4.0 * (dot(&a, &a) - m1.conj() * m1).re;
    let f22 = 4.0 * (dot(&b, &b) - m2.conj() * m2).re;
    let f12 = 4.0 * (dot(&a, &b) - m1.conj() * m2).re;
    Ok(QfiMatrix {
        entries: [[f11, f12], [f12, f22]],
    })
}

/// Classical Fisher information of the two-outcome projection onto the
/// fiducial state after `exp(-i theta G')`.
///
/// The no-click probability `q = 1 - p` is evaluated as
/// `sum_kl w_k w_l 2 sin^2(theta (l_k - l_l) / 2)` to avoid cancellation
/// near `p = 1`, and `dq/dtheta` by a central difference of step `theta/10`.
pub fn cfi_fiducial_measurement(probe_generator: &Matrix, fiducial: &StateVector, theta: f64) -> Result<f64> {
    check_operator(fiducial.dim(), probe_generator)?;
    if theta == 0.0 || !theta.is_finite() {
        return Err(Error::invalid("theta must be finite and nonzero"));
    }
    let eig = HermitianEigen::new(probe_generator)?;
    let w: Vec<f64> = eig
        .to_eigenbasis(fiducial.amplitudes())
        .iter()
        .map(|c| c.norm_sqr())
        .collect();
    let vals = eig.values.as_slice().expect("contiguous eigenvalues");
    let q = |t: f64| -> f64 {
        let mut acc = 0.0;
        for k in 0..w.len() {
            if w[k] == 0.0 {
                continue;
            }
            for l in 0..k {
                let s = (0.5 * t * (vals[k] - vals[l])).sin();
                acc += 4.0 * w[k] * w[l] * s * s;
            }
        }
        acc
    };
    let h = theta / 10.0;
    let dq = (q(theta + h) - q(theta - h)) / (2.0 * h);
    let q0 = q(theta);
    if q0 <= 0.0 || q0 >= 1.0 {
        if dq == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Saturated { p: 1.0 - q0 });
    }
    Ok(dq * dq * (1.0 / q0 + 1.0 / (1.0 - q0)))
}
