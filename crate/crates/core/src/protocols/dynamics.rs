use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::pauli::{LocalGenerator, PauliString, PauliSum};
use crate::qfi::qfi_pure;
use crate::quantum::{dagger, spin_operator, Axis, HermitianEigen, StateVector};
use crate::{Matrix, C64, DEFAULT_DENSE_QUBIT_CAP};

/// Grid size of [`twist_scan`].
pub const TWIST_GRID_POINTS: usize = 64;

/// `exp(-i angle P) psi = cos(angle) psi - i sin(angle) P psi` for a
/// Hermitian Pauli string `P`.
pub fn apply_pauli_exp(p: &PauliString, angle: f64, psi: &StateVector) -> Result<StateVector> {
    if !p.phase_exp().is_multiple_of(2) {
        return Err(Error::NonHermitian { deviation: 2.0 });
    }
    ensure_dim(1 << p.n_qubits(), psi.dim())?;
    let a = psi.amplitudes();
    let mut pa = Array1::<C64>::zeros(a.len());
    p.for_each_entry(|row, col, val| pa[row] += val * a[col]);
    let (s, c) = angle.sin_cos();
    let out: Array1<C64> = a
        .iter()
        .zip(pa.iter())
        .map(|(x, y)| x * c + y * C64::new(0.0, -s))
        .collect();
    StateVector::normalized(out)
}

/// QFI of `exp(-i t X...X)|0...0>` under `S_z`; `n^2` at `t = pi/4`.
pub fn ghz_orbit_qfi(n: usize, t: f64) -> Result<f64> {
    if n > DEFAULT_DENSE_QUBIT_CAP {
        return Err(Error::CapExceeded {
            what: "dense qubit",
            requested: n,
            limit: DEFAULT_DENSE_QUBIT_CAP,
        });
    }
    let psi = apply_pauli_exp(&super::all_x(n)?, t, &StateVector::zeros(n)?)?;
    qfi_pure(&psi, &LocalGenerator::collective_z(n)?.to_dense()?)
}

/// QFI against `t` for one-axis twisting `chi S_x^2` from `|S, m=S>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistScan {
    pub n: usize,
    pub chi: f64,
    pub times: Vec<f64>,
    pub qfi: Vec<f64>,
    pub best_time: f64,
    pub best_qfi: f64,
}

struct Twister {
    eig: HermitianEigen,
    coeffs: Array1<C64>,
    sy: Matrix,
}

impl Twister {
    fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 4000 {
            return Err(Error::invalid(format!("twist-untwist needs 1 <= n <= 4000, got {n}")));
        }
        let sx = spin_operator(Axis::X, n)?;
        let eig = HermitianEigen::new(&sx)?;
        let mut top = Array1::zeros(n + 1);
        top[0] = C64::new(1.0, 0.0);
        let coeffs = eig.to_eigenbasis(&top);
        Ok(Self {
            eig,
            coeffs,
            sy: spin_operator(Axis::Y, n)?,
        })
    }

    fn qfi(&self, chi: f64, t: f64) -> Result<f64> {
        let rotated: Array1<C64> = self
            .coeffs
            .iter()
            .zip(self.eig.values.iter())
            .map(|(c, &l)| c * C64::from_polar(1.0, -chi * t * l * l))
            .collect();
        let psi = StateVector::from_trusted(self.eig.vectors.dot(&rotated));
        // G = -S_y has the same variance as S_y.
        qfi_pure(&psi, &self.sy)
    }
}

/// QFI of `exp(-i chi t S_x^2)|S, S>` for `G = -S_y`, `S = n/2`.
pub fn twist_untwist(n: usize, chi: f64, t: f64) -> Result<f64> {
    Twister::new(n)?.qfi(chi, t)
}

/// [`twist_untwist`] on `points` equally spaced times in `[0, 4/sqrt(n)]`.
pub fn twist_scan(n: usize, chi: f64, points: usize) -> Result<TwistScan> {
    if points < 2 {
        return Err(Error::invalid("a scan needs at least two points"));
    }
    let tw = Twister::new(n)?;
    let t_max = 4.0 / (n as f64).sqrt();
    let times: Vec<f64> = (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect();
    let qfi = times.iter().map(|&t| tw.qfi(chi, t)).collect::<Result<Vec<_>>>()?;
    let best = (0..points)
        .max_by(|&a, &b| qfi[a].total_cmp(&qfi[b]))
        .expect("nonempty grid");
    Ok(TwistScan {
        n,
        chi,
        best_time: times[best],
        best_qfi: qfi[best],
        times,
        qfi,
    })
}

/// Composing Hamiltonian in its eigenbasis with `G` and the state rotated in.
struct Spectral {
    energies: Vec<f64>,
    coeffs: Array1<C64>,
    g: Matrix,
    vectors: Matrix,
    tol: f64,
}

impl Spectral {
    fn new(h_c: &PauliSum, g: &Matrix, state: &StateVector) -> Result<Self> {
        if !h_c.is_hermitian() {
            return Err(Error::NonHermitian { deviation: f64::NAN });
        }
        let h = h_c.to_dense()?;
        ensure_dim(h.nrows(), g.nrows())?;
        ensure_dim(h.nrows(), state.dim())?;
        crate::quantum::ensure_hermitian(g, crate::quantum::HERMITIAN_TOL)?;
        let eig = HermitianEigen::new(&h)?;
        let vd = dagger(&eig.vectors);
        let tol = 1e-8 * eig.spectral_norm().max(1.0);
        Ok(Self {
            energies: eig.values.to_vec(),
            coeffs: vd.dot(state.amplitudes()),
            g: vd.dot(g).dot(&eig.vectors),
            vectors: eig.vectors,
            tol,
        })
    }

    /// Level label of every eigenvalue (eigenvalues come sorted).
    fn levels(&self) -> (Vec<usize>, Vec<f64>) {
        let mut label = Vec::with_capacity(self.energies.len());
        let mut centers: Vec<f64> = Vec::new();
        let mut start = f64::NEG_INFINITY;
        for &e in &self.energies {
            if e - start > self.tol {
                centers.push(e);
                start = e;
            }
            label.push(centers.len() - 1);
        }
        (label, centers)
    }

    fn qfi_at(&self, t: f64) -> f64 {
        let psi: Array1<C64> = self
            .coeffs
            .iter()
            .zip(&self.energies)
            .map(|(c, &e)| c * C64::from_polar(1.0, -e * t))
            .collect();
        let gp = self.g.dot(&psi);
        let mean: f64 = psi.iter().zip(gp.iter()).map(|(a, b)| (a.conj() * b).re).sum();
        let second: f64 = gp.iter().map(|v| v.norm_sqr()).sum();
        4.0 * (second - mean * mean).max(0.0)
    }

    fn trapezoid(&self, t_total: f64, steps: usize) -> f64 {
        let h = t_total / steps as f64;
        let mut acc = 0.5 * (self.qfi_at(0.0) + self.qfi_at(t_total));
        for i in 1..steps {
            acc += self.qfi_at(h * i as f64);
        }
        acc * h / t_total
    }
}

/// `(1/T) int_0^T 4 Var_{psi}(G(t)) dt` with `G(t) = e^{iHt} G e^{-iHt}`.
///
/// Trapezoidal rule with step at most `dt`, repeated at half the step; a
/// relative disagreement above 1% is reported as [`Error::StepTooCoarse`].
pub fn time_avg_qfi(h_c: &PauliSum, g: &LocalGenerator, state: &StateVector, t_total: f64, dt: f64) -> Result<f64> {
    if !(t_total > 0.0 && dt > 0.0 && t_total.is_finite() && dt.is_finite()) {
        return Err(Error::invalid("T and dt must be positive"));
    }
    if g.n_qubits() != h_c.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: h_c.n_qubits(),
            found: g.n_qubits(),
        });
    }
    let sp = Spectral::new(h_c, &g.to_dense()?, state)?;
    let steps = (t_total / dt).ceil().max(1.0) as usize;
    let coarse = sp.trapezoid(t_total, steps);
    let fine = sp.trapezoid(t_total, 2 * steps);
    if (coarse - fine).abs() > 0.01 * fine.abs().max(1e-12) {
        return Err(Error::StepTooCoarse { coarse, fine });
    }
    Ok(fine)
}

/// Infinite-time limits of the time-averaged QFI.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeAverageLimit {
    /// `4 (<P(G^2)> - sum_w |<G>_w|^2)`, where `<G>_w` collects the matrix
    /// elements of `G` between levels with Bohr frequency `w`.
    pub exact: f64,
    /// `4 (<P(G^2)> - <P(G)>^2)`: keeps only the static part of `<G(t)>`.
    pub centralizer_only: f64,
}

/// Exact `T -> infinity` limit of [`time_avg_qfi`] from the spectrum of `H_c`.
pub fn time_avg_limit(h_c: &PauliSum, g: &Matrix, state: &StateVector) -> Result<TimeAverageLimit> {
    let sp = Spectral::new(h_c, g, state)?;
    let (label, centers) = sp.levels();
    let d = label.len();
    let c = &sp.coeffs;
    let g2 = sp.g.dot(&sp.g);

    let mut p_g2 = 0.0;
    // Amplitude of <G(t)> per ordered level pair.
    let n_levels = centers.len();
    let mut pair_amp = vec![C64::new(0.0, 0.0); n_levels * n_levels];
    for a in 0..d {
        for b in 0..d {
            let w = c[a].conj() * c[b];
            if label[a] == label[b] {
                p_g2 += (w * g2[[a, b]]).re;
            }
            pair_amp[label[a] * n_levels + label[b]] += w * sp.g[[a, b]];
        }
    }
    // Group level pairs by Bohr frequency.
    let mut gaps: Vec<(f64, C64)> = Vec::with_capacity(n_levels * n_levels);
    for l in 0..n_levels {
        for m in 0..n_levels {
            let amp = pair_amp[l * n_levels + m];
            if amp.norm() > 0.0 {
                gaps.push((centers[l] - centers[m], amp));
            }
        }
    }
    gaps.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut oscillating = 0.0;
    let mut static_part = C64::new(0.0, 0.0);
    let mut i = 0;
    while i < gaps.len() {
        let start = gaps[i].0;
        let mut sum = C64::new(0.0, 0.0);
        while i < gaps.len() && gaps[i].0 - start <= sp.tol {
            sum += gaps[i].1;
            i += 1;
        }
        if start.abs() <= sp.tol {
            static_part = sum;
        }
        oscillating += sum.norm_sqr();
    }
    Ok(TimeAverageLimit {
        exact: 4.0 * (p_g2 - oscillating),
        centralizer_only: 4.0 * (p_g2 - static_part.re * static_part.re),
    })
}

/// Dephase `G` in the eigenbasis of `H_c`, keeping blocks of equal energy.
pub fn centralizer_projection_oracle(h_c: &PauliSum, g: &Matrix) -> Result<Matrix> {
    let d = 1usize << h_c.n_qubits();
    let dummy = StateVector::basis(d, 0)?;
    let sp = Spectral::new(h_c, g, &dummy)?;
    let (label, _) = sp.levels();
    let mut block = sp.g.clone();
    for ((a, b), v) in block.indexed_iter_mut() {
        if label[a] != label[b] {
            *v = C64::new(0.0, 0.0);
        }
    }
    Ok(sp.vectors.dot(&block).dot(&dagger(&sp.vectors)))
}
