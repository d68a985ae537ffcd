use ndarray::{Array1, Array2};

use super::linalg::{eigh, hermiticity_deviation};
use super::qubits_for_dim;
use crate::error::{ensure_dim, Error, Result};
use crate::{Matrix, C64};

/// Outcomes with probability below this are treated as impossible.
pub const DEFAULT_P_MIN: f64 = 1e-12;

const STATE_TOL: f64 = 1e-10;

/// Normalised pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Array1<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Array1<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalise `amplitudes`; fails on the zero vector.
    pub fn normalized(amplitudes: Array1<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.mapv(|a| a / norm),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::invalid(format!("basis index {index} out of range {dim}")));
        }
        let mut a = Array1::zeros(dim);
        a[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: a })
    }

    /// `|0...0>` on `n` qubits.
    pub fn zeros(n_qubits: usize) -> Result<Self> {
        if n_qubits > 30 {
            return Err(Error::CapExceeded {
                what: "state-vector qubit",
                requested: n_qubits,
                limit: 30,
            });
        }
        Self::basis(1 << n_qubits, 0)
    }

    pub(crate) fn from_trusted(amplitudes: Array1<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn n_qubits(&self) -> Option<usize> {
        qubits_for_dim(self.dim())
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Array1<C64> {
        self.amplitudes
    }

    pub fn probabilities(&self) -> Array1<f64> {
        self.amplitudes.mapv(|a| a.norm_sqr())
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `<psi| op |psi>`.
    pub fn expectation(&self, op: &Matrix) -> Result<C64> {
        ensure_dim(self.dim(), op.nrows())?;
        ensure_dim(self.dim(), op.ncols())?;
        let v = op.dot(&self.amplitudes);
        Ok(self.amplitudes.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    /// `u |psi>`, renormalised to absorb rounding.
    pub fn evolve(&self, u: &Matrix) -> Result<Self> {
        ensure_dim(self.dim(), u.ncols())?;
        Self::normalized(u.dot(&self.amplitudes))
    }

    pub fn to_density(&self) -> DensityMatrix {
        let a = &self.amplitudes;
        let d = a.len();
        let m = Array2::from_shape_fn((d, d), |(i, j)| a[i] * a[j].conj());
        DensityMatrix { matrix: m }
    }
}

/// Validated density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: Matrix,
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity to `1e-10`.
    pub fn new(matrix: Matrix) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != c || r == 0 {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        let dev = hermiticity_deviation(&matrix);
        if dev > STATE_TOL {
            return Err(Error::InvalidState(format!("density matrix not Hermitian ({dev:e})")));
        }
        let tr: f64 = matrix.diag().iter().map(|v| v.re).sum();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("density matrix trace {tr}")));
        }
        let (vals, _) = eigh(&matrix)?;
        if let Some(&min) = vals.iter().min_by(|a, b| a.total_cmp(b)) {
            if min < -STATE_TOL {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_trusted(matrix: Matrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(Self {
            matrix: Array2::eye(dim).mapv(|v: C64| v / dim as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diag().iter().map(|v| v.re).sum()
    }

    /// Depolarising channel `(1-p) rho + p I/d`.
    pub fn depolarized(&self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("depolarising strength {p} outside [0,1]")));
        }
        let d = self.dim();
        let mut m = self.matrix.mapv(|v| v * (1.0 - p));
        for i in 0..d {
            m[[i, i]] += C64::new(p / d as f64, 0.0);
        }
        Ok(Self { matrix: m })
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, u: &Matrix) -> Result<Self> {
        ensure_dim(self.dim(), u.ncols())?;
        let m = u.dot(&self.matrix).dot(&super::linalg::dagger(u));
        Ok(Self { matrix: m })
    }
}

/// Borrowed pure or mixed state.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        StateRef::Mixed(s)
    }
}

impl StateRef<'_> {
    fn dim(&self) -> usize {
        match self {
            StateRef::Pure(s) => s.dim(),
            StateRef::Mixed(r) => r.dim(),
        }
    }
}

/// Index bookkeeping for a split of `n` qubits into kept and selected sites.
struct SiteSplit {
    /// Full-register index bits for every index of the kept register.
    kept_bits: Vec<usize>,
    /// Full-register index bits for every index of the selected register.
    selected_bits: Vec<usize>,
}

impl SiteSplit {
    fn new(n: usize, selected: &[usize]) -> Result<Self> {
        let mut flags = vec![false; n];
        for &s in selected {
            if s >= n {
                return Err(Error::invalid(format!("site {s} out of range for {n} qubits")));
            }
            if flags[s] {
                return Err(Error::invalid(format!("site {s} listed twice")));
            }
            flags[s] = true;
        }
        let kept: Vec<usize> = (0..n).filter(|&s| !flags[s]).collect();
        Ok(Self {
            kept_bits: scatter_table(n, &kept),
            selected_bits: scatter_table(n, selected),
        })
    }
}

/// For a register made of `sites` (first site most significant), map each
/// local index to its bits in the full `n`-qubit index.
fn scatter_table(n: usize, sites: &[usize]) -> Vec<usize> {
    let m = sites.len();
    (0..1usize << m)
        .map(|local| {
            let mut full = 0;
            for (pos, &site) in sites.iter().enumerate() {
                if local >> (m - 1 - pos) & 1 == 1 {
                    full |= 1 << (n - 1 - site);
                }
            }
            full
        })
        .collect()
}

fn register_qubits(dim: usize) -> Result<usize> {
    qubits_for_dim(dim).ok_or_else(|| Error::invalid(format!("dimension {dim} is not a qubit register")))
}

/// Reduced state on the sites not listed in `discard_sites`.
pub fn partial_trace<'a>(state: impl Into<StateRef<'a>>, discard_sites: &[usize]) -> Result<DensityMatrix> {
    let state = state.into();
    let n = register_qubits(state.dim())?;
    if discard_sites.len() >= n {
        return Err(Error::invalid("at least one site must remain after the partial trace"));
    }
    let split = SiteSplit::new(n, discard_sites)?;
    let dk = split.kept_bits.len();
    let mut out: Matrix = Array2::zeros((dk, dk));
    match state {
        StateRef::Pure(psi) => {
            let a = psi.amplitudes();
            for &e in &split.selected_bits {
                for (i, &ki) in split.kept_bits.iter().enumerate() {
                    let ai = a[ki | e];
                    if ai == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for (j, &kj) in split.kept_bits.iter().enumerate() {
                        out[[i, j]] += ai * a[kj | e].conj();
                    }
                }
            }
        }
        StateRef::Mixed(rho) => {
            let m = rho.matrix();
            for &e in &split.selected_bits {
                for (i, &ki) in split.kept_bits.iter().enumerate() {
                    for (j, &kj) in split.kept_bits.iter().enumerate() {
                        out[[i, j]] += m[[ki | e, kj | e]];
                    }
                }
            }
        }
    }
    Ok(DensityMatrix::from_trusted(out))
}

/// Result of a computational-basis measurement on a subsystem.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub probability: f64,
    /// Normalised post-measurement state of the unmeasured sites.
    pub conditional: StateVector,
}

fn outcome_index(outcome: &[bool]) -> usize {
    outcome.iter().fold(0, |acc, &b| acc << 1 | b as usize)
}

/// Project `sites` onto `outcome` (first bit belongs to the first listed site).
///
/// Outcomes with probability below `p_min` yield
/// [`Error::DegenerateOutcome`] carrying the probability.
pub fn measure_subsystem(state: &StateVector, sites: &[usize], outcome: &[bool], p_min: f64) -> Result<Measurement> {
    ensure_dim(sites.len(), outcome.len())?;
    let n = register_qubits(state.dim())?;
    if sites.len() >= n {
        return Err(Error::invalid("at least one site must remain unmeasured"));
    }
    let split = SiteSplit::new(n, sites)?;
    let e = split.selected_bits[outcome_index(outcome)];
    let a = state.amplitudes();
    let projected: Array1<C64> = split.kept_bits.iter().map(|&k| a[k | e]).collect();
    let probability: f64 = projected.iter().map(|v| v.norm_sqr()).sum();
    if probability < p_min {
        return Err(Error::DegenerateOutcome { probability });
    }
    Ok(Measurement {
        probability,
        conditional: StateVector::from_trusted(projected.mapv(|v| v / probability.sqrt())),
    })
}

/// `|conditional> (x) |outcome>` with the outcome written back on `sites`.
pub fn prepare_with_outcome(conditional: &StateVector, sites: &[usize], outcome: &[bool]) -> Result<StateVector> {
    ensure_dim(sites.len(), outcome.len())?;
    let kept_n = register_qubits(conditional.dim())?;
    let n = kept_n + sites.len();
    let split = SiteSplit::new(n, sites)?;
    let e = split.selected_bits[outcome_index(outcome)];
    let mut full = Array1::zeros(1 << n);
    for (i, &k) in split.kept_bits.iter().enumerate() {
        full[k | e] = conditional.amplitudes()[i];
    }
    Ok(StateVector::from_trusted(full))
}
