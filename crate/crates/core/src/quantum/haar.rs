use ndarray::Array2;
use ndarray_linalg::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{Matrix, C64, DEFAULT_DENSE_QUBIT_CAP};

/// Largest effective dimension a Haar draw may have.
pub const HAAR_DIM_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Haar unitaries on all of `(C^2)^n`.
    FullUnitary,
    /// Haar unitaries on the permutation-symmetric sector (dimension `n+1`).
    SymmetricUnitary,
    /// Haar orthogonal matrices on the symmetric sector.
    SymmetricOrthogonal,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::FullUnitary => "full",
            EnsembleKind::SymmetricUnitary => "symmetric",
            EnsembleKind::SymmetricOrthogonal => "orthogonal",
        }
    }

    pub fn is_symmetric(self) -> bool {
        !matches!(self, EnsembleKind::FullUnitary)
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" | "full_unitary" => Ok(EnsembleKind::FullUnitary),
            "symmetric" | "symmetric_unitary" => Ok(EnsembleKind::SymmetricUnitary),
            "orthogonal" | "symmetric_orthogonal" => Ok(EnsembleKind::SymmetricOrthogonal),
            other => Err(Error::Parse(format!("unknown ensemble '{other}'"))),
        }
    }
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n_qubits: usize,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n_qubits: usize) -> Result<Self> {
        let spec = Self { kind, n_qubits };
        spec.effective_dim()?;
        Ok(spec)
    }

    /// `2^n` for the full ensemble, `n+1` for the symmetric ones.
    pub fn effective_dim(&self) -> Result<usize> {
        if self.n_qubits == 0 {
            return Err(Error::invalid("ensemble needs at least one qubit"));
        }
        let d = match self.kind {
            EnsembleKind::FullUnitary => {
                if self.n_qubits > DEFAULT_DENSE_QUBIT_CAP {
                    return Err(Error::CapExceeded {
                        what: "dense qubit",
                        requested: self.n_qubits,
                        limit: DEFAULT_DENSE_QUBIT_CAP,
                    });
                }
                1 << self.n_qubits
            }
            _ => self.n_qubits + 1,
        };
        if d > HAAR_DIM_CAP {
            return Err(Error::CapExceeded {
                what: "Haar dimension",
                requested: d,
                limit: HAAR_DIM_CAP,
            });
        }
        Ok(d)
    }

    pub fn describe(&self) -> String {
        format!("{}(n={})", self.kind, self.n_qubits)
    }
}

/// Seed provenance for one independent random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if d > HAAR_DIM_CAP {
        return Err(Error::CapExceeded {
            what: "Haar dimension",
            requested: d,
            limit: HAAR_DIM_CAP,
        });
    }
    Ok(())
}

/// Haar unitary via QR of a complex Ginibre matrix with phase-fixed `R`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Matrix> {
    check_dim(d)?;
    let z: Matrix = Array2::from_shape_simple_fn((d, d), || {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let (mut q, r) = z.qr()?;
    for j in 0..d {
        let rjj = r[[j, j]];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        q.column_mut(j).mapv_inplace(|v| v * phase);
    }
    Ok(q)
}

/// Haar orthogonal matrix (returned with complex storage).
pub fn haar_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Matrix> {
    check_dim(d)?;
    let g: Array2<f64> = Array2::from_shape_simple_fn((d, d), || rng.sample(StandardNormal));
    let (mut q, r) = g.qr()?;
    for j in 0..d {
        if r[[j, j]] < 0.0 {
            q.column_mut(j).mapv_inplace(|v| -v);
        }
    }
    Ok(q.mapv(|v| C64::new(v, 0.0)))
}

/// One draw from `spec` on the given stream.
pub fn haar_sample(spec: &EnsembleSpec, stream: &RngStream) -> Result<Matrix> {
    let d = spec.effective_dim()?;
    let mut rng = stream.rng();
    match spec.kind {
        EnsembleKind::SymmetricOrthogonal => haar_orthogonal(d, &mut rng),
        _ => haar_unitary(d, &mut rng),
    }
}
