//! Closed-form Fisher-information values used as simulation oracles.

use crate::error::{Error, Result};
use crate::orbit::binomial;
use crate::pauli::{Letter, LocalGenerator};
use crate::quantum::{spin_operator, Axis, EnsembleKind, EnsembleSpec};
use crate::Matrix;

fn letter_axis(letter: Letter) -> Result<Axis> {
    match letter {
        Letter::X => Ok(Axis::X),
        Letter::Y => Ok(Axis::Y),
        Letter::Z => Ok(Axis::Z),
        Letter::I => Err(Error::invalid("identity is not a generator letter")),
    }
}

/// Phase-embedding generator as seen by the Haar averages.
///
/// `Collective` describes `scale * sum_i P_i` for one letter on every site
/// without the 64-site limit of [`LocalGenerator`], which matters for
/// symmetric-sector runs at large `n`.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorDescriptor {
    Local(LocalGenerator),
    Collective { n_qubits: usize, axis: Axis, scale: f64 },
}

impl From<LocalGenerator> for GeneratorDescriptor {
    fn from(g: LocalGenerator) -> Self {
        GeneratorDescriptor::Local(g)
    }
}

impl GeneratorDescriptor {
    /// `S_axis = (1/2) sum_i P_i`.
    pub fn spin(n_qubits: usize, axis: Axis) -> Self {
        GeneratorDescriptor::Collective {
            n_qubits,
            axis,
            scale: 0.5,
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            GeneratorDescriptor::Local(g) => g.n_qubits(),
            GeneratorDescriptor::Collective { n_qubits, .. } => *n_qubits,
        }
    }

    /// Axis and scale when every site carries the same letter.
    pub fn uniform(&self) -> Option<(Axis, f64)> {
        match self {
            GeneratorDescriptor::Local(g) => g
                .uniform_letter()
                .and_then(|l| letter_axis(l).ok())
                .map(|a| (a, g.scale())),
            GeneratorDescriptor::Collective { axis, scale, .. } => Some((*axis, *scale)),
        }
    }

    /// `Tr(G^2)` over the full register, `scale^2 n 2^n`.
    pub fn trace_sq(&self) -> f64 {
        match self {
            GeneratorDescriptor::Local(g) => g.trace_sq(),
            GeneratorDescriptor::Collective { n_qubits, scale, .. } => {
                scale * scale * *n_qubits as f64 * 2f64.powi(*n_qubits as i32)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            GeneratorDescriptor::Local(g) => g.label(),
            GeneratorDescriptor::Collective { n_qubits, axis, scale } => format!("{scale}*sum{axis:?}[n={n_qubits}]"),
        }
    }

    /// Dense operator on the full `2^n` register.
    pub fn to_dense(&self) -> Result<Matrix> {
        match self {
            GeneratorDescriptor::Local(g) => g.to_dense(),
            GeneratorDescriptor::Collective { n_qubits, axis, scale } => {
                let letter = match axis {
                    Axis::X => Letter::X,
                    Axis::Y => Letter::Y,
                    Axis::Z => Letter::Z,
                };
                LocalGenerator::uniform(*n_qubits, letter, *scale)?.to_dense()
            }
        }
    }
}

/// `G` restricted to the ensemble's sector: the dense `2^n` operator for the
/// full ensemble, `2 * scale * S_axis` (spin `n/2`) for the symmetric ones.
pub fn sector_generator(kind: EnsembleKind, g: &GeneratorDescriptor) -> Result<Matrix> {
    match kind {
        EnsembleKind::FullUnitary => g.to_dense(),
        _ => {
            let (axis, scale) = g
                .uniform()
                .ok_or_else(|| Error::invalid("symmetric sector needs a site-uniform generator"))?;
            let s = spin_operator(axis, g.n_qubits())?;
            Ok(s.mapv(|v| v * (2.0 * scale)))
        }
    }
}

struct Traces {
    d: f64,
    tr: f64,
    tr_sq: f64,
    tr_t: f64,
}

fn traces(m: &Matrix) -> Traces {
    let d = m.nrows();
    let tr = m.diag().iter().map(|v| v.re).sum();
    let mut tr_sq = 0.0;
    let mut tr_t = 0.0;
    for ((i, j), v) in m.indexed_iter() {
        tr_sq += (v * m[[j, i]]).re;
        tr_t += (v * v).re;
    }
    Traces {
        d: d as f64,
        tr,
        tr_sq,
        tr_t,
    }
}

fn check_sector(spec: &EnsembleSpec, g: &GeneratorDescriptor) -> Result<usize> {
    let d = spec.effective_dim()?;
    if g.n_qubits() != spec.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: spec.n_qubits,
            found: g.n_qubits(),
        });
    }
    Ok(d)
}

fn orthogonal_avg(t: &Traces) -> f64 {
    4.0 * t.tr_sq / t.d - 4.0 * (t.tr_sq + t.tr_t + t.tr * t.tr) / ((t.d + 2.0) * t.d)
}

/// Haar-averaged QFI as stated in closed form for each sector.
///
/// Full unitary: `4 Tr(G^2) / d`. Symmetric unitary: `8 S^3 / (3 (2S+1))`
/// for the collective spin (rescaled by `(2 scale)^2`). Symmetric orthogonal:
/// `4 Tr(G^2)/d - 4 [Tr(G^2) + Tr(G^T G) + Tr(G)^2] / ((d+2) d)`.
pub fn analytic_haar_avg(spec: &EnsembleSpec, g: &GeneratorDescriptor) -> Result<f64> {
    let d = check_sector(spec, g)?;
    match spec.kind {
        EnsembleKind::FullUnitary => Ok(4.0 * g.trace_sq() / d as f64),
        EnsembleKind::SymmetricUnitary => {
            let (_, scale) = g
                .uniform()
                .ok_or_else(|| Error::invalid("symmetric sector needs a site-uniform generator"))?;
            let s = spec.n_qubits as f64 / 2.0;
            let c = 2.0 * scale;
            Ok(c * c * 8.0 * s.powi(3) / (3.0 * (2.0 * s + 1.0)))
        }
        EnsembleKind::SymmetricOrthogonal => Ok(orthogonal_avg(&traces(&sector_generator(spec.kind, g)?))),
    }
}

/// Exact Haar average from the first two moments of the ensemble:
/// `4 (d Tr(G^2) - Tr(G)^2) / (d (d+1))` for unitary ensembles and the
/// orthogonal-moment expression for the orthogonal one.
pub fn weingarten_haar_avg(spec: &EnsembleSpec, g: &GeneratorDescriptor) -> Result<f64> {
    let d = check_sector(spec, g)? as f64;
    let t = match spec.kind {
        // 1-local Pauli sums are traceless; avoid the dense expansion.
        EnsembleKind::FullUnitary => Traces {
            d,
            tr: 0.0,
            tr_sq: g.trace_sq(),
            tr_t: 0.0,
        },
        kind => traces(&sector_generator(kind, g)?),
    };
    Ok(match spec.kind {
        EnsembleKind::SymmetricOrthogonal => orthogonal_avg(&t),
        _ => 4.0 * (d * t.tr_sq - t.tr * t.tr) / (d * (d + 1.0)),
    })
}

/// QFI suppression `(1-p)^2 / (1 - p + 2p/d)` of the depolarising channel.
pub fn depolarize_factor(p: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("depolarising strength {p} outside [0,1]")));
    }
    if d < 2 {
        return Err(Error::invalid("dimension must be at least 2"));
    }
    let denom = 1.0 - p + 2.0 * p / d as f64;
    Ok((1.0 - p).powi(2) / denom)
}

/// `binom(n-k, n/2) / binom(n, n/2)`: chance that all `n/2` excitations
/// survive the loss of `k` particles.
pub fn loss_remaining_probability(n: usize, k: usize) -> Result<f64> {
    check_loss(n, k)?;
    let q = n / 2;
    Ok(if k > n - q {
        0.0
    } else {
        binomial(n - k, q) / binomial(n, q)
    })
}

fn check_loss(n: usize, k: usize) -> Result<()> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!("n = {n} must be positive and even")));
    }
    if k > n {
        return Err(Error::invalid(format!("cannot lose {k} of {n} particles")));
    }
    Ok(())
}

/// QFI of `alpha|0_n> + beta|q_n>` (`q = n/2`) after losing `k` particles:
/// `n^2 a b p_rem / (a + b (p_0 + p_rem))` with `a = |alpha|^2`, `b = |beta|^2`.
pub fn loss_qfi_closed_form(n: usize, k: usize, alpha2: f64, beta2: f64) -> Result<f64> {
    check_loss(n, k)?;
    if alpha2 < 0.0 || beta2 < 0.0 || (alpha2 + beta2 - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "probabilities {alpha2}, {beta2} must be nonnegative and sum to 1"
        )));
    }
    let q = n / 2;
    let p_rem = loss_remaining_probability(n, k)?;
    let p_zero = if k >= q { binomial(k, q) / binomial(n, q) } else { 0.0 };
    let denom = alpha2 + beta2 * (p_zero + p_rem);
    if denom == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    Ok(nf * nf * alpha2 * beta2 * p_rem / denom)
}

/// `(n-k)(n-k+2)/3`.
pub fn haar_ramsey_loss_avg(n: usize, k: usize) -> Result<f64> {
    if k >= n {
        return Err(Error::invalid(format!("loss {k} must be below n = {n}")));
    }
    let m = (n - k) as f64;
    Ok(m * (m + 2.0) / 3.0)
}
