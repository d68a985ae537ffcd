//! End-to-end sensing protocols.
//!
//! Every Monte-Carlo driver gives sample `i` its own [`RngStream`]
//! `(master_seed, i)`, evaluates samples in parallel and sums them in index
//! order, so results do not depend on the worker count.

mod dynamics;
mod loss;
mod projected;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::{ClassHistogram, DEFAULT_EPSILON};
use crate::pauli::{Letter, PauliString, PauliSum};
use crate::qfi::{
    depolarize_factor, qfi_mixed, qfi_pure, sector_generator, GeneratorDescriptor, QfiStats, DEFAULT_MIXED_TOL,
    DEFAULT_THETA,
};
use crate::quantum::{haar_sample, DensityMatrix, EnsembleKind, EnsembleSpec, RngStream, StateVector, DEFAULT_P_MIN};
use crate::{Matrix, C64};

pub use dynamics::{
    apply_pauli_exp, centralizer_projection_oracle, ghz_orbit_qfi, time_avg_limit, time_avg_qfi, twist_scan,
    twist_untwist, TimeAverageLimit, TwistScan, TWIST_GRID_POINTS,
};
pub use loss::{haar_ramsey_loss, loss_experiment, LossComparison, LossPoint, LossStage};
pub use projected::{
    projected_ensemble_protocol, projected_generator_qfi, projected_outcomes, scrambled_operator_weights,
    OutcomeRecord, ProjectedSample,
};

/// Parameters shared by the protocol drivers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n_qubits: usize,
    pub ensemble: EnsembleKind,
    /// Number of measured sites in the projected protocol (the last `n_e`).
    pub n_e: usize,
    pub samples: usize,
    pub master_seed: u64,
    pub epsilon: f64,
    pub p_min: f64,
    pub noise_p: f64,
    pub loss_k: usize,
    pub theta_probe: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            n_qubits: 4,
            ensemble: EnsembleKind::FullUnitary,
            n_e: 1,
            samples: 100,
            master_seed: 0,
            epsilon: DEFAULT_EPSILON,
            p_min: DEFAULT_P_MIN,
            noise_p: 0.0,
            loss_k: 0,
            theta_probe: DEFAULT_THETA,
        }
    }
}

impl ProtocolConfig {
    pub fn new(n_qubits: usize, ensemble: EnsembleKind, samples: usize, master_seed: u64) -> Self {
        Self {
            n_qubits,
            ensemble,
            samples,
            master_seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if self.n_e >= self.n_qubits {
            return Err(Error::invalid(format!(
                "n_e = {} must be below n = {}",
                self.n_e, self.n_qubits
            )));
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::invalid(format!("epsilon = {} outside (0, 1]", self.epsilon)));
        }
        if !(self.p_min >= 0.0 && self.p_min < 1.0) {
            return Err(Error::invalid(format!("p_min = {} outside [0, 1)", self.p_min)));
        }
        if !(0.0..=1.0).contains(&self.noise_p) {
            return Err(Error::invalid(format!("noise p = {} outside [0, 1]", self.noise_p)));
        }
        if self.loss_k >= self.n_qubits {
            return Err(Error::invalid(format!(
                "loss k = {} must be below n = {}",
                self.loss_k, self.n_qubits
            )));
        }
        if self.theta_probe == 0.0 || !self.theta_probe.is_finite() {
            return Err(Error::invalid("theta must be finite and nonzero"));
        }
        self.spec().map(|_| ())
    }

    pub fn spec(&self) -> Result<EnsembleSpec> {
        EnsembleSpec::new(self.ensemble, self.n_qubits)
    }

    pub(crate) fn stream(&self, sample: usize) -> RngStream {
        RngStream::new(self.master_seed, sample as u64)
    }
}

/// Output of a protocol run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub qfi_stats: QfiStats,
    /// One value per retained sample, in sample order.
    pub sample_values: Vec<f64>,
    /// Noiseless (or alternative-convention) values on the same instances.
    pub reference_values: Option<Vec<f64>>,
    pub per_outcome_distribution: Option<Vec<OutcomeRecord>>,
    pub class_histogram: Option<ClassHistogram>,
    /// Total probability of outcomes dropped for falling below `p_min`.
    pub excluded_mass: f64,
    pub skipped_samples: usize,
    pub config: ProtocolConfig,
}

impl ProtocolResult {
    pub(crate) fn from_values(config: &ProtocolConfig, values: Vec<f64>, label: String) -> Result<Self> {
        Ok(Self {
            qfi_stats: QfiStats::from_samples(&values, config.master_seed, label)?,
            sample_values: values,
            reference_values: None,
            per_outcome_distribution: None,
            class_histogram: None,
            excluded_mass: 0.0,
            skipped_samples: 0,
            config: config.clone(),
        })
    }

    /// Per-sample `value / reference`.
    pub fn ratios(&self) -> Option<Vec<f64>> {
        self.reference_values
            .as_ref()
            .map(|r| self.sample_values.iter().zip(r).map(|(a, b)| a / b).collect())
    }
}

/// Run `f` for every sample index in parallel; results come back in order.
pub(crate) fn per_sample<T, F>(config: &ProtocolConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &RngStream) -> Result<T> + Sync,
{
    (0..config.samples)
        .into_par_iter()
        .map(|i| f(i, &config.stream(i)))
        .collect()
}

/// `U|0>` for a sector unitary: its first column.
pub(crate) fn first_column(u: &Matrix) -> StateVector {
    StateVector::from_trusted(u.column(0).to_owned())
}

/// Haar-Ramsey protocol: `F = 4 Var(G)` in `U|psi_0>` with `U` drawn from the
/// configured ensemble. Symmetric ensembles run in dimension `n+1`.
pub fn haar_ramsey_mc(config: &ProtocolConfig, g: &GeneratorDescriptor) -> Result<ProtocolResult> {
    config.validate()?;
    let spec = config.spec()?;
    check_generator(config, g)?;
    let gs = sector_generator(spec.kind, g)?;
    let values = per_sample(config, |_, stream| {
        let u = haar_sample(&spec, stream)?;
        qfi_pure(&first_column(&u), &gs)
    })?;
    ProtocolResult::from_values(config, values, spec.describe())
}

fn check_generator(config: &ProtocolConfig, g: &GeneratorDescriptor) -> Result<()> {
    if g.n_qubits() != config.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: config.n_qubits,
            found: g.n_qubits(),
        });
    }
    Ok(())
}

/// Which noiseless protocol [`noisy_protocol`] perturbs.
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseBase {
    HaarRamsey(GeneratorDescriptor),
    /// Projected ensemble with `G = S_z`; each conditional probe is depolarised.
    Projected,
}

/// QFI of `(1-p) psi + p I / 2^n` for a probe `psi` that lives in a
/// `G`-invariant sector of dimension `sector_dim`.
///
/// The register splits into the sector and its complement; the complement
/// block is proportional to the identity and contributes nothing, so the QFI
/// is the sector-block QFI weighted by the sector's trace.
pub(crate) fn depolarized_sector_qfi(psi: &StateVector, g: &Matrix, p: f64, n_qubits: usize) -> Result<f64> {
    let d_s = psi.dim();
    let full = 2f64.powi(n_qubits as i32);
    let background = p / full;
    let weight = 1.0 - p + background * d_s as f64;
    if weight <= 0.0 {
        return Ok(0.0);
    }
    let mut block = psi.to_density().matrix().mapv(|v| v * (1.0 - p));
    for i in 0..d_s {
        block[[i, i]] += C64::new(background, 0.0);
    }
    let rho = DensityMatrix::from_trusted(block.mapv(|v| v / weight));
    Ok(weight * qfi_mixed(&rho, g, DEFAULT_MIXED_TOL)?)
}

/// Depolarise the probe after state preparation and evaluate the mixed QFI.
///
/// `reference_values` carries the noiseless QFI of the same instances, so
/// [`ProtocolResult::ratios`] can be compared with
/// [`depolarize_factor`]`(p, 2^n)`.
pub fn noisy_protocol(config: &ProtocolConfig, base: &NoiseBase) -> Result<ProtocolResult> {
    config.validate()?;
    let p = config.noise_p;
    let n = config.n_qubits;
    let pairs: Vec<(f64, f64)> = match base {
        NoiseBase::HaarRamsey(g) => {
            check_generator(config, g)?;
            let spec = config.spec()?;
            let gs = sector_generator(spec.kind, g)?;
            per_sample(config, |_, stream| {
                let psi = first_column(&haar_sample(&spec, stream)?);
                Ok((depolarized_sector_qfi(&psi, &gs, p, n)?, qfi_pure(&psi, &gs)?))
            })?
        }
        NoiseBase::Projected => {
            return projected::noisy_projected(config);
        }
    };
    let (noisy, clean): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let mut result = ProtocolResult::from_values(config, noisy, format!("{} p={p}", config.spec()?.describe()))?;
    result.reference_values = Some(clean);
    Ok(result)
}

/// Expected noisy/noiseless ratio for `config`.
pub fn expected_noise_ratio(config: &ProtocolConfig) -> Result<f64> {
    if config.n_qubits >= usize::BITS as usize {
        return Ok((1.0 - config.noise_p).powi(2) / (1.0 - config.noise_p));
    }
    depolarize_factor(config.noise_p, 1 << config.n_qubits)
}

/// Composing Hamiltonians supported on `C_0` of `S_z` (diagonal strings)
/// leave `|0...0>` an eigenstate, so the QFI must vanish.
///
/// Each sample draws `2n` random Z-type strings with Gaussian coefficients
/// and a random time in `[0, 2 pi)`; `extra` strings (unit coefficient) are
/// appended to every Hamiltonian for contrast runs.
pub fn commuting_sanity_with(n: usize, samples: usize, seed: u64, extra: &[PauliString]) -> Result<QfiStats> {
    use rand::Rng;
    use rand_distr::StandardNormal;

    if n == 0 || n > 10 {
        return Err(Error::invalid(format!(
            "commuting sanity check needs 1 <= n <= 10, got {n}"
        )));
    }
    if samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    for p in extra {
        if p.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.n_qubits(),
            });
        }
    }
    let g = crate::pauli::LocalGenerator::collective_z(n)?.to_dense()?;
    let config = ProtocolConfig::new(n, EnsembleKind::FullUnitary, samples, seed);
    let values = per_sample(&config, |_, stream| {
        let mut rng = stream.rng();
        let mut h = PauliSum::new(n)?;
        for _ in 0..2 * n {
            let z_mask = rng.random_range(1..(1u64 << n));
            let c: f64 = rng.sample(StandardNormal);
            h.add_term(C64::new(c, 0.0), PauliString::new(n, 0, z_mask, 0)?)?;
        }
        for p in extra {
            h.add_term(C64::new(1.0, 0.0), *p)?;
        }
        let t = rng.random_range(0.0..std::f64::consts::TAU);
        let u = crate::quantum::mat_exp_hermitian(&h.to_dense()?, t)?;
        qfi_pure(&StateVector::zeros(n)?.evolve(&u)?, &g)
    })?;
    QfiStats::from_samples(&values, seed, format!("C0 hamiltonians (n={n})"))
}

pub fn commuting_sanity(n: usize, samples: usize, seed: u64) -> Result<QfiStats> {
    commuting_sanity_with(n, samples, seed, &[])
}

/// `X` on every site: a `C_n` string for `G = S_z`.
pub fn all_x(n: usize) -> Result<PauliString> {
    PauliString::from_letters(&vec![Letter::X; n])
}

#[cfg(test)]
mod tests;
