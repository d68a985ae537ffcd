use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::{first_column, per_sample, ProtocolConfig, ProtocolResult};
use crate::error::{Error, Result};
use crate::orbit::{class_weight_distribution, ClassHistogram};
use crate::pauli::{Letter, LocalGenerator, PauliString};
use crate::qfi::{qfi_mixed, qfi_pure, DEFAULT_MIXED_TOL};
use crate::quantum::{
    dagger, haar_sample, identity, measure_subsystem, prepare_with_outcome, EnsembleKind, StateVector,
};
use crate::{Matrix, C64};

/// One measurement outcome of one sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub sample: usize,
    /// Outcome bits of the measured sites, first measured site first.
    pub outcome: String,
    pub probability: f64,
    pub qfi: f64,
}

/// Outcome-resolved result of one projected-ensemble instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectedSample {
    pub outcomes: Vec<OutcomeRecord>,
    /// `sum_z p(z) F(z) / sum_z p(z)` over retained outcomes.
    pub weighted_qfi: f64,
    pub excluded_mass: f64,
}

fn outcome_bits(z: usize, n_e: usize) -> Vec<bool> {
    (0..n_e).map(|i| z >> (n_e - 1 - i) & 1 == 1).collect()
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn measured_sites(n: usize, n_e: usize) -> Vec<usize> {
    (n - n_e..n).collect()
}

fn check_projected(config: &ProtocolConfig) -> Result<()> {
    config.validate()?;
    if config.ensemble != EnsembleKind::FullUnitary {
        return Err(Error::invalid(
            "the projected-ensemble protocol samples the full unitary ensemble",
        ));
    }
    Ok(())
}

/// Evaluate every outcome of measuring the last `n_e` sites of `U|0>`.
///
/// The probe for outcome `z` is `Ubar (|psi_z> (x) |z>)`: the outcome is
/// re-prepared on the measured sites and the time-reversed unitary applied to
/// the whole register. `qfi_of` maps a probe to its Fisher information.
/// With `n_e = 0` nothing is measured and the probe is `U|0>` itself, which
/// is the Haar-Ramsey protocol.
fn evaluate_outcomes(
    sample: usize,
    u: &Matrix,
    n: usize,
    n_e: usize,
    p_min: f64,
    qfi_of: &dyn Fn(&StateVector) -> Result<f64>,
) -> Result<ProjectedSample> {
    let psi = first_column(u);
    if n_e == 0 {
        let f = qfi_of(&psi)?;
        return Ok(ProjectedSample {
            outcomes: vec![OutcomeRecord {
                sample,
                outcome: String::new(),
                probability: 1.0,
                qfi: f,
            }],
            weighted_qfi: f,
            excluded_mass: 0.0,
        });
    }
    let sites = measured_sites(n, n_e);
    let ud = dagger(u);
    let mut outcomes = Vec::with_capacity(1 << n_e);
    let mut excluded = 0.0;
    for z in 0..1usize << n_e {
        let bits = outcome_bits(z, n_e);
        match measure_subsystem(&psi, &sites, &bits, p_min) {
            Ok(m) => {
                let reprepared = prepare_with_outcome(&m.conditional, &sites, &bits)?;
                let probe = StateVector::normalized(ud.dot(reprepared.amplitudes()))?;
                outcomes.push(OutcomeRecord {
                    sample,
                    outcome: bit_string(&bits),
                    probability: m.probability,
                    qfi: qfi_of(&probe)?,
                });
            }
            Err(Error::DegenerateOutcome { probability }) => excluded += probability,
            Err(e) => return Err(e),
        }
    }
    let kept: f64 = outcomes.iter().map(|o| o.probability).sum();
    if outcomes.is_empty() || kept <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    let weighted_qfi = outcomes.iter().map(|o| o.probability * o.qfi).sum::<f64>() / kept;
    Ok(ProjectedSample {
        outcomes,
        weighted_qfi,
        excluded_mass: excluded,
    })
}

/// Outcome-resolved projected-ensemble QFI of one unitary under `g`.
pub fn projected_outcomes(u: &Matrix, n_e: usize, g: &Matrix, p_min: f64) -> Result<ProjectedSample> {
    let n = crate::quantum::qubits_for_dim(u.nrows())
        .ok_or_else(|| Error::invalid("unitary dimension is not a power of two"))?;
    if n_e >= n {
        return Err(Error::invalid(format!("n_e = {n_e} must be below n = {n}")));
    }
    evaluate_outcomes(0, u, n, n_e, p_min, &|probe| qfi_pure(probe, g))
}

fn run_projected(
    config: &ProtocolConfig,
    qfi_of: &(dyn Fn(&StateVector) -> Result<(f64, f64)> + Sync),
) -> Result<ProtocolResult> {
    check_projected(config)?;
    let spec = config.spec()?;
    let (n, n_e) = (config.n_qubits, config.n_e);
    let runs = per_sample(config, |i, stream| {
        let u = haar_sample(&spec, stream)?;
        let refs = std::cell::RefCell::new(Vec::new());
        let res = evaluate_outcomes(i, &u, n, n_e, config.p_min, &|probe| {
            let (value, reference) = qfi_of(probe)?;
            refs.borrow_mut().push(reference);
            Ok(value)
        });
        match res {
            Ok(s) => {
                let kept: f64 = s.outcomes.iter().map(|o| o.probability).sum();
                let reference = s
                    .outcomes
                    .iter()
                    .zip(refs.borrow().iter())
                    .map(|(o, r)| o.probability * r)
                    .sum::<f64>()
                    / kept;
                Ok(Some((s, reference)))
            }
            Err(Error::DegenerateSample) => Ok(None),
            Err(e) => Err(e),
        }
    })?;
    let mut values = Vec::new();
    let mut references = Vec::new();
    let mut records = Vec::new();
    let mut excluded = 0.0;
    let mut skipped = 0;
    for run in runs {
        match run {
            Some((s, r)) => {
                values.push(s.weighted_qfi);
                references.push(r);
                excluded += s.excluded_mass;
                records.extend(s.outcomes);
            }
            None => skipped += 1,
        }
    }
    if values.is_empty() {
        return Err(Error::DegenerateSample);
    }
    let mut result = ProtocolResult::from_values(config, values, format!("projected(n={n}, n_e={n_e})"))?;
    result.reference_values = Some(references);
    result.per_outcome_distribution = Some(records);
    result.excluded_mass = excluded;
    result.skipped_samples = skipped;
    Ok(result)
}

/// Projected-ensemble protocol with `G = S_z`.
///
/// `qfi_stats` aggregates the probability-weighted QFI of each sample;
/// `per_outcome_distribution` keeps every retained outcome. Samples whose
/// outcomes all fall below `p_min` are skipped and counted.
pub fn projected_ensemble_protocol(config: &ProtocolConfig) -> Result<ProtocolResult> {
    let g = LocalGenerator::collective_z(config.n_qubits)?.to_dense()?;
    let mut result = run_projected(config, &|probe| {
        let f = qfi_pure(probe, &g)?;
        Ok((f, f))
    })?;
    result.reference_values = None;
    Ok(result)
}

/// Projected protocol with each conditional probe depolarised with strength
/// `noise_p` on the full register; `reference_values` are the noiseless runs.
pub(crate) fn noisy_projected(config: &ProtocolConfig) -> Result<ProtocolResult> {
    let g = LocalGenerator::collective_z(config.n_qubits)?.to_dense()?;
    let p = config.noise_p;
    run_projected(config, &|probe| {
        let noisy = qfi_mixed(&probe.to_density().depolarized(p)?, &g, DEFAULT_MIXED_TOL)?;
        Ok((noisy, qfi_pure(probe, &g)?))
    })
}

/// Independent evaluation of one outcome through dense projectors:
/// with `pi` the outcome projector and `pt = Ubar pi U`, the probe is
/// `pt|0> / sqrt(p)`, so `F = 4 (<0|pt G^2 pt|0>/p - (<0|G'|0>/p)^2)` with
/// `G' = pt G pt`. Returns `(p, F)`.
pub fn projected_generator_qfi(u: &Matrix, n_e: usize, outcome: &[bool], g: &Matrix) -> Result<(f64, f64)> {
    let d = u.nrows();
    let n = crate::quantum::qubits_for_dim(d).ok_or_else(|| Error::invalid("dimension is not a power of two"))?;
    crate::error::ensure_dim(n_e, outcome.len())?;
    if n_e == 0 || n_e >= n {
        return Err(Error::invalid("need 1 <= n_e < n"));
    }
    // Last n_e bits of a basis index hold the measured sites.
    let target = outcome.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
    let mask = (1usize << n_e) - 1;
    let mut pi = Matrix::zeros((d, d));
    for i in 0..d {
        if i & mask == target {
            pi[[i, i]] = C64::new(1.0, 0.0);
        }
    }
    let ud = dagger(u);
    let pt = ud.dot(&pi).dot(u);
    let mut zero = Array1::<C64>::zeros(d);
    zero[0] = C64::new(1.0, 0.0);
    let chi = pt.dot(&zero);
    let p: f64 = chi.iter().map(|v| v.norm_sqr()).sum();
    if p <= 0.0 {
        return Err(Error::DegenerateOutcome { probability: p });
    }
    let g_prime = pt.dot(g).dot(&pt);
    let first = g_prime[[0, 0]].re / p;
    let g2 = g.dot(g);
    let second: f64 = chi
        .iter()
        .zip(g2.dot(&chi).iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum::<f64>()
        / p;
    Ok((p, 4.0 * (second - first * first)))
}

/// Mean class-weight histogram of `Ubar Z_1 U` (or `(I + Ubar Z_1 U)/2`
/// when `include_identity`) over Haar draws, with respect to `S_z`.
pub fn scrambled_operator_weights(config: &ProtocolConfig, include_identity: bool) -> Result<ClassHistogram> {
    config.validate()?;
    if config.ensemble != EnsembleKind::FullUnitary {
        return Err(Error::invalid("operator weights are defined for the full ensemble"));
    }
    let n = config.n_qubits;
    let spec = config.spec()?;
    let z1 = PauliString::single(n, 0, Letter::Z)?.to_dense()?;
    let g = LocalGenerator::collective_z(n)?;
    let hists = per_sample(config, |_, stream| {
        let u = haar_sample(&spec, stream)?;
        let mut o = dagger(&u).dot(&z1).dot(&u);
        if include_identity {
            o = (o + identity(1 << n)).mapv(|v| v * 0.5);
        }
        class_weight_distribution(&o, &g)
    })?;
    ClassHistogram::mean(&hists)
}
