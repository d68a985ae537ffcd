use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::{per_sample, ProtocolConfig, ProtocolResult};
use crate::error::{Error, Result};
use crate::orbit::binomial;
use crate::pauli::LocalGenerator;
use crate::qfi::{
    loss_qfi_closed_form, qfi_from_derivative, qfi_mixed, sector_generator, GeneratorDescriptor, DEFAULT_MIXED_TOL,
};
use crate::quantum::{
    dicke_state, haar_sample, partial_trace, symmetric_isometry, Axis, DensityMatrix, EnsembleKind, StateVector,
};
use crate::{C64, DEFAULT_DENSE_QUBIT_CAP};

/// When the particles are lost relative to phase encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossStage {
    Before,
    After,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossComparison {
    pub numeric: f64,
    pub closed_form: f64,
}

fn discarded(n: usize, k: usize) -> Vec<usize> {
    (n - k..n).collect()
}

/// Two-component Dicke probe `alpha|0_n> + beta|q_n>` (`q = n/2`) losing `k`
/// particles before or after the `S_z` phase is imprinted.
///
/// `Before` traces out `k` sites and evaluates the unitary-family QFI of the
/// remaining `n-k` sites. `After` imprints the phase on all `n` sites and
/// differentiates the reduced state, `d rho_r = Tr_k(-i [S_z, psi psi^dagger])`.
pub fn loss_experiment(n: usize, k: usize, alpha: C64, beta: C64, when: LossStage) -> Result<LossComparison> {
    if n == 0 || !n.is_multiple_of(2) || n > DEFAULT_DENSE_QUBIT_CAP {
        return Err(Error::invalid(format!(
            "n = {n} must be even and at most {DEFAULT_DENSE_QUBIT_CAP}"
        )));
    }
    if k > n {
        return Err(Error::invalid(format!("cannot lose {k} of {n} particles")));
    }
    let (a2, b2) = (alpha.norm_sqr(), beta.norm_sqr());
    if (a2 + b2 - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!(
            "|alpha|^2 + |beta|^2 = {} differs from 1",
            a2 + b2
        )));
    }
    let closed_form = loss_qfi_closed_form(n, k, a2, 1.0 - a2)?;
    if k == n {
        return Ok(LossComparison {
            numeric: 0.0,
            closed_form,
        });
    }
    let zero = dicke_state(n, 0)?;
    let excited = dicke_state(n, n / 2)?;
    let psi = StateVector::normalized(zero.amplitudes().mapv(|v| v * alpha) + excited.amplitudes().mapv(|v| v * beta))?;
    let gone = discarded(n, k);
    let rho = partial_trace(&psi, &gone)?;
    let numeric = match when {
        LossStage::Before => {
            let g = LocalGenerator::collective_z(n - k)?.to_dense()?;
            qfi_mixed(&rho, &g, DEFAULT_MIXED_TOL)?
        }
        LossStage::After => {
            let g = LocalGenerator::collective_z(n)?.to_dense()?;
            let full = psi.to_density();
            let comm = g.dot(full.matrix()) - full.matrix().dot(&g);
            let drho = DensityMatrix::from_trusted(comm.mapv(|v| v * C64::new(0.0, -1.0)));
            let drho_r = partial_trace(&drho, &gone)?;
            qfi_from_derivative(&rho, drho_r.matrix(), DEFAULT_MIXED_TOL)?
        }
    };
    Ok(LossComparison { numeric, closed_form })
}

/// Where particle loss enters the Haar-Ramsey protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossPoint {
    /// Lose `k` sites from the prepared probe `U|0>`, then imprint `S_z` on
    /// the `n-k` survivors (mixed-state QFI).
    AfterPreparation,
    /// Lose `k` sites from `Ubar e^{-i theta S_z} U|0>` just before the
    /// final measurement. The reduced state is pure at `theta = 0`, where
    /// the Bures metric gives `F = 4 (<G'^2> - ||P G'|0>||^2)` with
    /// `G' = Ubar S_z U` and `P` the projector onto `|0>` of the survivors.
    BeforeMeasurement,
}

/// Haar-Ramsey protocol on the symmetric sector with `k = config.loss_k`
/// particles lost at `point`.
pub fn haar_ramsey_loss(config: &ProtocolConfig, point: LossPoint) -> Result<ProtocolResult> {
    config.validate()?;
    if config.ensemble == EnsembleKind::FullUnitary {
        return Err(Error::invalid("loss protocol runs on a symmetric-sector ensemble"));
    }
    let (n, k) = (config.n_qubits, config.loss_k);
    let spec = config.spec()?;
    let label = format!("{} loss k={k} {point:?}", spec.describe());
    let values = match point {
        LossPoint::AfterPreparation => {
            if n > DEFAULT_DENSE_QUBIT_CAP {
                return Err(Error::CapExceeded {
                    what: "dense qubit",
                    requested: n,
                    limit: DEFAULT_DENSE_QUBIT_CAP,
                });
            }
            let b = symmetric_isometry(n)?;
            let g = LocalGenerator::collective_z(n - k)?.to_dense()?;
            let gone = discarded(n, k);
            per_sample(config, |_, stream| {
                let u = haar_sample(&spec, stream)?;
                let psi = StateVector::normalized(b.dot(&u.column(0)))?;
                qfi_mixed(&partial_trace(&psi, &gone)?, &g, DEFAULT_MIXED_TOL)
            })?
        }
        LossPoint::BeforeMeasurement => {
            let s = sector_generator(spec.kind, &GeneratorDescriptor::spin(n, Axis::Z))?;
            // Weight of Dicke state q on |0_r> (x) anything.
            let survive: Array1<f64> = (0..=n)
                .map(|q| if q <= k { binomial(k, q) / binomial(n, q) } else { 0.0 })
                .collect();
            per_sample(config, |_, stream| {
                let u = haar_sample(&spec, stream)?;
                let su0 = s.dot(&u.column(0));
                let w = u.t().mapv(|v| v.conj()).dot(&su0);
                let second: f64 = su0.iter().map(|v| v.norm_sqr()).sum();
                let kept: f64 = w.iter().zip(survive.iter()).map(|(v, p)| v.norm_sqr() * p).sum();
                Ok(4.0 * (second - kept).max(0.0))
            })?
        }
    };
    ProtocolResult::from_values(config, values, label)
}
