//! Particle loss on the two-component probe `alpha|0_n> + beta|(n/2)_n>`
//! and on the symmetric Haar-Ramsey protocol.

use orbit_metrology::protocols::{haar_ramsey_loss, loss_experiment, LossPoint, LossStage, ProtocolConfig};
use orbit_metrology::qfi::{haar_ramsey_loss_avg, loss_qfi_closed_form, loss_remaining_probability};
use orbit_metrology::quantum::EnsembleKind;
use orbit_metrology::C64;

fn main() -> orbit_metrology::Result<()> {
    let n = 8;
    for a2 in [0.5, 0.3] {
        let (alpha, beta) = (C64::new(a2, 0.0).sqrt(), C64::new(1.0 - a2, 0.0).sqrt());
        for k in 0..=5 {
            let before = loss_experiment(n, k, alpha, beta, LossStage::Before)?;
            let after = loss_experiment(n, k, alpha, beta, LossStage::After)?;
            println!(
                "|alpha|^2 = {a2} k = {k}: closed {:.6} before {:.6} after {:.6}",
                loss_qfi_closed_form(n, k, a2, 1.0 - a2)?,
                before.numeric,
                after.numeric
            );
        }
    }
    println!("n = 40 survival of all n/2 excitations:");
    for k in 0..=5 {
        println!(
            "  k = {k}: {:.5}  (2^-k = {:.5}, e^(-k/2) = {:.5})",
            loss_remaining_probability(40, k)?,
            0.5f64.powi(k as i32),
            (-(k as f64) / 2.0).exp()
        );
    }

    for point in [LossPoint::AfterPreparation, LossPoint::BeforeMeasurement] {
        for k in [1, 2] {
            let mut config = ProtocolConfig::new(6, EnsembleKind::SymmetricUnitary, 500, 9);
            config.loss_k = k;
            let r = haar_ramsey_loss(&config, point)?;
            println!(
                "Haar-Ramsey n = 6 k = {k} {point:?}: {:.3} +- {:.3} (stated {:.3})",
                r.qfi_stats.mean,
                r.qfi_stats.std_error,
                haar_ramsey_loss_avg(6, k)?
            );
        }
    }
    Ok(())
}
