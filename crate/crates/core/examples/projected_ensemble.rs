//! Projected-ensemble protocol: measure `n_e` sites of `U|0>`, use each
//! conditional state as a probe. Compare against the Haar-Ramsey control
//! (`n_e = 0`) and fit the scaling exponent.

use orbit_metrology::protocols::{projected_ensemble_protocol, ProtocolConfig};
use orbit_metrology::quantum::EnsembleKind;
use orbit_metrology::sweep::{fit_scaling, run_sweep, Experiment, SweepSpec};

fn main() -> orbit_metrology::Result<()> {
    let mut config = ProtocolConfig::new(6, EnsembleKind::FullUnitary, 100, 3);
    config.n_e = 1;
    let r = projected_ensemble_protocol(&config)?;
    println!(
        "n = 6, n_e = 1: mean {:.3} +- {:.3}",
        r.qfi_stats.mean, r.qfi_stats.std_error
    );
    if let Some(outcomes) = &r.per_outcome_distribution {
        for o in outcomes.iter().take(4) {
            println!(
                "  sample {} outcome {} p = {:.3} F = {:.3}",
                o.sample, o.outcome, o.probability, o.qfi
            );
        }
    }
    config.n_e = 0;
    let control = projected_ensemble_protocol(&config)?;
    println!("control n_e = 0: mean {:.3}", control.qfi_stats.mean);

    let mut spec = SweepSpec::new(Experiment::Projected, vec![4, 6, 8]);
    spec.samples = 100;
    spec.n_e = 1;
    let rows = run_sweep(&spec)?;
    for row in &rows {
        println!("n = {}: {:.3} +- {:.3}", row.n, row.mean, row.std_error);
    }
    let (exponent, halfwidth) = fit_scaling(&rows)?;
    println!("exponent {exponent:.3} +- {halfwidth:.3}");
    Ok(())
}
