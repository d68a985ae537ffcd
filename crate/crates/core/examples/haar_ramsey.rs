//! Haar-Ramsey Fisher information for the three ensembles, next to the
//! stated closed form and the exact two-moment average.

use orbit_metrology::protocols::{haar_ramsey_mc, ProtocolConfig};
use orbit_metrology::qfi::{analytic_haar_avg, weingarten_haar_avg, GeneratorDescriptor};
use orbit_metrology::quantum::{Axis, EnsembleKind};

fn main() -> orbit_metrology::Result<()> {
    let runs = [
        (EnsembleKind::FullUnitary, Axis::Z, [4usize, 5, 6]),
        (EnsembleKind::SymmetricUnitary, Axis::Z, [10, 20, 40]),
        (EnsembleKind::SymmetricOrthogonal, Axis::X, [10, 20, 40]),
    ];
    println!(
        "{:<11} {:>3} {:>10} {:>8} {:>10} {:>10}",
        "ensemble", "n", "mean", "stderr", "stated", "exact"
    );
    for (kind, axis, ns) in runs {
        for n in ns {
            let config = ProtocolConfig::new(n, kind, 1000, 1);
            let g = GeneratorDescriptor::spin(n, axis);
            let r = haar_ramsey_mc(&config, &g)?;
            let spec = config.spec()?;
            println!(
                "{:<11} {:>3} {:>10.4} {:>8.4} {:>10.4} {:>10.4}",
                kind.name(),
                n,
                r.qfi_stats.mean,
                r.qfi_stats.std_error,
                analytic_haar_avg(&spec, &g)?,
                weingarten_haar_avg(&spec, &g)?
            );
        }
    }
    Ok(())
}
