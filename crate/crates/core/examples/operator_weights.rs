//! Class-weight distribution of `Ubar Z_1 U` for Haar-random `U` at n = 6.
//! The mass piles up around `k = n/2`.

use orbit_metrology::protocols::{scrambled_operator_weights, ProtocolConfig};
use orbit_metrology::quantum::EnsembleKind;

fn main() -> orbit_metrology::Result<()> {
    let mut config = ProtocolConfig::new(6, EnsembleKind::FullUnitary, 50, 11);
    config.n_e = 0;
    let hist = scrambled_operator_weights(&config, false)?;
    for (k, w) in hist.weights().iter().enumerate() {
        println!("k = {k}: {w:.4} {}", "#".repeat((w * 100.0).round() as usize));
    }
    println!("argmax {}", hist.argmax());
    Ok(())
}
