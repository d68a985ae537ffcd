//! Depolarising the Haar-Ramsey probe suppresses every instance's QFI by
//! the same factor `(1-p)^2 / (1 - p + 2p/d)`.

use orbit_metrology::protocols::{expected_noise_ratio, noisy_protocol, NoiseBase, ProtocolConfig};
use orbit_metrology::qfi::GeneratorDescriptor;
use orbit_metrology::quantum::{Axis, EnsembleKind};

fn main() -> orbit_metrology::Result<()> {
    for p in [0.1, 0.5, 0.9] {
        let mut config = ProtocolConfig::new(4, EnsembleKind::FullUnitary, 20, 5);
        config.noise_p = p;
        let r = noisy_protocol(&config, &NoiseBase::HaarRamsey(GeneratorDescriptor::spin(4, Axis::Z)))?;
        let ratios = r.ratios().unwrap_or_default();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "p = {p}: ratio in [{lo:.12}, {hi:.12}], expected {:.12}",
            expected_noise_ratio(&config)?
        );
    }
    Ok(())
}
