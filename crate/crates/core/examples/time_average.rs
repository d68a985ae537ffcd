//! Long-time averages of the QFI of `|0...0>` under integrable composing
//! Hamiltonians, against the exact infinite-time limit.

use orbit_metrology::pauli::{Letter, LocalGenerator, PauliString, PauliSum};
use orbit_metrology::protocols::{all_x, time_avg_limit, time_avg_qfi};
use orbit_metrology::quantum::StateVector;
use orbit_metrology::C64;

fn main() -> orbit_metrology::Result<()> {
    let one = C64::new(1.0, 0.0);
    for n in [4, 6] {
        let g = LocalGenerator::collective_z(n)?;
        let psi = StateVector::zeros(n)?;
        let ghz = PauliSum::from_terms(n, [(one, all_x(n)?)])?;
        let free = PauliSum::from_terms(
            n,
            (0..n)
                .map(|j| PauliString::single(n, j, Letter::X).map(|p| (one, p)))
                .collect::<orbit_metrology::Result<Vec<_>>>()?,
        )?;
        for (name, h) in [("X^n", ghz), ("sum X", free)] {
            let limit = time_avg_limit(&h, &g.to_dense()?, &psi)?;
            print!(
                "n = {n} H = {name:<6} limit {:>6.3} (static part only {:>6.3})",
                limit.exact, limit.centralizer_only
            );
            for t in [50.0, 100.0, 200.0] {
                print!("  T={t}: {:.4}", time_avg_qfi(&h, &g, &psi, t, 0.02)?);
            }
            println!();
        }
    }
    Ok(())
}
