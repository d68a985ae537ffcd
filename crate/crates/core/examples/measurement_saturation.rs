//! The two-outcome fiducial projection after un-scrambling: its classical
//! Fisher information at a small angle against the QFI.

use orbit_metrology::pauli::LocalGenerator;
use orbit_metrology::qfi::{cfi_fiducial_measurement, qfi_pure, DEFAULT_THETA};
use orbit_metrology::quantum::{dagger, haar_unitary, RngStream, StateVector};

fn main() -> orbit_metrology::Result<()> {
    let n = 5;
    let sz = LocalGenerator::collective_z(n)?.to_dense()?;
    let zero = StateVector::zeros(n)?;
    for i in 0..8 {
        let u = haar_unitary(1 << n, &mut RngStream::new(21, i).rng())?;
        let gp = dagger(&u).dot(&sz).dot(&u);
        let qfi = qfi_pure(&zero, &gp)?;
        let cfi = cfi_fiducial_measurement(&gp, &zero, DEFAULT_THETA)?;
        println!("instance {i}: QFI {qfi:.6} CFI {cfi:.6} ratio {:.6}", cfi / qfi);
    }
    Ok(())
}
