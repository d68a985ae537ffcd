//! `exp(-i t X...X)|0...0>` sweeps between `|0...0>` and a GHZ state; the
//! QFI under `S_z` is `n^2 sin^2(2t)`.

use std::f64::consts::FRAC_PI_4;

use orbit_metrology::protocols::ghz_orbit_qfi;

fn main() -> orbit_metrology::Result<()> {
    for n in 2..=10 {
        println!(
            "n = {n:>2}: F(pi/4) = {:>6.2}  F(pi/8) = {:>6.2}",
            ghz_orbit_qfi(n, FRAC_PI_4)?,
            ghz_orbit_qfi(n, FRAC_PI_4 / 2.0)?
        );
    }
    Ok(())
}
