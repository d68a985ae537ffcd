//! Hamiltonians built only from `C_0` strings of `S_z` cannot move
//! `|0...0>`, so the QFI vanishes; adding one `C_n` string breaks this.

use orbit_metrology::protocols::{all_x, commuting_sanity, commuting_sanity_with};

fn main() -> orbit_metrology::Result<()> {
    let n = 6;
    let zero = commuting_sanity(n, 50, 1)?;
    println!("C_0 only: mean QFI {:.3e}", zero.mean);
    let mixed = commuting_sanity_with(n, 50, 1, &[all_x(n)?])?;
    println!("with X^n: mean QFI {:.3}", mixed.mean);
    Ok(())
}
