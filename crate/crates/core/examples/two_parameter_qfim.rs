//! Two-parameter QFIM for `G_1 = sum X`, `G_2 = sum Y` averaged over the
//! full Haar ensemble.

use orbit_metrology::pauli::{Letter, LocalGenerator};
use orbit_metrology::qfi::qfim_two_param;
use orbit_metrology::quantum::{haar_unitary, RngStream};

fn main() -> orbit_metrology::Result<()> {
    for n in [4usize, 6, 8] {
        let d = 1usize << n;
        let g1 = LocalGenerator::uniform(n, Letter::X, 1.0)?;
        let g2 = LocalGenerator::uniform(n, Letter::Y, 1.0)?.to_dense()?;
        let samples = 200;
        let (mut f11, mut f22, mut ratio) = (0.0, 0.0, 0.0);
        for i in 0..samples {
            let u = haar_unitary(d, &mut RngStream::new(4, i).rng())?;
            let f = qfim_two_param(&u, &g1.to_dense()?, &g2)?;
            f11 += f.entries[0][0];
            f22 += f.entries[1][1];
            ratio += f.off_diagonal_ratio();
        }
        let s = samples as f64;
        println!(
            "n = {n}: <F11> = {:.3} <F22> = {:.3} <|F12|/F11> = {:.4}  Tr(G^2)/d = {}",
            f11 / s,
            f22 / s,
            ratio / s,
            g1.trace_sq() / d as f64
        );
    }
    Ok(())
}
