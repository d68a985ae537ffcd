//! Class sizes for `G = S_z`: the full census `binom(n,k) 2^n`, the
//! symmetrised census `(k+1)(n-k+1)`, the Chernoff tail and the
//! compatibility rule.

use orbit_metrology::orbit::{
    census_tail_probability, compatibility_test, concentration_bound, full_class_census, symmetrized_class_census,
};
use orbit_metrology::pauli::LocalGenerator;

fn main() -> orbit_metrology::Result<()> {
    for n in [2, 6, 12] {
        let full = full_class_census(n, &LocalGenerator::collective_z(n)?)?;
        let sym = symmetrized_class_census(n)?;
        println!("n = {n}");
        println!("  full        {:?}", full.weights());
        println!("  symmetrized {:?} (total {})", sym.weights(), sym.total());
    }
    for (n, eps) in [(6, 0.5), (20, 0.25), (60, 0.25)] {
        println!(
            "n = {n}, eps = {eps}: tail {:.6} <= bound {:.6}",
            census_tail_probability(n, eps)?,
            concentration_bound(n, eps)?
        );
    }
    let v = compatibility_test(3, 0, 10, 0.25)?;
    println!(
        "k = 3 vs k_ref = 0 at n = 10: threshold {} compatible {}",
        v.threshold, v.compatible
    );
    Ok(())
}
