//! Lie closures of a few Pauli generating sets and their class histograms
//! under `S_z`.

use orbit_metrology::orbit::{dla_closure, DlaReport, DEFAULT_CLOSURE_CAP};
use orbit_metrology::pauli::{LocalGenerator, PauliString};

fn main() -> orbit_metrology::Result<()> {
    let sets: [&[&str]; 4] = [
        &["X", "Z"],
        &["XX", "ZI"],
        &["XXI", "IXX", "ZII", "IZI", "IIZ"],
        &["XXI", "IXX", "ZII", "IZI", "IIZ", "XII", "IXI", "IIX"],
    ];
    for set in sets {
        let gens = set
            .iter()
            .map(|s| s.parse())
            .collect::<orbit_metrology::Result<Vec<PauliString>>>()?;
        let dla = dla_closure(&gens, DEFAULT_CLOSURE_CAP)?;
        let report = DlaReport::new(&dla, &LocalGenerator::collective_z(dla.n_qubits())?)?;
        println!(
            "{:?} -> dim {} classes {:?}",
            set, report.dla_dimension, report.class_counts
        );
        if report.dla_dimension <= 3 {
            let basis: Vec<String> = dla.sorted_basis().iter().map(|p| p.to_string()).collect();
            println!("    basis {basis:?}");
        }
    }
    Ok(())
}
