//! Pauli strings: parsing, products, commutators and the class index
//! `N(P, G)` (number of sites where `P` anticommutes with the generator).

use orbit_metrology::pauli::{
    anticommute_count, pauli_commutator, pauli_product, LocalGenerator, PauliString, PauliSum,
};

fn main() -> orbit_metrology::Result<()> {
    let p: PauliString = "XYZI".parse()?;
    let q: PauliString = "-iZZXI".parse()?;
    println!("p = {p}, q = {q}, weight(p) = {}", p.weight());
    println!("p q = {}", pauli_product(&p, &q)?);
    match pauli_commutator(&p, &q)? {
        Some((c, r)) => println!("[p, q] = ({c}) {r}"),
        None => println!("p and q commute"),
    }

    let g = LocalGenerator::collective_z(4)?;
    for s in ["IIII", "XIII", "XYII", "XXYY", "ZZZZ"] {
        let p: PauliString = s.parse()?;
        println!("N({s}, {}) = {}", g.label(), anticommute_count(&p, &g)?);
    }

    let h: PauliSum = "0.5 XXI\n0.5 IXX\n-1 ZII".parse()?;
    println!("H =\n{h}hermitian: {}", h.is_hermitian());
    Ok(())
}
