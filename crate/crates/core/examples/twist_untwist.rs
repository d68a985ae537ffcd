//! One-axis twisting `chi S_x^2` from the top Dicke state, scanned over time.

use orbit_metrology::protocols::{twist_scan, TWIST_GRID_POINTS};

fn main() -> orbit_metrology::Result<()> {
    for n in [10, 40, 160, 640] {
        let scan = twist_scan(n, 1.0, TWIST_GRID_POINTS)?;
        let nf = n as f64;
        println!(
            "n = {n:>4}: best F = {:>10.2} at t = {:.4}  (F/n = {:.2}, F/n^2 = {:.3})",
            scan.best_qfi,
            scan.best_time,
            scan.best_qfi / nf,
            scan.best_qfi / (nf * nf)
        );
    }
    Ok(())
}
