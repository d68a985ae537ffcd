//! A reproducible scaling sweep written to CSV, read back and fitted.

use orbit_metrology::quantum::EnsembleKind;
use orbit_metrology::sweep::{fit_scaling, read_rows, run_sweep, OutputFormat, SweepConfig};

fn main() -> orbit_metrology::Result<()> {
    let cfg = SweepConfig::from_toml_str(
        r#"
experiment = "haar_ramsey"
n = [10, 20, 40, 80]
samples = 400
seed = 2024
ensemble = "symmetric"
"#,
    )?;
    let mut spec = cfg.into_spec()?;
    assert_eq!(spec.ensemble, EnsembleKind::SymmetricUnitary);
    let path = std::env::temp_dir().join("orbit_metrology_sweep.csv");
    spec.out = Some(path.clone());
    spec.format = OutputFormat::Csv;
    run_sweep(&spec)?;
    print!("{}", std::fs::read_to_string(&path)?);
    let rows = read_rows(&path)?;
    let (e, hw) = fit_scaling(&rows)?;
    println!("fitted exponent {e:.3} +- {hw:.3}");
    Ok(())
}
