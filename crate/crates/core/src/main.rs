use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use orbit_metrology::orbit::{
    census_tail_probability, concentration_bound, dla_closure, full_class_census, symmetrized_class_census, DlaReport,
    DEFAULT_CLOSURE_CAP,
};
use orbit_metrology::pauli::{LocalGenerator, PauliString, PauliSum};
use orbit_metrology::protocols::{
    all_x, loss_experiment, scrambled_operator_weights, time_avg_limit, time_avg_qfi, twist_scan, LossStage,
    ProtocolConfig,
};
use orbit_metrology::qfi::loss_qfi_closed_form;
use orbit_metrology::quantum::{EnsembleKind, StateVector};
use orbit_metrology::sweep::{render_rows, run_sweep, SweepConfig};
use orbit_metrology::{Error, Result, C64};

/// Operator-orbit quantum metrology experiments.
#[derive(Parser)]
#[command(name = "orbit-metrology", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Qubit number; `sweep` takes a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',')]
    n: Vec<usize>,
    /// Measured (ancilla) qubits in the projected ensemble.
    #[arg(long, global = true)]
    ne: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// full, symmetric or orthogonal.
    #[arg(long, global = true)]
    ensemble: Option<String>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Depolarising strength.
    #[arg(long, global = true)]
    p: Option<f64>,
    /// Number of lost particles.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Probe angle for classical Fisher information.
    #[arg(long, global = true)]
    theta: Option<f64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json (csv only applies to tabular output).
    #[arg(long, global = true)]
    format: Option<String>,
    /// TOML key-value file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Lie closure of a Pauli generating set and its class histogram under S_z.
    Dla {
        /// Comma-separated Pauli strings, e.g. XX,ZI.
        #[arg(long, value_delimiter = ',', required = true)]
        generators: Vec<String>,
    },
    /// Full and symmetrised class censuses with the concentration bound.
    Census,
    /// Mean class weights of the scrambled operator Ubar Z_1 U.
    Weights,
    /// Haar-Ramsey Fisher information.
    HaarRamsey {
        #[arg(long, default_value = "z")]
        axis: String,
    },
    /// One-axis twist-untwist scan.
    Twist {
        #[arg(long, default_value_t = 1.0)]
        chi: f64,
        #[arg(long, default_value_t = 64)]
        points: usize,
    },
    /// Time-averaged QFI of |0...0> under an integrable Hamiltonian.
    TimeAvg {
        /// all-x, sum-x, or a Pauli sum with `;`-separated `coeff letters` terms.
        #[arg(long, default_value = "all-x")]
        hamiltonian: String,
        #[arg(long, default_value_t = 200.0)]
        time: f64,
        #[arg(long, default_value_t = 0.02)]
        dt: f64,
    },
    /// Projected-ensemble protocol.
    Projected,
    /// Haar-Ramsey under depolarising noise.
    Noise {
        #[arg(long, default_value = "z")]
        axis: String,
    },
    /// Particle loss: two-component probe (default) or Haar-Ramsey (`--haar`).
    Loss {
        /// |alpha|^2 of the probe alpha|0_n> + beta|(n/2)_n>.
        #[arg(long, default_value_t = 0.5)]
        alpha2: f64,
        #[arg(long)]
        haar: bool,
        /// after-preparation or before-measurement (Haar-Ramsey only).
        #[arg(long)]
        loss_point: Option<String>,
    },
    /// Run an experiment over several n and emit one row per n.
    Sweep {
        /// haar_ramsey, projected, noise, loss, ghz or twist.
        #[arg(long)]
        experiment: Option<String>,
        #[arg(long)]
        axis: Option<String>,
        #[arg(long)]
        loss_point: Option<String>,
        #[arg(long)]
        record_timing: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

impl Common {
    /// Config file entries overridden by flags.
    fn sweep_config(&self, experiment: Option<String>) -> Result<SweepConfig> {
        let file = match &self.config {
            Some(path) => SweepConfig::from_file(path)?,
            None => SweepConfig::default(),
        };
        let flags = SweepConfig {
            experiment,
            n: (!self.n.is_empty()).then(|| self.n.clone()),
            samples: self.samples,
            seed: self.seed,
            ensemble: self.ensemble.clone(),
            ne: self.ne,
            p: self.p,
            k: self.k,
            theta: self.theta,
            epsilon: self.epsilon,
            out: self.out.clone(),
            format: self.format.clone(),
            ..SweepConfig::default()
        };
        Ok(file.overridden_by(flags))
    }

    fn single_n(cfg: &SweepConfig) -> Result<usize> {
        match cfg.n.as_deref() {
            Some([n]) => Ok(*n),
            Some(ns) => Err(Error::InvalidArgument(format!("expected one --n, got {ns:?}"))),
            None => Err(Error::InvalidArgument("--n is required".into())),
        }
    }

    fn protocol_config(cfg: &SweepConfig) -> Result<ProtocolConfig> {
        let mut c = ProtocolConfig {
            n_qubits: Self::single_n(cfg)?,
            ..ProtocolConfig::default()
        };
        if let Some(v) = cfg.samples {
            c.samples = v;
        }
        if let Some(v) = cfg.seed {
            c.master_seed = v;
        }
        if let Some(v) = &cfg.ensemble {
            c.ensemble = v.parse()?;
        }
        if let Some(v) = cfg.epsilon {
            c.epsilon = v;
        }
        Ok(c)
    }
}

/// Writes a JSON report to `--out` or stdout.
fn emit_json<T: Serialize>(cfg: &SweepConfig, value: &T) -> Result<()> {
    if cfg.format.as_deref().is_some_and(|f| !f.eq_ignore_ascii_case("json")) {
        return Err(Error::InvalidArgument("this subcommand only emits JSON".into()));
    }
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Serialize(e.to_string()))? + "\n";
    emit_text(cfg, &text)
}

fn emit_text(cfg: &SweepConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Runs a sweep experiment; rows go to `--out` or stdout.
fn tabular(cfg: SweepConfig) -> Result<()> {
    let spec = cfg.into_spec()?;
    let rows = run_sweep(&spec)?;
    if spec.out.is_none() {
        print!("{}", render_rows(&rows, spec.format)?);
    }
    Ok(())
}

fn hamiltonian(n: usize, text: &str) -> Result<PauliSum> {
    let one = C64::new(1.0, 0.0);
    match text {
        "all-x" => PauliSum::from_terms(n, [(one, all_x(n)?)]),
        "sum-x" => PauliSum::from_terms(
            n,
            (0..n)
                .map(|j| PauliString::single(n, j, orbit_metrology::pauli::Letter::X).map(|p| (one, p)))
                .collect::<Result<Vec<_>>>()?,
        ),
        custom => {
            let h: PauliSum = custom.replace(';', "\n").parse()?;
            if h.n_qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: h.n_qubits(),
                });
            }
            Ok(h)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let common = cli.common;
    match cli.command {
        Command::Dla { generators } => {
            let cfg = common.sweep_config(None)?;
            let gens = generators
                .iter()
                .map(|s| s.parse())
                .collect::<Result<Vec<PauliString>>>()?;
            let dla = dla_closure(&gens, DEFAULT_CLOSURE_CAP)?;
            let g = LocalGenerator::collective_z(dla.n_qubits())?;
            emit_json(&cfg, &DlaReport::new(&dla, &g)?)
        }
        Command::Census => {
            let cfg = common.sweep_config(None)?;
            let n = Common::single_n(&cfg)?;
            let eps = cfg.epsilon.unwrap_or(0.25);
            let full = full_class_census(n, &LocalGenerator::collective_z(n)?)?;
            let sym = symmetrized_class_census(n)?;
            emit_json(
                &cfg,
                &json!({
                    "n": n,
                    "class_counts": full.weights(),
                    "normalized_weights": full.normalized()?.weights(),
                    "symmetrized_counts": sym.weights(),
                    "symmetrized_weights": sym.normalized()?.weights(),
                    "epsilon": eps,
                    "concentration_bound": concentration_bound(n, eps)?,
                    "tail_probability": census_tail_probability(n, eps)?,
                }),
            )
        }
        Command::Weights => {
            let cfg = common.sweep_config(None)?;
            let mut pc = Common::protocol_config(&cfg)?;
            pc.n_e = 0;
            let hist = scrambled_operator_weights(&pc, false)?;
            emit_json(
                &cfg,
                &json!({
                    "n": pc.n_qubits,
                    "samples": pc.samples,
                    "seed": pc.master_seed,
                    "weights": hist.weights(),
                    "argmax": hist.argmax(),
                }),
            )
        }
        Command::HaarRamsey { axis } => {
            let mut cfg = common.sweep_config(Some("haar_ramsey".into()))?;
            cfg.axis = Some(axis);
            tabular(cfg)
        }
        Command::Twist { chi, points } => {
            let cfg = common.sweep_config(None)?;
            emit_json(&cfg, &twist_scan(Common::single_n(&cfg)?, chi, points)?)
        }
        Command::TimeAvg {
            hamiltonian: h,
            time,
            dt,
        } => {
            let cfg = common.sweep_config(None)?;
            let n = Common::single_n(&cfg)?;
            let h_c = hamiltonian(n, &h)?;
            let g = LocalGenerator::collective_z(n)?;
            let psi = StateVector::zeros(n)?;
            let limit = time_avg_limit(&h_c, &g.to_dense()?, &psi)?;
            emit_json(
                &cfg,
                &json!({
                    "n": n,
                    "hamiltonian": h_c.to_string().trim_end().replace('\n', "; "),
                    "time": time,
                    "time_average": time_avg_qfi(&h_c, &g, &psi, time, dt)?,
                    "limit": limit,
                }),
            )
        }
        Command::Projected => {
            let mut cfg = common.sweep_config(Some("projected".into()))?;
            cfg.ensemble.get_or_insert_with(|| "full".into());
            tabular(cfg)
        }
        Command::Noise { axis } => {
            let mut cfg = common.sweep_config(Some("noise".into()))?;
            cfg.axis = Some(axis);
            tabular(cfg)
        }
        Command::Loss {
            alpha2,
            haar,
            loss_point,
        } => {
            let mut cfg = common.sweep_config(Some("loss".into()))?;
            if haar {
                cfg.loss_point = loss_point;
                cfg.ensemble
                    .get_or_insert_with(|| EnsembleKind::SymmetricUnitary.name().into());
                return tabular(cfg);
            }
            let n = Common::single_n(&cfg)?;
            let k = cfg.k.unwrap_or(0);
            if !(0.0..=1.0).contains(&alpha2) {
                return Err(Error::InvalidArgument(format!("alpha2 = {alpha2} outside [0, 1]")));
            }
            let alpha = C64::new(alpha2.sqrt(), 0.0);
            let beta = C64::new((1.0 - alpha2).sqrt(), 0.0);
            let before = loss_experiment(n, k, alpha, beta, LossStage::Before)?;
            let after = loss_experiment(n, k, alpha, beta, LossStage::After)?;
            emit_json(
                &cfg,
                &json!({
                    "n": n,
                    "k": k,
                    "alpha2": alpha2,
                    "closed_form": loss_qfi_closed_form(n, k, alpha2, 1.0 - alpha2)?,
                    "loss_before_encoding": before.numeric,
                    "loss_after_encoding": after.numeric,
                }),
            )
        }
        Command::Sweep {
            experiment,
            axis,
            loss_point,
            record_timing,
        } => {
            let mut cfg = common.sweep_config(experiment)?;
            if axis.is_some() {
                cfg.axis = axis;
            }
            if loss_point.is_some() {
                cfg.loss_point = loss_point;
            }
            if record_timing {
                cfg.record_timing = Some(true);
            }
            tabular(cfg)
        }
    }
}
