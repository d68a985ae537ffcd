//! Scaling sweeps: run one experiment over a list of qubit numbers, attach
//! closed-form oracles, fit power laws and emit CSV or JSON.
//!
//! CSV columns, in order:
//!
//! ```text
//! experiment,n,params,mean,std_error,analytic_oracle,exact_oracle,samples,seed,wall_time_ms
//! ```
//!
//! Floats are written with 17 significant digits (`{:.16e}`) so a file
//! parses back to the same doubles. Missing oracles are empty fields.
//! `wall_time_ms` is 0 unless timing was requested, which keeps repeated
//! runs byte-identical.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{
    ghz_orbit_qfi, haar_ramsey_loss, haar_ramsey_mc, noisy_protocol, projected_ensemble_protocol, twist_scan,
    LossPoint, NoiseBase, ProtocolConfig, ProtocolResult, TWIST_GRID_POINTS,
};
use crate::qfi::{
    analytic_haar_avg, depolarize_factor, haar_ramsey_loss_avg, weingarten_haar_avg, GeneratorDescriptor,
};
use crate::quantum::{Axis, EnsembleKind, EnsembleSpec};

pub const CSV_HEADER: [&str; 10] = [
    "experiment",
    "n",
    "params",
    "mean",
    "std_error",
    "analytic_oracle",
    "exact_oracle",
    "samples",
    "seed",
    "wall_time_ms",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Haar-Ramsey QFI of `G` along `axis`.
    HaarRamsey,
    /// Projected ensemble, mean outcome-weighted QFI of `S_z`.
    Projected,
    /// Haar-Ramsey with depolarising noise of strength `p`.
    Noise,
    /// Symmetric-sector Haar-Ramsey with `k` particles lost.
    Loss,
    /// `exp(-i pi/4 X...X)|0...0>` under `S_z` (one deterministic value).
    Ghz,
    /// Best one-axis-twisting QFI over the default time grid, `chi = 1`.
    Twist,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::HaarRamsey,
        Experiment::Projected,
        Experiment::Noise,
        Experiment::Loss,
        Experiment::Ghz,
        Experiment::Twist,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::HaarRamsey => "haar_ramsey",
            Experiment::Projected => "projected",
            Experiment::Noise => "noise",
            Experiment::Loss => "loss",
            Experiment::Ghz => "ghz",
            Experiment::Twist => "twist",
        }
    }

    fn is_deterministic(self) -> bool {
        matches!(self, Experiment::Ghz | Experiment::Twist)
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == key)
            .ok_or_else(|| Error::invalid(format!("unknown experiment '{s}'")))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Parse(format!("unknown format '{other}'"))),
        }
    }
}

/// A fully specified sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub experiment: Experiment,
    /// Strictly increasing.
    pub n_values: Vec<usize>,
    pub samples: usize,
    pub master_seed: u64,
    pub ensemble: EnsembleKind,
    pub axis: Axis,
    pub n_e: usize,
    pub p: f64,
    pub k: usize,
    pub theta: f64,
    pub epsilon: f64,
    pub loss_point: LossPoint,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub record_timing: bool,
}

impl SweepSpec {
    /// Defaults for everything but the experiment and the qubit numbers.
    pub fn new(experiment: Experiment, n_values: Vec<usize>) -> Self {
        let base = ProtocolConfig::default();
        Self {
            experiment,
            n_values,
            samples: base.samples,
            master_seed: base.master_seed,
            ensemble: base.ensemble,
            axis: Axis::Z,
            n_e: base.n_e,
            p: 0.0,
            k: 0,
            theta: base.theta_probe,
            epsilon: base.epsilon,
            loss_point: LossPoint::BeforeMeasurement,
            out: None,
            format: OutputFormat::Csv,
            record_timing: false,
        }
    }

    /// Checks every row's configuration without running anything.
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::invalid("a sweep needs at least one n"));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "n values must be strictly increasing: {:?}",
                self.n_values
            )));
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        for &n in &self.n_values {
            self.check_row(n)?;
        }
        if let Some(out) = &self.out {
            let parent = out
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            if !parent.is_dir() {
                return Err(Error::invalid(format!(
                    "output directory {} does not exist",
                    parent.display()
                )));
            }
        }
        Ok(())
    }

    fn check_row(&self, n: usize) -> Result<()> {
        let config = self.config(n);
        match self.experiment {
            Experiment::Ghz => {
                if n == 0 {
                    return Err(Error::invalid("n must be at least 1"));
                }
                if n > crate::DEFAULT_DENSE_QUBIT_CAP {
                    return Err(Error::CapExceeded {
                        what: "dense qubit",
                        requested: n,
                        limit: crate::DEFAULT_DENSE_QUBIT_CAP,
                    });
                }
                Ok(())
            }
            Experiment::Twist => {
                if n == 0 || n > 4000 {
                    return Err(Error::invalid(format!("twist needs 1 <= n <= 4000, got {n}")));
                }
                Ok(())
            }
            Experiment::Projected => {
                if self.ensemble != EnsembleKind::FullUnitary {
                    return Err(Error::invalid("the projected ensemble needs --ensemble full"));
                }
                config.validate()
            }
            Experiment::Loss => {
                if !self.ensemble.is_symmetric() {
                    return Err(Error::invalid("the loss sweep needs a symmetric-sector ensemble"));
                }
                config.validate()
            }
            Experiment::HaarRamsey | Experiment::Noise => config.validate(),
        }
    }

    /// Protocol configuration for one row. Parameters an experiment does not
    /// use are zeroed so they cannot trip validation.
    pub fn config(&self, n: usize) -> ProtocolConfig {
        let mut c = ProtocolConfig::new(n, self.ensemble, self.samples, self.master_seed);
        c.epsilon = self.epsilon;
        c.theta_probe = self.theta;
        c.n_e = if self.experiment == Experiment::Projected {
            self.n_e
        } else {
            0
        };
        c.noise_p = if self.experiment == Experiment::Noise {
            self.p
        } else {
            0.0
        };
        c.loss_k = if self.experiment == Experiment::Loss { self.k } else { 0 };
        c
    }

    fn params(&self) -> String {
        match self.experiment {
            Experiment::HaarRamsey => format!("ensemble={};axis={}", self.ensemble, self.axis),
            Experiment::Projected => format!("ensemble={};n_e={}", self.ensemble, self.n_e),
            Experiment::Noise => format!("ensemble={};axis={};p={}", self.ensemble, self.axis, self.p),
            Experiment::Loss => {
                let point = match self.loss_point {
                    LossPoint::AfterPreparation => "after_preparation",
                    LossPoint::BeforeMeasurement => "before_measurement",
                };
                format!("ensemble={};k={};point={point}", self.ensemble, self.k)
            }
            Experiment::Ghz => "t=pi/4".to_string(),
            Experiment::Twist => format!("chi=1;points={TWIST_GRID_POINTS}"),
        }
    }
}

/// One output line of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub experiment: String,
    pub n: usize,
    /// `key=value` pairs joined by `;`.
    pub params: String,
    pub mean: f64,
    pub std_error: f64,
    /// Closed form as stated for this protocol, when there is one.
    pub analytic_oracle: Option<f64>,
    /// Exact ensemble average from the Haar moments, when it differs in
    /// derivation from the stated closed form.
    pub exact_oracle: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub wall_time_ms: u64,
}

fn haar_oracles(spec: &SweepSpec, n: usize) -> Result<(f64, f64)> {
    let es = EnsembleSpec::new(spec.ensemble, n)?;
    let g = GeneratorDescriptor::spin(n, spec.axis);
    Ok((analytic_haar_avg(&es, &g)?, weingarten_haar_avg(&es, &g)?))
}

fn row_from(spec: &SweepSpec, n: usize, r: &ProtocolResult) -> SweepRow {
    SweepRow {
        experiment: spec.experiment.name().to_string(),
        n,
        params: spec.params(),
        mean: r.qfi_stats.mean,
        std_error: r.qfi_stats.std_error,
        analytic_oracle: None,
        exact_oracle: None,
        samples: r.qfi_stats.samples,
        seed: spec.master_seed,
        wall_time_ms: 0,
    }
}

fn deterministic_row(spec: &SweepSpec, n: usize, value: f64) -> SweepRow {
    SweepRow {
        experiment: spec.experiment.name().to_string(),
        n,
        params: spec.params(),
        mean: value,
        std_error: 0.0,
        analytic_oracle: None,
        exact_oracle: None,
        samples: 1,
        seed: spec.master_seed,
        wall_time_ms: 0,
    }
}

fn run_row(spec: &SweepSpec, n: usize) -> Result<SweepRow> {
    let config = spec.config(n);
    let mut row = match spec.experiment {
        Experiment::HaarRamsey => {
            let r = haar_ramsey_mc(&config, &GeneratorDescriptor::spin(n, spec.axis))?;
            let (a, e) = haar_oracles(spec, n)?;
            SweepRow {
                analytic_oracle: Some(a),
                exact_oracle: Some(e),
                ..row_from(spec, n, &r)
            }
        }
        Experiment::Projected => {
            let r = projected_ensemble_protocol(&config)?;
            let mut row = row_from(spec, n, &r);
            if spec.n_e == 0 {
                let (a, e) = haar_oracles(
                    &SweepSpec {
                        axis: Axis::Z,
                        ..spec.clone()
                    },
                    n,
                )?;
                row.analytic_oracle = Some(a);
                row.exact_oracle = Some(e);
            }
            row
        }
        Experiment::Noise => {
            let r = noisy_protocol(&config, &NoiseBase::HaarRamsey(GeneratorDescriptor::spin(n, spec.axis)))?;
            let (a, e) = haar_oracles(spec, n)?;
            let f = noise_factor(spec.p, n)?;
            SweepRow {
                analytic_oracle: Some(f * a),
                exact_oracle: Some(f * e),
                ..row_from(spec, n, &r)
            }
        }
        Experiment::Loss => {
            let r = haar_ramsey_loss(&config, spec.loss_point)?;
            SweepRow {
                analytic_oracle: Some(haar_ramsey_loss_avg(n, spec.k)?),
                ..row_from(spec, n, &r)
            }
        }
        Experiment::Ghz => {
            let nf = n as f64;
            SweepRow {
                analytic_oracle: Some(nf * nf),
                ..deterministic_row(spec, n, ghz_orbit_qfi(n, std::f64::consts::FRAC_PI_4)?)
            }
        }
        Experiment::Twist => deterministic_row(spec, n, twist_scan(n, 1.0, TWIST_GRID_POINTS)?.best_qfi),
    };
    if spec.experiment.is_deterministic() {
        row.samples = 1;
    }
    Ok(row)
}

/// Depolarising suppression on the full `2^n` register.
fn noise_factor(p: f64, n: usize) -> Result<f64> {
    if n >= 63 {
        return Ok(1.0 - p);
    }
    depolarize_factor(p, 1usize << n)
}

/// Runs every row in increasing `n` and writes the output file when
/// `spec.out` is set. Nothing is written unless every row succeeds.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.n_values.len());
    for &n in &spec.n_values {
        let start = Instant::now();
        let mut row = run_row(spec, n)?;
        if spec.record_timing {
            row.wall_time_ms = start.elapsed().as_millis() as u64;
        }
        rows.push(row);
    }
    if let Some(out) = &spec.out {
        write_rows(&rows, out, spec.format)?;
    }
    Ok(rows)
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialize(e.to_string());
    w.write_record(CSV_HEADER).map_err(ser)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.n.to_string(),
            r.params.clone(),
            fmt_f64(r.mean),
            fmt_f64(r.std_error),
            r.analytic_oracle.map(fmt_f64).unwrap_or_default(),
            r.exact_oracle.map(fmt_f64).unwrap_or_default(),
            r.samples.to_string(),
            r.seed.to_string(),
            r.wall_time_ms.to_string(),
        ])
        .map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

pub fn rows_from_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("'{s}': {e}")));
    let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
    let int = |s: &str| s.parse::<u64>().map_err(|e| Error::Parse(format!("'{s}': {e}")));
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            Ok(SweepRow {
                experiment: rec[0].to_string(),
                n: int(&rec[1])? as usize,
                params: rec[2].to_string(),
                mean: num(&rec[3])?,
                std_error: num(&rec[4])?,
                analytic_oracle: opt(&rec[5])?,
                exact_oracle: opt(&rec[6])?,
                samples: int(&rec[7])? as usize,
                seed: int(&rec[8])?,
                wall_time_ms: int(&rec[9])?,
            })
        })
        .collect()
}

pub fn rows_to_json(rows: &[SweepRow]) -> Result<String> {
    serde_json::to_string_pretty(rows).map_err(|e| Error::Serialize(e.to_string()))
}

pub fn rows_from_json(text: &str) -> Result<Vec<SweepRow>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn render_rows(rows: &[SweepRow], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => rows_to_csv(rows),
        OutputFormat::Json => rows_to_json(rows).map(|s| s + "\n"),
    }
}

pub fn write_rows(rows: &[SweepRow], path: &Path, format: OutputFormat) -> Result<()> {
    fs::write(path, render_rows(rows, format)?)?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('[') {
        rows_from_json(&text)
    } else {
        rows_from_csv(&text)
    }
}

/// Least-squares slope of `log(mean)` against `log(n)` and its standard
/// error.
pub fn fit_scaling(rows: &[SweepRow]) -> Result<(f64, f64)> {
    if rows.len() < 3 {
        return Err(Error::invalid(format!(
            "a scaling fit needs at least 3 rows, got {}",
            rows.len()
        )));
    }
    if let Some(r) = rows.iter().find(|r| !(r.mean > 0.0) || r.n == 0) {
        return Err(Error::invalid(format!(
            "cannot fit nonpositive mean {} at n = {}",
            r.mean, r.n
        )));
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("a scaling fit needs distinct n values"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok((slope, (ssr / (m - 2.0) / sxx).sqrt()))
}

/// Key-value run configuration. Every key is optional; see
/// [`SweepConfig::into_spec`] for defaults.
///
/// ```toml
/// experiment = "haar_ramsey"
/// n = [10, 20, 40]
/// samples = 1000
/// seed = 7
/// ensemble = "symmetric"
/// ```
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub experiment: Option<String>,
    pub n: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub ensemble: Option<String>,
    pub axis: Option<String>,
    pub ne: Option<usize>,
    pub p: Option<f64>,
    pub k: Option<usize>,
    pub theta: Option<f64>,
    pub epsilon: Option<f64>,
    pub loss_point: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub record_timing: Option<bool>,
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overridden_by(self, flags: SweepConfig) -> SweepConfig {
        SweepConfig {
            experiment: flags.experiment.or(self.experiment),
            n: flags.n.or(self.n),
            samples: flags.samples.or(self.samples),
            seed: flags.seed.or(self.seed),
            ensemble: flags.ensemble.or(self.ensemble),
            axis: flags.axis.or(self.axis),
            ne: flags.ne.or(self.ne),
            p: flags.p.or(self.p),
            k: flags.k.or(self.k),
            theta: flags.theta.or(self.theta),
            epsilon: flags.epsilon.or(self.epsilon),
            loss_point: flags.loss_point.or(self.loss_point),
            out: flags.out.or(self.out),
            format: flags.format.or(self.format),
            record_timing: flags.record_timing.or(self.record_timing),
        }
    }

    /// `experiment` and `n` are required; the rest default as in
    /// [`SweepSpec::new`].
    pub fn into_spec(self) -> Result<SweepSpec> {
        let experiment: Experiment = self
            .experiment
            .ok_or_else(|| Error::invalid("no experiment given"))?
            .parse()?;
        let n = self.n.ok_or_else(|| Error::invalid("no n values given"))?;
        let mut spec = SweepSpec::new(experiment, n);
        if let Some(v) = self.samples {
            spec.samples = v;
        }
        if let Some(v) = self.seed {
            spec.master_seed = v;
        }
        if let Some(v) = self.ensemble {
            spec.ensemble = v.parse()?;
        }
        if let Some(v) = self.axis {
            spec.axis = v.parse()?;
        }
        if let Some(v) = self.ne {
            spec.n_e = v;
        }
        if let Some(v) = self.p {
            spec.p = v;
        }
        if let Some(v) = self.k {
            spec.k = v;
        }
        if let Some(v) = self.theta {
            spec.theta = v;
        }
        if let Some(v) = self.epsilon {
            spec.epsilon = v;
        }
        if let Some(v) = self.loss_point {
            spec.loss_point = parse_loss_point(&v)?;
        }
        spec.out = self.out;
        if let Some(v) = self.format {
            spec.format = v.parse()?;
        }
        if let Some(v) = self.record_timing {
            spec.record_timing = v;
        }
        Ok(spec)
    }
}

pub fn parse_loss_point(s: &str) -> Result<LossPoint> {
    match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "after_preparation" | "preparation" => Ok(LossPoint::AfterPreparation),
        "before_measurement" | "measurement" => Ok(LossPoint::BeforeMeasurement),
        other => Err(Error::Parse(format!("unknown loss point '{other}'"))),
    }
}
