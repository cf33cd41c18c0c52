//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration or usage problems, 3 calibration
//! failure, 4 stability guard violation. Timing goes to stderr so stdout
//! stays byte-stable for identical inputs.

use clap::{Parser, Subcommand, ValueEnum};
use spincomb::output::{
    calibration_json, decoded_json, fid_csv, result_json, save_text, spectrum_csv,
    sweep_csv, sweep_json, tune_json,
};
use spincomb::{
    build_cluster, classify_regime, ClusterSpec, ClusterSystem, Error, Experiment,
    ExperimentConfig, Result, RunResult,
};
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "spincomb",
    version,
    about = "Spectral bit processing on simulated spin clusters",
    long_about = "Writes binary words into a simulated spin cluster as \
                  multi-frequency excitation combs, reads them back from the \
                  magnitude spectrum, and applies a parallel bitwise NOT via \
                  an anti-phase erase pulse."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List the cluster's allowed spectral lines
    Transitions {
        /// Cluster description (JSON file)
        #[arg(long)]
        cluster: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        /// Write here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report which drive-strength regime a cluster is operated in
    Classify {
        /// Cluster description (JSON file)
        #[arg(long)]
        cluster: PathBuf,
        /// Drive amplitude in Hz
        #[arg(long)]
        drive_hz: f64,
        /// Guard factor separating clean bands from crossovers
        #[arg(long, default_value_t = 3.0)]
        kappa: f64,
    },
    /// Write the all-ones comb and store slot references
    Calibrate {
        /// Experiment configuration (JSON file)
        #[arg(long)]
        config: PathBuf,
        /// Also write the calibration summary here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a value and read it back
    Encode {
        #[arg(long)]
        config: PathBuf,
        /// Value to encode (decimal)
        #[arg(long)]
        value: u64,
        /// Override the configured noise seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the configured transient count
        #[arg(long)]
        transients: Option<usize>,
        /// Directory for fid.csv, spectrum.csv, decoded.json, result.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode all-ones, then erase the slots where the input has ones,
    /// leaving the bitwise complement
    Not {
        #[arg(long)]
        config: PathBuf,
        /// Input value (decimal); the run decodes its complement
        #[arg(long)]
        value: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        transients: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the drive amplitude at the strongest line and record the
    /// spectral peak per step
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        from_hz: f64,
        #[arg(long)]
        to_hz: f64,
        #[arg(long, default_value_t = 16)]
        points: usize,
        /// Space points logarithmically instead of linearly
        #[arg(long)]
        log: bool,
        /// Pulse duration per point, in milliseconds
        #[arg(long, default_value_t = 20.0)]
        duration_ms: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for the erase amplitude that best cancels a full erase
    Tune {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        lo_hz: f64,
        #[arg(long)]
        hi_hz: f64,
        #[arg(long, default_value_t = 16)]
        iterations: usize,
    },
}

/// Accepts either a bare cluster description or a full run
/// configuration, in which case its `cluster` field is used.
fn load_cluster(path: &Path) -> Result<ClusterSystem> {
    let text = std::fs::read_to_string(path)?;
    let doc: serde_json::Value = serde_json::from_str(&text)?;
    let spec: ClusterSpec = match doc.get("cluster") {
        Some(inner) => serde_json::from_value(inner.clone())?,
        None => serde_json::from_value(doc)?,
    };
    ClusterSystem::new(build_cluster(&spec)?)
}

fn load_experiment(
    path: &Path,
    seed: Option<u64>,
    transients: Option<usize>,
) -> Result<Experiment> {
    let text = std::fs::read_to_string(path)?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(n) = transients {
        config.n_transients = n;
    }
    Experiment::new(config)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => save_text(path, text),
        None => {
            println!("{}", text.trim_end_matches('\n'));
            Ok(())
        }
    }
}

fn save_run(result: &RunResult, out_dir: &Path) -> Result<()> {
    save_text(&out_dir.join("fid.csv"), &fid_csv(&result.fid, result.dwell_s))?;
    save_text(
        &out_dir.join("spectrum.csv"),
        &spectrum_csv(&result.spectrum),
    )?;
    save_text(&out_dir.join("decoded.json"), &decoded_json(result)?)?;
    save_text(&out_dir.join("result.json"), &result_json(result)?)?;
    Ok(())
}

#[derive(serde::Serialize)]
struct LineView {
    upper: usize,
    lower: usize,
    frequency_hz: f64,
    signed_frequency_hz: f64,
    weight: f64,
}

#[derive(serde::Serialize)]
struct TableView {
    n_spins: usize,
    local_frequency_scale_hz: f64,
    degenerate: bool,
    lines: Vec<LineView>,
}

fn transitions_view(sys: &ClusterSystem) -> TableView {
    TableView {
        n_spins: sys.n_spins(),
        local_frequency_scale_hz: sys.table.omega_loc / TAU,
        degenerate: sys.table.degenerate,
        lines: sys
            .table
            .entries
            .iter()
            .map(|e| LineView {
                upper: e.upper,
                lower: e.lower,
                frequency_hz: e.omega / TAU,
                signed_frequency_hz: e.signed_omega / TAU,
                weight: e.weight,
            })
            .collect(),
    }
}

fn transitions_csv(view: &TableView) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("upper,lower,frequency_hz,signed_frequency_hz,weight\n");
    for line in &view.lines {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            line.upper, line.lower, line.frequency_hz, line.signed_frequency_hz, line.weight
        );
    }
    out
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Transitions {
            cluster,
            format,
            out,
        } => {
            let sys = load_cluster(&cluster)?;
            let view = transitions_view(&sys);
            let text = match format {
                OutputFormat::Csv => transitions_csv(&view),
                OutputFormat::Json => serde_json::to_string_pretty(&view)?,
            };
            emit(&text, out.as_deref())
        }
        Command::Classify {
            cluster,
            drive_hz,
            kappa,
        } => {
            let sys = load_cluster(&cluster)?;
            let report = classify_regime(
                sys.n_spins(),
                sys.table.omega_loc,
                TAU * drive_hz,
                kappa,
            )?;
            emit(&serde_json::to_string_pretty(&report)?, None)
        }
        Command::Calibrate { config, out } => {
            let mut exp = load_experiment(&config, None, None)?;
            let calibration = exp.run_calibration()?;
            let text = calibration_json(&calibration)?;
            if let Some(path) = out.as_deref() {
                save_text(path, &text)?;
            }
            emit(&text, None)
        }
        Command::Encode {
            config,
            value,
            seed,
            transients,
            out,
        } => {
            let mut exp = load_experiment(&config, seed, transients)?;
            exp.run_calibration()?;
            let result = exp.run_encode(value)?;
            if let Some(dir) = out.as_deref() {
                save_run(&result, dir)?;
            }
            emit(&result_json(&result)?, None)
        }
        Command::Not {
            config,
            value,
            seed,
            transients,
            out,
        } => {
            let mut exp = load_experiment(&config, seed, transients)?;
            exp.run_calibration()?;
            let result = exp.run_not(value)?;
            if let Some(dir) = out.as_deref() {
                save_run(&result, dir)?;
            }
            emit(&result_json(&result)?, None)
        }
        Command::Sweep {
            config,
            from_hz,
            to_hz,
            points,
            log,
            duration_ms,
            format,
            out,
        } => {
            if points < 2 {
                return Err(Error::config("sweep needs at least 2 points"));
            }
            if from_hz.is_nan() || to_hz.is_nan() || from_hz >= to_hz {
                return Err(Error::config(format!(
                    "sweep range [{from_hz}, {to_hz}] Hz must increase"
                )));
            }
            if log && from_hz <= 0.0 {
                return Err(Error::config(
                    "logarithmic spacing needs a positive starting amplitude",
                ));
            }
            let amplitudes: Vec<f64> = (0..points)
                .map(|k| {
                    let s = k as f64 / (points - 1) as f64;
                    if log {
                        from_hz * (to_hz / from_hz).powf(s)
                    } else {
                        from_hz + s * (to_hz - from_hz)
                    }
                })
                .collect();
            let exp = load_experiment(&config, None, None)?;
            let rows = exp.run_sweep(&amplitudes, duration_ms)?;
            let text = match format {
                OutputFormat::Csv => sweep_csv(&rows),
                OutputFormat::Json => sweep_json(&rows)?,
            };
            emit(&text, out.as_deref())
        }
        Command::Tune {
            config,
            lo_hz,
            hi_hz,
            iterations,
        } => {
            let mut exp = load_experiment(&config, None, None)?;
            exp.run_calibration()?;
            let tuned = exp.tune_erase(lo_hz, hi_hz, iterations)?;
            emit(&tune_json(&tuned)?, None)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let start = std::time::Instant::now();
    let status = run(cli);
    eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    if let Err(err) = status {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
