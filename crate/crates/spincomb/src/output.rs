//! Textual result formats: CSV for time and frequency traces, JSON for
//! structured summaries.
//!
//! Numbers are written with Rust's shortest round-trip float formatting,
//! so files are byte-stable across runs and platforms for identical
//! inputs. Decoded words are emitted as decimal strings because 64-bit
//! values exceed the integer range many JSON consumers preserve.

use crate::error::Result;
use crate::experiment::{Calibration, RunResult, SweepRow, TuneResult};
use crate::readout::Spectrum;
use crate::regime::RegimeReport;
use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// Time-domain trace: one row per sample, `t_s,re,im`.
pub fn fid_csv(fid: &[Complex64], dwell_s: f64) -> String {
    let mut out = String::with_capacity(32 * (fid.len() + 1));
    out.push_str("t_s,re,im\n");
    for (k, sample) in fid.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", k as f64 * dwell_s, sample.re, sample.im);
    }
    out
}

/// Frequency-domain trace: one row per bin, `freq_hz,magnitude`.
pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = String::with_capacity(24 * (spectrum.len() + 1));
    out.push_str("freq_hz,magnitude\n");
    for (f, v) in spectrum.frequencies_hz.iter().zip(spectrum.values.iter()) {
        let _ = writeln!(out, "{},{}", f, v.norm());
    }
    out
}

#[derive(Serialize)]
struct DecodedView<'a> {
    bits_lsb_first: &'a [u8],
    value_decimal: String,
}

/// Just the decoded word: bit list plus decimal value.
pub fn decoded_json(result: &RunResult) -> Result<String> {
    let view = DecodedView {
        bits_lsb_first: &result.decoded_bits,
        value_decimal: result.value.to_string(),
    };
    Ok(serde_json::to_string_pretty(&view)?)
}

#[derive(Serialize)]
struct ResultView<'a> {
    operation: &'a str,
    input_value_decimal: String,
    value_decimal: String,
    bits_lsb_first: &'a [u8],
    slot_amplitudes: &'a [f64],
    references: &'a [f64],
    noise_floor: f64,
    regime: &'a RegimeReport,
    seed: u64,
    config_sha256: &'a str,
}

/// Full run summary. Traces are deliberately left out; they go to the
/// CSV files.
pub fn result_json(result: &RunResult) -> Result<String> {
    let view = ResultView {
        operation: &result.operation,
        input_value_decimal: result.input_value.to_string(),
        value_decimal: result.value.to_string(),
        bits_lsb_first: &result.decoded_bits,
        slot_amplitudes: &result.slot_amplitudes,
        references: &result.references,
        noise_floor: result.noise_floor,
        regime: &result.regime,
        seed: result.seed,
        config_sha256: &result.config_sha256,
    };
    Ok(serde_json::to_string_pretty(&view)?)
}

pub fn calibration_json(calibration: &Calibration) -> Result<String> {
    Ok(serde_json::to_string_pretty(calibration)?)
}

pub fn tune_json(tune: &TuneResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(tune)?)
}

/// Sweep table: `drive_hz,regime,peak_frequency_hz,peak_magnitude`.
/// The regime column is quoted because crossover labels contain a comma.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("drive_hz,regime,peak_frequency_hz,peak_magnitude\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},\"{}\",{},{}",
            row.drive_hz, row.regime, row.peak_frequency_hz, row.peak_magnitude
        );
    }
    out
}

pub fn sweep_json(rows: &[SweepRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)?)
}

/// Write text to a file, creating parent directories as needed.
pub fn save_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, content)?;
    Ok(())
}
