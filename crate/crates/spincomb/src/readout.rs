//! Spectrum estimation and bit decoding.
//!
//! The acquired complex FID is zero-padded, transformed, and centered so
//! frequencies run from most negative to most positive. Each band slot owns
//! a half-open window (f_k - df/2, f_k + df/2]; a peak exactly on the
//! boundary between two slots therefore counts toward the lower slot. A bit
//! reads 1 when the peak magnitude in its window reaches a fraction of that
//! slot's calibrated reference.

use crate::codec::{slot_frequency, BandPlan, BitArray};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;

pub const DEFAULT_PAD_FACTOR: usize = 4;
pub const DEFAULT_THRESHOLD_FRACTION: f64 = 0.5;

/// Two-sided centered spectrum: frequencies ascend through zero.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub frequencies_hz: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl Spectrum {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Zero-padded centered DFT of the FID. `pad_factor` >= 1 multiplies the
/// transform length; the padded length must come out even so the grid has
/// an unambiguous center.
pub fn complex_spectrum(
    fid: &[Complex64],
    dwell: f64,
    pad_factor: usize,
) -> Result<Spectrum> {
    if fid.is_empty() {
        return Err(Error::config("cannot transform an empty signal"));
    }
    if dwell <= 0.0 || !dwell.is_finite() {
        return Err(Error::config(format!(
            "dwell time must be positive and finite, got {dwell}"
        )));
    }
    if pad_factor == 0 {
        return Err(Error::config("pad factor must be at least 1"));
    }
    let n_pad = fid.len() * pad_factor;
    if !n_pad.is_multiple_of(2) {
        return Err(Error::config(format!(
            "padded length {n_pad} is odd; use an even sample count or pad factor"
        )));
    }
    let mut buffer = Vec::with_capacity(n_pad);
    buffer.extend_from_slice(fid);
    buffer.resize(n_pad, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n_pad).process(&mut buffer);

    let df = 1.0 / (n_pad as f64 * dwell);
    let half = n_pad / 2;
    let mut frequencies_hz = Vec::with_capacity(n_pad);
    let mut values = Vec::with_capacity(n_pad);
    for j in 0..n_pad {
        frequencies_hz.push((j as f64 - half as f64) * df);
        values.push(buffer[(j + half) % n_pad]);
    }
    Ok(Spectrum {
        frequencies_hz,
        values,
    })
}

/// Peak magnitude inside each slot's half-open window (lo, hi].
pub fn slot_amplitudes(spectrum: &Spectrum, band: &BandPlan) -> Result<Vec<f64>> {
    let mags = spectrum.magnitudes();
    let half_width = band.delta_f_hz / 2.0;
    let mut amplitudes = Vec::with_capacity(band.n_bits);
    for slot in 0..band.n_bits {
        let center = slot_frequency(band, slot)?;
        let lo = center - half_width;
        let hi = center + half_width;
        let mut best: Option<f64> = None;
        for (f, m) in spectrum.frequencies_hz.iter().zip(mags.iter()) {
            if *f > lo && *f <= hi {
                best = Some(best.map_or(*m, |b: f64| b.max(*m)));
            }
        }
        match best {
            Some(b) => amplitudes.push(b),
            None => {
                return Err(Error::config(format!(
                    "slot {slot} window ({lo} Hz, {hi} Hz] contains no spectrum \
                     bins; the band lies outside the acquisition bandwidth"
                )))
            }
        }
    }
    Ok(amplitudes)
}

/// Per-slot references with a shared decision fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPolicy {
    references: Vec<f64>,
    fraction: f64,
}

impl ThresholdPolicy {
    pub fn new(references: Vec<f64>, fraction: f64) -> Result<Self> {
        if references.is_empty() {
            return Err(Error::config("threshold policy needs at least one slot"));
        }
        if references.iter().any(|r| *r <= 0.0 || !r.is_finite()) {
            return Err(Error::config(
                "every slot reference must be positive and finite",
            ));
        }
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::config(format!(
                "threshold fraction must lie strictly between 0 and 1, got {fraction}"
            )));
        }
        Ok(ThresholdPolicy {
            references,
            fraction,
        })
    }

    pub fn references(&self) -> &[f64] {
        &self.references
    }

    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    pub fn n_slots(&self) -> usize {
        self.references.len()
    }
}

/// Bit k reads 1 when its slot amplitude reaches fraction * reference_k.
pub fn decode_bits(amplitudes: &[f64], policy: &ThresholdPolicy) -> Result<BitArray> {
    if amplitudes.len() != policy.n_slots() {
        return Err(Error::config(format!(
            "got {} slot amplitudes for a policy with {} slots",
            amplitudes.len(),
            policy.n_slots()
        )));
    }
    let bits = amplitudes
        .iter()
        .zip(policy.references.iter())
        .map(|(amp, reference)| u8::from(*amp >= policy.fraction * reference))
        .collect();
    BitArray::new(bits)
}

/// Median magnitude over every bin outside all slot windows: a robust
/// noise-floor estimate that stays finite for a silent spectrum.
pub fn noise_floor_outside_slots(spectrum: &Spectrum, band: &BandPlan) -> Result<f64> {
    let half_width = band.delta_f_hz / 2.0;
    let mut windows = Vec::with_capacity(band.n_bits);
    for slot in 0..band.n_bits {
        let center = slot_frequency(band, slot)?;
        windows.push((center - half_width, center + half_width));
    }
    let mut outside: Vec<f64> = spectrum
        .frequencies_hz
        .iter()
        .zip(spectrum.values.iter())
        .filter(|(f, _)| !windows.iter().any(|(lo, hi)| **f > *lo && **f <= *hi))
        .map(|(_, v)| v.norm())
        .collect();
    if outside.is_empty() {
        return Err(Error::config(
            "every spectrum bin falls inside a slot window; no bins left to \
             estimate the noise floor",
        ));
    }
    outside.sort_by(|a, b| a.total_cmp(b));
    let mid = outside.len() / 2;
    Ok(if outside.len() % 2 == 1 {
        outside[mid]
    } else {
        0.5 * (outside[mid - 1] + outside[mid])
    })
}

/// Population standard deviation of bin magnitudes with frequency in
/// [lo_hz, hi_hz].
pub fn magnitude_std_in_band(spectrum: &Spectrum, lo_hz: f64, hi_hz: f64) -> Result<f64> {
    let values: Vec<f64> = spectrum
        .frequencies_hz
        .iter()
        .zip(spectrum.values.iter())
        .filter(|(f, _)| **f >= lo_hz && **f <= hi_hz)
        .map(|(_, v)| v.norm())
        .collect();
    if values.len() < 2 {
        return Err(Error::config(format!(
            "band [{lo_hz} Hz, {hi_hz} Hz] holds {} bins; need at least 2",
            values.len()
        )));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    Ok(var.sqrt())
}
