//! End-to-end runs: calibration, integer encoding, and the parallel
//! bitwise-NOT sequence, with reproducible noisy transient averaging.
//!
//! One `Experiment` owns a cluster, a band plan mapping bits to comb slots,
//! pulse settings, and acquisition parameters. Calibration writes the
//! all-ones comb, measures every slot's peak, and stores those peaks as the
//! decoding references; later runs decode a slot as 1 when its peak reaches
//! a configured fraction of the stored reference.
//!
//! The NOT sequence plays two segments back to back on one phase-coherent
//! clock: the all-ones write comb, then an erase comb holding a tooth at
//! every slot where the input has a 1, each tooth phase-flipped by pi and
//! scaled so that erase amplitude x erase duration matches the write pulse.
//! Per transition the two rotations share an axis and unwind exactly,
//! leaving peaks only where the input had 0s.

use crate::cluster::{build_cluster, ClusterSpec};
use crate::codec::{bits_to_int, int_to_bits, slot_frequency, BandPlan, BitArray};
use crate::error::{Error, Result};
use crate::propagate::{
    acquire_fid, evolve_pulse, thermal_state, DeviationState, PropagationMethod,
    PropagationParams,
};
use crate::pulse::{anti_phase, comb_from_bits, PulseSegment};
use crate::readout::{
    complex_spectrum, decode_bits, noise_floor_outside_slots, slot_amplitudes, Spectrum,
    ThresholdPolicy, DEFAULT_PAD_FACTOR, DEFAULT_THRESHOLD_FRACTION,
};
use crate::regime::{classify_regime, RegimeReport, DEFAULT_KAPPA};
use crate::system::ClusterSystem;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::TAU;

/// How many noise-floor multiples a calibration peak must clear.
pub const CALIBRATION_FLOOR_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PulseSettings {
    pub write_amplitude_hz: f64,
    pub write_duration_ms: f64,
    pub erase_amplitude_hz: f64,
    pub erase_duration_ms: f64,
    #[serde(default)]
    pub base_phase_deg: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AcquisitionSettings {
    pub n_samples: usize,
    pub dwell_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReadoutSettings {
    #[serde(default = "default_pad_factor")]
    pub pad_factor: usize,
    #[serde(default = "default_threshold_fraction")]
    pub threshold_fraction: f64,
}

fn default_pad_factor() -> usize {
    DEFAULT_PAD_FACTOR
}

fn default_threshold_fraction() -> f64 {
    DEFAULT_THRESHOLD_FRACTION
}

impl Default for ReadoutSettings {
    fn default() -> Self {
        ReadoutSettings {
            pad_factor: default_pad_factor(),
            threshold_fraction: default_threshold_fraction(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct NoiseSettings {
    /// Standard deviation of the additive complex Gaussian noise applied
    /// independently to the real and imaginary part of each FID sample.
    #[serde(default)]
    pub sigma: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PropagationSettings {
    #[serde(default)]
    pub method: PropagationMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_s: Option<f64>,
}

impl PropagationSettings {
    pub fn params(&self) -> PropagationParams {
        PropagationParams {
            dt: self.dt_s,
            method: self.method,
        }
    }
}

fn default_n_transients() -> usize {
    1
}

fn default_kappa() -> f64 {
    DEFAULT_KAPPA
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub cluster: ClusterSpec,
    pub band: BandPlan,
    pub pulses: PulseSettings,
    pub acquisition: AcquisitionSettings,
    #[serde(default)]
    pub readout: ReadoutSettings,
    #[serde(default)]
    pub noise: NoiseSettings,
    #[serde(default = "default_n_transients")]
    pub n_transients: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub propagation: PropagationSettings,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// SHA-256 of the serialized configuration; field order is fixed by
    /// the struct definitions, so equal configs hash equally.
    pub fn hash(&self) -> Result<String> {
        let bytes = serde_json::to_vec(self)?;
        let digest = Sha256::digest(&bytes);
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}

/// Stateless seed derivation for transient i: a SplitMix64 scramble of the
/// base seed and index, so any transient can be generated independently of
/// the others (and in parallel) while staying reproducible.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mean of `n_transients` noisy copies of the clean FID. Per transient,
/// each sample gets independent Gaussian noise on its real then imaginary
/// part, drawn from a ChaCha stream seeded by [`mix_seed`]. Transients are
/// generated in parallel but summed in index order, so the result is
/// bit-for-bit reproducible regardless of thread scheduling. With
/// sigma = 0 the clean FID is returned unchanged.
pub fn average_noisy_transients(
    clean: &[Complex64],
    sigma: f64,
    n_transients: usize,
    seed: u64,
) -> Result<Vec<Complex64>> {
    if n_transients == 0 {
        return Err(Error::config("need at least one transient"));
    }
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(Error::config(format!(
            "noise sigma must be non-negative and finite, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(clean.to_vec());
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::config(format!("invalid noise distribution: {e}")))?;
    let transients: Vec<Vec<Complex64>> = (0..n_transients as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, i));
            clean
                .iter()
                .map(|s| {
                    let re: f64 = normal.sample(&mut rng);
                    let im: f64 = normal.sample(&mut rng);
                    s + Complex64::new(re, im)
                })
                .collect()
        })
        .collect();
    let mut mean = vec![Complex64::new(0.0, 0.0); clean.len()];
    for transient in &transients {
        for (m, s) in mean.iter_mut().zip(transient.iter()) {
            *m += s;
        }
    }
    let inv = 1.0 / n_transients as f64;
    for m in &mut mean {
        *m *= inv;
    }
    Ok(mean)
}

#[derive(Debug, Clone, Serialize)]
pub struct Calibration {
    pub slot_frequencies_hz: Vec<f64>,
    pub references: Vec<f64>,
    pub noise_floor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub operation: String,
    pub input_value: u64,
    pub value: u64,
    pub decoded_bits: Vec<u8>,
    pub slot_amplitudes: Vec<f64>,
    pub references: Vec<f64>,
    pub noise_floor: f64,
    pub regime: RegimeReport,
    pub seed: u64,
    pub config_sha256: String,
    #[serde(skip)]
    pub fid: Vec<Complex64>,
    #[serde(skip)]
    pub spectrum: Spectrum,
    #[serde(skip)]
    pub dwell_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub drive_hz: f64,
    pub regime: crate::regime::RegimeLabel,
    pub peak_frequency_hz: f64,
    pub peak_magnitude: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TuneResult {
    pub erase_amplitude_hz: f64,
    /// Worst erased-slot amplitude relative to its calibration reference.
    pub residual_fraction: f64,
    pub iterations: usize,
}

pub struct Experiment {
    config: ExperimentConfig,
    sys: ClusterSystem,
    references: Option<Vec<f64>>,
    noise_floor: Option<f64>,
    config_hash: String,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.band.validate()?;
        let acq = &config.acquisition;
        if acq.n_samples < 2 {
            return Err(Error::config(format!(
                "need at least 2 acquisition samples, got {}",
                acq.n_samples
            )));
        }
        if acq.dwell_s <= 0.0 || !acq.dwell_s.is_finite() {
            return Err(Error::config(format!(
                "dwell time must be positive and finite, got {}",
                acq.dwell_s
            )));
        }
        let nyquist = 0.5 / acq.dwell_s;
        for slot in 0..config.band.n_bits {
            let f = slot_frequency(&config.band, slot)?;
            let hi = f + config.band.delta_f_hz / 2.0;
            let lo = f - config.band.delta_f_hz / 2.0;
            if hi > nyquist || lo < -nyquist {
                return Err(Error::config(format!(
                    "slot {slot} window ({lo} Hz, {hi} Hz] exceeds the \
                     acquisition bandwidth of +/-{nyquist} Hz; shorten the \
                     dwell time or move the band"
                )));
            }
        }
        let p = &config.pulses;
        for (name, v) in [
            ("write_amplitude_hz", p.write_amplitude_hz),
            ("erase_amplitude_hz", p.erase_amplitude_hz),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::config(format!(
                    "{name} must be non-negative and finite, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("write_duration_ms", p.write_duration_ms),
            ("erase_duration_ms", p.erase_duration_ms),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::config(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if config.n_transients == 0 {
            return Err(Error::config("n_transients must be at least 1"));
        }
        if config.noise.sigma < 0.0 || !config.noise.sigma.is_finite() {
            return Err(Error::config("noise sigma must be non-negative and finite"));
        }
        if config.readout.pad_factor == 0 {
            return Err(Error::config("pad factor must be at least 1"));
        }
        let f = config.readout.threshold_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::config(format!(
                "threshold fraction must lie strictly between 0 and 1, got {f}"
            )));
        }
        if config.kappa <= 1.0 || !config.kappa.is_finite() {
            return Err(Error::config(format!(
                "guard factor kappa must exceed 1, got {}",
                config.kappa
            )));
        }
        let cluster = build_cluster(&config.cluster)?;
        let sys = ClusterSystem::new(cluster)?;
        let config_hash = config.hash()?;
        Ok(Experiment {
            config,
            sys,
            references: None,
            noise_floor: None,
            config_hash,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn system(&self) -> &ClusterSystem {
        &self.sys
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    pub fn references(&self) -> Option<&[f64]> {
        self.references.as_deref()
    }

    fn word_width(&self) -> usize {
        self.config.band.n_bits
    }

    fn base_phase_rad(&self) -> f64 {
        self.config.pulses.base_phase_deg.to_radians()
    }

    fn write_segment(&self, bits: &BitArray) -> Result<PulseSegment> {
        comb_from_bits(
            bits,
            &self.config.band,
            TAU * self.config.pulses.write_amplitude_hz,
            self.config.pulses.write_duration_ms * 1e-3,
            self.base_phase_rad(),
        )
    }

    fn erase_segment(&self, bits: &BitArray, amplitude_hz: f64) -> Result<PulseSegment> {
        let comb = comb_from_bits(
            bits,
            &self.config.band,
            TAU * amplitude_hz,
            self.config.pulses.erase_duration_ms * 1e-3,
            self.base_phase_rad(),
        )?;
        Ok(anti_phase(&comb))
    }

    fn acquire_clean(&self, state: &DeviationState) -> Result<Vec<Complex64>> {
        acquire_fid(
            state,
            &self.sys,
            self.config.acquisition.n_samples,
            self.config.acquisition.dwell_s,
        )
    }

    fn acquire_averaged(&self, state: &DeviationState) -> Result<Vec<Complex64>> {
        let clean = self.acquire_clean(state)?;
        average_noisy_transients(
            &clean,
            self.config.noise.sigma,
            self.config.n_transients,
            self.config.seed,
        )
    }

    fn analyze(&self, fid: &[Complex64]) -> Result<(Spectrum, Vec<f64>)> {
        let spectrum = complex_spectrum(
            fid,
            self.config.acquisition.dwell_s,
            self.config.readout.pad_factor,
        )?;
        let amps = slot_amplitudes(&spectrum, &self.config.band)?;
        Ok((spectrum, amps))
    }

    /// Writes the all-ones comb and stores each slot's peak as its
    /// decoding reference. Fails when any slot peak does not clear
    /// [`CALIBRATION_FLOOR_FACTOR`] times the out-of-window noise floor.
    pub fn run_calibration(&mut self) -> Result<Calibration> {
        let all_ones = BitArray::all_ones(self.word_width())?;
        let segment = self.write_segment(&all_ones)?;
        let state = evolve_pulse(
            &thermal_state(&self.sys),
            &self.sys,
            &segment,
            &self.config.propagation.params(),
        )?;
        let fid = self.acquire_averaged(&state)?;
        let (spectrum, amps) = self.analyze(&fid)?;
        let floor = noise_floor_outside_slots(&spectrum, &self.config.band)?;
        let weak: Vec<String> = amps
            .iter()
            .enumerate()
            .filter(|(_, a)| **a <= CALIBRATION_FLOOR_FACTOR * floor || **a <= 0.0)
            .map(|(k, a)| format!("slot {k}: peak {a:.3e} vs floor {floor:.3e}"))
            .collect();
        if !weak.is_empty() {
            return Err(Error::Calibration(format!(
                "{} of {} slots did not clear {CALIBRATION_FLOOR_FACTOR}x the \
                 noise floor: {}",
                weak.len(),
                amps.len(),
                weak.join("; ")
            )));
        }
        self.references = Some(amps.clone());
        self.noise_floor = Some(floor);
        Ok(Calibration {
            slot_frequencies_hz: self.config.band.frequencies_hz(),
            references: amps,
            noise_floor: floor,
        })
    }

    fn policy(&self) -> Result<ThresholdPolicy> {
        let references = self.references.clone().ok_or_else(|| {
            Error::config("no calibration references stored; run calibration first")
        })?;
        ThresholdPolicy::new(references, self.config.readout.threshold_fraction)
    }

    fn finish_run(
        &self,
        operation: &str,
        input_value: u64,
        state: &DeviationState,
        drive_hz: f64,
    ) -> Result<RunResult> {
        let policy = self.policy()?;
        let fid = self.acquire_averaged(state)?;
        let (spectrum, amps) = self.analyze(&fid)?;
        let decoded = decode_bits(&amps, &policy)?;
        let value = bits_to_int(&decoded);
        let regime = classify_regime(
            self.sys.n_spins(),
            self.sys.table.omega_loc,
            TAU * drive_hz,
            self.config.kappa,
        )?;
        Ok(RunResult {
            operation: operation.to_string(),
            input_value,
            value,
            decoded_bits: decoded.as_slice().to_vec(),
            slot_amplitudes: amps,
            references: policy.references().to_vec(),
            noise_floor: self.noise_floor.unwrap_or(0.0),
            regime,
            seed: self.config.seed,
            config_sha256: self.config_hash.clone(),
            fid,
            spectrum,
            dwell_s: self.config.acquisition.dwell_s,
        })
    }

    /// Writes the comb for `x` and reads it back.
    pub fn run_encode(&self, x: u64) -> Result<RunResult> {
        let bits = int_to_bits(x, self.word_width())?;
        let segment = self.write_segment(&bits)?;
        let state = evolve_pulse(
            &thermal_state(&self.sys),
            &self.sys,
            &segment,
            &self.config.propagation.params(),
        )?;
        self.finish_run("encode", x, &state, self.config.pulses.write_amplitude_hz)
    }

    /// Plays write-all-ones then the anti-phase erase comb for `x`; the
    /// decoded word is the bitwise complement of `x`.
    pub fn run_not(&self, x: u64) -> Result<RunResult> {
        self.run_not_with_amplitude(x, self.config.pulses.erase_amplitude_hz)
    }

    fn not_final_state(&self, x: u64, erase_amplitude_hz: f64) -> Result<DeviationState> {
        let width = self.word_width();
        let all_ones = BitArray::all_ones(width)?;
        let bits = int_to_bits(x, width)?;
        let params = self.config.propagation.params();
        let written = evolve_pulse(
            &thermal_state(&self.sys),
            &self.sys,
            &self.write_segment(&all_ones)?,
            &params,
        )?;
        if bits.ones() == 0 {
            // nothing to erase; the write already encodes the complement
            return Ok(written);
        }
        evolve_pulse(
            &written,
            &self.sys,
            &self.erase_segment(&bits, erase_amplitude_hz)?,
            &params,
        )
    }

    fn run_not_with_amplitude(&self, x: u64, erase_amplitude_hz: f64) -> Result<RunResult> {
        let state = self.not_final_state(x, erase_amplitude_hz)?;
        self.finish_run("not", x, &state, self.config.pulses.write_amplitude_hz)
    }

    /// Single-tooth drive-strength sweep at the strongest transition line.
    /// Each row records the noise-free spectral peak and the regime the
    /// drive falls in.
    pub fn run_sweep(&self, amplitudes_hz: &[f64], duration_ms: f64) -> Result<Vec<SweepRow>> {
        if amplitudes_hz.is_empty() {
            return Err(Error::config("sweep needs at least one amplitude"));
        }
        let strongest = self
            .sys
            .table
            .strongest()
            .ok_or_else(|| Error::config("transition table is empty; nothing to drive"))?;
        let offset = strongest.omega;
        let duration = duration_ms * 1e-3;
        let mut rows = Vec::with_capacity(amplitudes_hz.len());
        for &amp_hz in amplitudes_hz {
            if amp_hz < 0.0 || !amp_hz.is_finite() {
                return Err(Error::config(format!(
                    "sweep amplitude must be non-negative and finite, got {amp_hz}"
                )));
            }
            let segment = PulseSegment::new(
                duration,
                vec![crate::pulse::Harmonic::new(
                    offset,
                    TAU * amp_hz,
                    self.base_phase_rad(),
                )?],
            )?;
            let state = evolve_pulse(
                &thermal_state(&self.sys),
                &self.sys,
                &segment,
                &self.config.propagation.params(),
            )?;
            let fid = self.acquire_clean(&state)?;
            let spectrum = complex_spectrum(
                &fid,
                self.config.acquisition.dwell_s,
                self.config.readout.pad_factor,
            )?;
            let mags = spectrum.magnitudes();
            let (idx, peak) = mags
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .expect("spectrum is never empty");
            let regime = classify_regime(
                self.sys.n_spins(),
                self.sys.table.omega_loc,
                TAU * amp_hz,
                self.config.kappa,
            )?;
            rows.push(SweepRow {
                drive_hz: amp_hz,
                regime: regime.regime,
                peak_frequency_hz: spectrum.frequencies_hz[idx],
                peak_magnitude: *peak,
            });
        }
        Ok(rows)
    }

    /// Worst residual over all slots after erasing the all-ones word with
    /// the given amplitude, as a fraction of each slot's reference.
    fn erase_residual(&self, amplitude_hz: f64, references: &[f64]) -> Result<f64> {
        let width = self.word_width();
        let all_set = (1u128 << width) - 1;
        let state = self.not_final_state(all_set as u64, amplitude_hz)?;
        let fid = self.acquire_clean(&state)?;
        let (_, amps) = self.analyze(&fid)?;
        Ok(amps
            .iter()
            .zip(references.iter())
            .map(|(a, r)| a / r)
            .fold(0.0f64, f64::max))
    }

    /// Ternary search for the erase amplitude that best cancels a full
    /// erase, judged by the worst slot residual on noise-free readout.
    pub fn tune_erase(
        &self,
        lo_hz: f64,
        hi_hz: f64,
        iterations: usize,
    ) -> Result<TuneResult> {
        if !lo_hz.is_finite() || !hi_hz.is_finite() || lo_hz < 0.0 || hi_hz <= lo_hz {
            return Err(Error::config(format!(
                "tuning range [{lo_hz}, {hi_hz}] Hz is not an increasing \
                 non-negative interval"
            )));
        }
        if iterations == 0 {
            return Err(Error::config("need at least one tuning iteration"));
        }
        let references = self.references.clone().ok_or_else(|| {
            Error::config("no calibration references stored; run calibration first")
        })?;
        let (mut lo, mut hi) = (lo_hz, hi_hz);
        let mut best = (f64::INFINITY, f64::NAN);
        for _ in 0..iterations {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            let r1 = self.erase_residual(m1, &references)?;
            let r2 = self.erase_residual(m2, &references)?;
            if r1 < best.0 {
                best = (r1, m1);
            }
            if r2 < best.0 {
                best = (r2, m2);
            }
            if r1 <= r2 {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        Ok(TuneResult {
            erase_amplitude_hz: best.1,
            residual_fraction: best.0,
            iterations,
        })
    }
}
