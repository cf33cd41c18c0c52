//! Excitation combs: sums of weak cosine harmonics under rectangular
//! envelopes.
//!
//! Harmonic phases are referenced to one phase-coherent time origin, the
//! start of the pulse program (t = 0). A segment played later in a program
//! keeps the carrier phase it would have had running continuously, which is
//! what makes "anti-phase" meaningful across segments: flipping every phase
//! by pi negates the segment's field relative to that common carrier.

use crate::codec::{slot_frequency, BandPlan, BitArray};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// One cosine component: amplitude * cos(offset * t + phase), t absolute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    /// Offset from the carrier (rad/s).
    pub offset: f64,
    /// Field amplitude (rad/s), non-negative.
    pub amplitude: f64,
    /// Phase (rad), kept normalized in [0, 2*pi).
    pub phase: f64,
}

impl Harmonic {
    pub fn new(offset: f64, amplitude: f64, phase: f64) -> Result<Self> {
        if !offset.is_finite() || !amplitude.is_finite() || !phase.is_finite() {
            return Err(Error::config("harmonic parameters must be finite"));
        }
        if amplitude < 0.0 {
            return Err(Error::config(format!(
                "harmonic amplitude must be non-negative, got {amplitude}"
            )));
        }
        Ok(Harmonic {
            offset,
            amplitude,
            phase: phase.rem_euclid(TAU),
        })
    }
}

/// A rectangular-envelope multi-frequency segment.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSegment {
    /// Envelope length (s), strictly positive.
    pub duration: f64,
    pub harmonics: Vec<Harmonic>,
}

impl PulseSegment {
    pub fn new(duration: f64, harmonics: Vec<Harmonic>) -> Result<Self> {
        if duration <= 0.0 || !duration.is_finite() {
            return Err(Error::config(format!(
                "segment duration must be positive and finite, got {duration}"
            )));
        }
        let max_offset = harmonics
            .iter()
            .map(|h| h.offset.abs())
            .fold(0.0, f64::max);
        let tol = 1e-9 * max_offset.max(1.0);
        for (a, ha) in harmonics.iter().enumerate() {
            for hb in harmonics.iter().skip(a + 1) {
                if (ha.offset - hb.offset).abs() <= tol {
                    return Err(Error::config(format!(
                        "harmonic offsets must be pairwise distinct, {} collides with {}",
                        ha.offset, hb.offset
                    )));
                }
            }
        }
        Ok(PulseSegment {
            duration,
            harmonics,
        })
    }

    /// Total field at local time t since the segment began, for a segment
    /// that starts at the program origin. Zero outside [0, duration).
    pub fn drive_amplitude(&self, t: f64) -> f64 {
        self.drive_amplitude_offset(t, 0.0)
    }

    /// Total field at local time t for a segment that begins at absolute
    /// time t_start; cosine arguments use the absolute time t_start + t so
    /// carrier phase is continuous across a program.
    pub fn drive_amplitude_offset(&self, t: f64, t_start: f64) -> f64 {
        if !(0.0..self.duration).contains(&t) {
            return 0.0;
        }
        let t_abs = t_start + t;
        self.harmonics
            .iter()
            .map(|h| h.amplitude * (h.offset * t_abs + h.phase).cos())
            .sum()
    }

    /// Worst-case field magnitude, the sum of harmonic amplitudes.
    pub fn amplitude_sup(&self) -> f64 {
        self.harmonics.iter().map(|h| h.amplitude).sum()
    }

    pub fn max_abs_offset(&self) -> f64 {
        self.harmonics
            .iter()
            .map(|h| h.offset.abs())
            .fold(0.0, f64::max)
    }

    pub fn max_amplitude(&self) -> f64 {
        self.harmonics
            .iter()
            .map(|h| h.amplitude)
            .fold(0.0, f64::max)
    }
}

/// Flips every harmonic by pi: the exact negation of the segment's field.
pub fn anti_phase(segment: &PulseSegment) -> PulseSegment {
    PulseSegment {
        duration: segment.duration,
        harmonics: segment
            .harmonics
            .iter()
            .map(|h| Harmonic {
                offset: h.offset,
                amplitude: h.amplitude,
                phase: (h.phase + PI).rem_euclid(TAU),
            })
            .collect(),
    }
}

/// One harmonic per set bit, at that bit's slot frequency; amplitude
/// (rad/s) and base phase are shared across the comb.
pub fn comb_from_bits(
    bits: &BitArray,
    band: &BandPlan,
    amplitude: f64,
    duration: f64,
    base_phase: f64,
) -> Result<PulseSegment> {
    if bits.len() != band.n_bits {
        return Err(Error::config(format!(
            "bit pattern is {} wide but the band carries {} slots",
            bits.len(),
            band.n_bits
        )));
    }
    let mut harmonics = Vec::with_capacity(bits.ones());
    for k in 0..bits.len() {
        if bits.get(k) == 1 {
            let slot = band.slot_for_bit(k)?;
            let f_hz = slot_frequency(band, slot)?;
            harmonics.push(Harmonic::new(TAU * f_hz, amplitude, base_phase)?);
        }
    }
    PulseSegment::new(duration, harmonics)
}

/// Ordered pulse segments played back to back.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseProgram {
    segments: Vec<PulseSegment>,
}

impl PulseProgram {
    pub fn new(segments: Vec<PulseSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::config("pulse program must hold at least one segment"));
        }
        Ok(PulseProgram { segments })
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Absolute start time of segment i within the program.
    pub fn start_of(&self, i: usize) -> f64 {
        self.segments[..i].iter().map(|s| s.duration).sum()
    }
}

// Interchange schema: durations in ms, offsets and amplitudes in Hz,
// phases in degrees.

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProgramFile {
    pub segments: Vec<SegmentFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentFile {
    pub duration_ms: f64,
    pub harmonics: Vec<HarmonicFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicFile {
    pub offset_hz: f64,
    pub amplitude_hz: f64,
    pub phase_deg: f64,
}

impl ProgramFile {
    pub fn to_program(&self) -> Result<PulseProgram> {
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let harmonics = s
                    .harmonics
                    .iter()
                    .map(|h| {
                        Harmonic::new(
                            h.offset_hz * TAU,
                            h.amplitude_hz * TAU,
                            h.phase_deg.to_radians(),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                PulseSegment::new(s.duration_ms * 1e-3, harmonics)
            })
            .collect::<Result<Vec<_>>>()?;
        PulseProgram::new(segments)
    }

    pub fn from_program(program: &PulseProgram) -> Self {
        ProgramFile {
            segments: program
                .segments()
                .iter()
                .map(|s| SegmentFile {
                    duration_ms: s.duration * 1e3,
                    harmonics: s
                        .harmonics
                        .iter()
                        .map(|h| HarmonicFile {
                            offset_hz: h.offset / TAU,
                            amplitude_hz: h.amplitude / TAU,
                            phase_deg: h.phase.to_degrees(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::int_to_bits;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dc_harmonic_at_time_zero_gives_its_amplitude() {
        let seg = PulseSegment::new(1.0, vec![Harmonic::new(0.0, 3.5, 0.0).unwrap()]).unwrap();
        assert_abs_diff_eq!(seg.drive_amplitude(0.0), 3.5, epsilon = 0.0);
    }

    #[test]
    fn drive_vanishes_outside_the_envelope() {
        let seg = PulseSegment::new(0.5, vec![Harmonic::new(10.0, 1.0, 0.0).unwrap()]).unwrap();
        assert_eq!(seg.drive_amplitude(0.5 + 1e-3), 0.0);
        assert_eq!(seg.drive_amplitude(-1e-9), 0.0);
        assert_eq!(seg.drive_amplitude(0.5), 0.0);
    }

    #[test]
    fn anti_phase_rotates_quarter_to_three_quarters() {
        let seg =
            PulseSegment::new(1.0, vec![Harmonic::new(5.0, 1.0, PI / 2.0).unwrap()]).unwrap();
        let flipped = anti_phase(&seg);
        assert_abs_diff_eq!(flipped.harmonics[0].phase, 3.0 * PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn comb_for_five_creates_slots_zero_and_two() {
        let band = BandPlan::new(100.0, 50.0, 3).unwrap();
        let bits = int_to_bits(5, 3).unwrap();
        let comb = comb_from_bits(&bits, &band, 2.0, 0.05, 0.0).unwrap();
        assert_eq!(comb.harmonics.len(), 2);
        assert_abs_diff_eq!(comb.harmonics[0].offset, TAU * 100.0, epsilon = 1e-12);
        assert_abs_diff_eq!(comb.harmonics[1].offset, TAU * 200.0, epsilon = 1e-12);
    }

    #[test]
    fn comb_respects_band_reversal() {
        let mut band = BandPlan::new(100.0, 50.0, 3).unwrap();
        band.reversed = true;
        let bits = int_to_bits(1, 3).unwrap();
        let comb = comb_from_bits(&bits, &band, 2.0, 0.05, 0.0).unwrap();
        assert_eq!(comb.harmonics.len(), 1);
        assert_abs_diff_eq!(comb.harmonics[0].offset, TAU * 200.0, epsilon = 1e-12);
    }

    #[test]
    fn comb_harmonic_count_follows_popcount() {
        let band = BandPlan::new(0.0, 10.0, 8).unwrap();
        for x in [0u64, 1, 5, 178, 255] {
            let bits = int_to_bits(x, 8).unwrap();
            if x == 0 {
                // empty comb still forms a valid (silent) segment
                let comb = comb_from_bits(&bits, &band, 1.0, 0.01, 0.0).unwrap();
                assert!(comb.harmonics.is_empty());
            } else {
                let comb = comb_from_bits(&bits, &band, 1.0, 0.01, 0.0).unwrap();
                assert_eq!(comb.harmonics.len(), x.count_ones() as usize);
            }
        }
    }

    #[test]
    fn duplicate_offsets_are_rejected() {
        let h = Harmonic::new(10.0, 1.0, 0.0).unwrap();
        assert!(PulseSegment::new(1.0, vec![h, h]).is_err());
    }

    #[test]
    fn degenerate_durations_are_rejected() {
        assert!(PulseSegment::new(0.0, vec![]).is_err());
        assert!(PulseSegment::new(-1.0, vec![]).is_err());
        assert!(PulseSegment::new(f64::NAN, vec![]).is_err());
    }

    #[test]
    fn negative_amplitude_is_rejected() {
        assert!(Harmonic::new(0.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn phases_normalize_into_one_turn() {
        let h = Harmonic::new(0.0, 1.0, -PI).unwrap();
        assert!((0.0..TAU).contains(&h.phase));
        assert_abs_diff_eq!(h.phase, PI, epsilon = 1e-15);
        let h2 = Harmonic::new(0.0, 1.0, 7.0 * PI).unwrap();
        assert_abs_diff_eq!(h2.phase, PI, epsilon = 1e-12);
    }

    #[test]
    fn program_tracks_cumulative_starts() {
        let a = PulseSegment::new(0.05, vec![]).unwrap();
        let b = PulseSegment::new(0.01, vec![]).unwrap();
        let p = PulseProgram::new(vec![a, b]).unwrap();
        assert_abs_diff_eq!(p.total_duration(), 0.06, epsilon = 1e-15);
        assert_abs_diff_eq!(p.start_of(0), 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(p.start_of(1), 0.05, epsilon = 1e-15);
        assert!(PulseProgram::new(vec![]).is_err());
    }

    #[test]
    fn file_schema_roundtrips_with_unit_conversions() {
        let json = r#"{
            "segments": [{
                "duration_ms": 50.0,
                "harmonics": [
                    { "offset_hz": 150.0, "amplitude_hz": 2.0, "phase_deg": 90.0 }
                ]
            }]
        }"#;
        let file: ProgramFile = serde_json::from_str(json).unwrap();
        let program = file.to_program().unwrap();
        let seg = &program.segments()[0];
        assert_abs_diff_eq!(seg.duration, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(seg.harmonics[0].offset, TAU * 150.0, epsilon = 1e-12);
        assert_abs_diff_eq!(seg.harmonics[0].amplitude, TAU * 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(seg.harmonics[0].phase, PI / 2.0, epsilon = 1e-12);
        let back = ProgramFile::from_program(&program);
        assert_abs_diff_eq!(back.segments[0].duration_ms, 50.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            back.segments[0].harmonics[0].phase_deg,
            90.0,
            epsilon = 1e-12
        );
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn anti_phase_is_an_involution(
                offset in -1e4f64..1e4,
                amplitude in 0.0f64..1e3,
                phase in -10.0f64..10.0,
            ) {
                let seg = PulseSegment::new(
                    1.0,
                    vec![Harmonic::new(offset, amplitude, phase).unwrap()],
                ).unwrap();
                let twice = anti_phase(&anti_phase(&seg));
                prop_assert!((twice.harmonics[0].phase - seg.harmonics[0].phase).abs() < 1e-12);
            }

            #[test]
            fn anti_phase_cancels_the_field(
                offset in -1e4f64..1e4,
                amplitude in 0.0f64..1e3,
                phase in -10.0f64..10.0,
                t in 0.0f64..1.0,
            ) {
                let seg = PulseSegment::new(
                    1.0,
                    vec![Harmonic::new(offset, amplitude, phase).unwrap()],
                ).unwrap();
                let flipped = anti_phase(&seg);
                let total = seg.drive_amplitude(t) + flipped.drive_amplitude(t);
                // the two cosine arguments differ by exactly pi only up to
                // rounding of (offset*t + phase), so the cancellation bound
                // must scale with the argument magnitude
                let arg_scale = offset.abs() * t + std::f64::consts::TAU;
                let tolerance =
                    (32.0 * f64::EPSILON * arg_scale * amplitude.max(1.0)).max(1e-13);
                prop_assert!(
                    total.abs() <= tolerance,
                    "residual {} vs tolerance {tolerance}",
                    total.abs()
                );
            }
        }
    }
}
