//! Bit-array and band-plan arithmetic.
//!
//! Integers are carried as LSB-first bit arrays of width M <= 64 and all
//! conversions are exact integer arithmetic; no floating point enters the
//! codec layer. Slot frequencies live in Hz here; conversion to rad/s
//! happens where a drive is assembled.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const MAX_BITS: usize = 64;

/// LSB-first array of bits; element k is the 2^k digit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitArray(Vec<u8>);

impl BitArray {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.len() > MAX_BITS {
            return Err(Error::config(format!(
                "bit array of width {} exceeds the {MAX_BITS}-bit limit",
                bits.len()
            )));
        }
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::config(format!("bit value {bad} is not 0 or 1")));
        }
        Ok(BitArray(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> u8 {
        self.0[k]
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// All-ones pattern of width m (the calibration word).
    pub fn all_ones(m: usize) -> Result<Self> {
        BitArray::new(vec![1; m])
    }
}

/// Converts x to an LSB-first bit array of exactly m bits.
pub fn int_to_bits(x: u64, m: usize) -> Result<BitArray> {
    if m > MAX_BITS {
        return Err(Error::config(format!(
            "width {m} exceeds the {MAX_BITS}-bit limit"
        )));
    }
    if m < MAX_BITS && x >= (1u64 << m) {
        return Err(Error::config(format!("value {x} does not fit in {m} bits")));
    }
    Ok(BitArray((0..m).map(|k| ((x >> k) & 1) as u8).collect()))
}

/// Folds an LSB-first bit array back into an integer. Empty input is 0.
pub fn bits_to_int(bits: &BitArray) -> u64 {
    bits.0
        .iter()
        .enumerate()
        .fold(0u64, |acc, (k, &b)| acc | ((b as u64) << k))
}

/// Exact expected output of the parallel NOT: 2^m - 1 - x.
pub fn bitwise_not_oracle(x: u64, m: usize) -> Result<u64> {
    let ceiling = if m == MAX_BITS {
        u64::MAX
    } else if m < MAX_BITS {
        (1u64 << m) - 1
    } else {
        return Err(Error::config(format!(
            "width {m} exceeds the {MAX_BITS}-bit limit"
        )));
    };
    if x > ceiling {
        return Err(Error::config(format!("value {x} does not fit in {m} bits")));
    }
    Ok(ceiling - x)
}

/// Uniform frequency grid assigning one spectral slot per bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPlan {
    pub f_start_hz: f64,
    pub delta_f_hz: f64,
    pub n_bits: usize,
    /// When set, bit 0 maps to the highest-frequency slot instead of the lowest.
    #[serde(default)]
    pub reversed: bool,
}

impl BandPlan {
    pub fn new(f_start_hz: f64, delta_f_hz: f64, n_bits: usize) -> Result<Self> {
        let plan = BandPlan {
            f_start_hz,
            delta_f_hz,
            n_bits,
            reversed: false,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta_f_hz <= 0.0 || !self.delta_f_hz.is_finite() {
            return Err(Error::config(format!(
                "slot spacing must be positive and finite, got {}",
                self.delta_f_hz
            )));
        }
        if !self.f_start_hz.is_finite() {
            return Err(Error::config("band start frequency must be finite"));
        }
        if self.n_bits == 0 || self.n_bits > MAX_BITS {
            return Err(Error::config(format!(
                "band must carry between 1 and {MAX_BITS} bits, got {}",
                self.n_bits
            )));
        }
        Ok(())
    }

    /// Slot index carrying bit k under the current orientation.
    pub fn slot_for_bit(&self, k: usize) -> Result<usize> {
        if k >= self.n_bits {
            return Err(Error::config(format!(
                "bit index {k} outside band of {} bits",
                self.n_bits
            )));
        }
        Ok(if self.reversed { self.n_bits - 1 - k } else { k })
    }

    pub fn frequencies_hz(&self) -> Vec<f64> {
        (0..self.n_bits)
            .map(|k| self.f_start_hz + k as f64 * self.delta_f_hz)
            .collect()
    }
}

/// Center frequency of slot k: f_start + k * delta_f.
pub fn slot_frequency(band: &BandPlan, k: usize) -> Result<f64> {
    if k >= band.n_bits {
        return Err(Error::config(format!(
            "slot index {k} outside band of {} slots",
            band.n_bits
        )));
    }
    Ok(band.f_start_hz + k as f64 * band.delta_f_hz)
}
