//! Drive-strength regime classification.
//!
//! Three internal scales order the physics: the typical eigenvalue spacing
//! t1 = 2^(-2n) * omega_loc, the sector scale t2 = 2^n * t1, and the full
//! spectral width t3 = omega_loc. A guard factor kappa > 1 widens each
//! boundary into a band. Reading the drive strength upward:
//!
//!   [0, t1/k)        single-transition
//!   [t1/k, t1*k)     crossover between single and inhomogeneous
//!   [t1*k, t2/k]     inhomogeneous
//!   (t2/k, t2*k)     collective (the neighborhood of t2)
//!   [t2*k, t3/k]     thermodynamic
//!   (t3/k, t3*k]     crossover between thermodynamic and hard
//!   (t3*k, inf)      hard-pulse
//!
//! The tiling is clean only while kappa^2 < 2^n; otherwise adjacent bands
//! overlap and the report flags the geometry as degenerate (classification
//! still proceeds, taking the first matching band from the bottom).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_KAPPA: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeLabel {
    Single,
    Inhomogeneous,
    Collective,
    Thermodynamic,
    Hard,
    Crossover {
        lower: Box<RegimeLabel>,
        upper: Box<RegimeLabel>,
    },
}

impl RegimeLabel {
    /// Position along the drive-strength axis, for monotonicity checks.
    pub fn rank(&self) -> u8 {
        match self {
            RegimeLabel::Single => 0,
            RegimeLabel::Crossover { lower, .. } if **lower == RegimeLabel::Single => 1,
            RegimeLabel::Inhomogeneous => 2,
            RegimeLabel::Collective => 3,
            RegimeLabel::Thermodynamic => 4,
            RegimeLabel::Crossover { .. } => 5,
            RegimeLabel::Hard => 6,
        }
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegimeLabel::Single => write!(f, "single"),
            RegimeLabel::Inhomogeneous => write!(f, "inhomogeneous"),
            RegimeLabel::Collective => write!(f, "collective"),
            RegimeLabel::Thermodynamic => write!(f, "thermodynamic"),
            RegimeLabel::Hard => write!(f, "hard"),
            RegimeLabel::Crossover { lower, upper } => {
                write!(f, "crossover({lower}, {upper})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: RegimeLabel,
    pub n_spins: usize,
    /// Full spectral width of the transition table (rad/s).
    pub omega_loc: f64,
    /// Typical eigenvalue spacing 2^(-2n) * omega_loc (rad/s).
    pub spacing: f64,
    /// The three scale thresholds [t1, t2, t3] in rad/s.
    pub thresholds: [f64; 3],
    pub kappa: f64,
    /// Drive strength that was classified (rad/s).
    pub drive: f64,
    /// True when kappa^2 >= 2^n, which makes adjacent bands overlap.
    pub bands_overlap: bool,
}

/// Typical eigenvalue spacing: the spectral width divided by the number of
/// level pairs, 2^(-2n) * omega_loc.
pub fn spacing_estimate(n_spins: usize, omega_loc: f64) -> f64 {
    omega_loc * (-2.0 * n_spins as f64).exp2()
}

/// Classifies a drive strength (rad/s) against the cluster's scales.
pub fn classify_regime(
    n_spins: usize,
    omega_loc: f64,
    drive: f64,
    kappa: f64,
) -> Result<RegimeReport> {
    if n_spins == 0 {
        return Err(Error::config("cannot classify an empty cluster"));
    }
    if omega_loc <= 0.0 || !omega_loc.is_finite() {
        return Err(Error::config(format!(
            "spectral width must be positive to define regime bands, got {omega_loc}"
        )));
    }
    if drive < 0.0 || !drive.is_finite() {
        return Err(Error::config(format!(
            "drive strength must be non-negative and finite, got {drive}"
        )));
    }
    if kappa <= 1.0 || !kappa.is_finite() {
        return Err(Error::config(format!(
            "guard factor must exceed 1, got {kappa}"
        )));
    }
    let spacing = spacing_estimate(n_spins, omega_loc);
    let t1 = spacing;
    let t2 = spacing * (n_spins as f64).exp2();
    let t3 = omega_loc;
    let bands_overlap = kappa * kappa >= (n_spins as f64).exp2();

    let cross = |lower: RegimeLabel, upper: RegimeLabel| RegimeLabel::Crossover {
        lower: Box::new(lower),
        upper: Box::new(upper),
    };
    let regime = if drive < t1 / kappa {
        RegimeLabel::Single
    } else if drive < t1 * kappa {
        cross(RegimeLabel::Single, RegimeLabel::Inhomogeneous)
    } else if drive <= t2 / kappa {
        RegimeLabel::Inhomogeneous
    } else if drive < t2 * kappa {
        RegimeLabel::Collective
    } else if drive <= t3 / kappa {
        RegimeLabel::Thermodynamic
    } else if drive <= t3 * kappa {
        cross(RegimeLabel::Thermodynamic, RegimeLabel::Hard)
    } else {
        RegimeLabel::Hard
    };

    Ok(RegimeReport {
        regime,
        n_spins,
        omega_loc,
        spacing,
        thresholds: [t1, t2, t3],
        kappa,
        drive,
        bands_overlap,
    })
}
