//! Spectral bit processing on dipolar-coupled spin clusters.
//!
//! A binary word is written into a spin cluster as a comb of weak
//! excitation harmonics, one spectral slot per bit; the deviation density
//! operator is propagated under the secular dipolar Hamiltonian plus the
//! drive, and the word is read back by thresholding slot amplitudes in the
//! magnitude spectrum of the simulated free induction signal. An anti-phase
//! comb erases selected slots, which realizes a parallel bitwise NOT.
//!
//! Frequencies are angular (rad/s) everywhere inside the crate; Hz appears
//! only in files, CLI flags, and config structs, converted once at the
//! boundary.

pub mod cluster;
pub mod codec;
pub mod error;
pub mod experiment;
pub mod hamiltonian;
pub mod linalg;
pub mod operators;
pub mod output;
pub mod propagate;
pub mod pulse;
pub mod readout;
pub mod regime;
pub mod system;
pub mod transitions;

pub use cluster::{build_cluster, ClusterSpec, SpinCluster};
pub use codec::{bits_to_int, bitwise_not_oracle, int_to_bits, BandPlan, BitArray};
pub use error::{Error, Result};
pub use experiment::{
    average_noisy_transients, mix_seed, Calibration, Experiment, ExperimentConfig,
    RunResult, SweepRow, TuneResult,
};
pub use hamiltonian::{eigensystem, internal_hamiltonian, EigenSystem};
pub use operators::SpinOperatorSet;
pub use propagate::{
    acquire_fid, evolve_free, evolve_pulse, expectation, thermal_state, DeviationState,
    PropagationMethod, PropagationParams,
};
pub use pulse::{
    anti_phase, comb_from_bits, Harmonic, ProgramFile, PulseProgram, PulseSegment,
};
pub use readout::{
    complex_spectrum, decode_bits, magnitude_std_in_band, noise_floor_outside_slots,
    slot_amplitudes, Spectrum, ThresholdPolicy,
};
pub use regime::{classify_regime, spacing_estimate, RegimeLabel, RegimeReport};
pub use system::ClusterSystem;
pub use transitions::{transition_table, TransitionTable, WEIGHT_EPSILON};
