//! Time evolution of the deviation density operator.
//!
//! Free evolution is exact in the eigenbasis of the internal Hamiltonian.
//! Driven evolution integrates H(t) = H_int + Omega(t) * S_x, where
//! Omega(t) is the pulse field, with one of two schemes:
//!
//! * `Trotter2` - a symmetric (Strang) split. Each step sandwiches the
//!   collective x rotation by the midpoint field between two half steps of
//!   internal evolution; the accumulated unitary costs one dense product
//!   per step plus an O(n * dim^2) row-pair rotation.
//! * `MidpointExponential` - exponentiates the full midpoint Hamiltonian
//!   each step via an eigendecomposition. Slower, used as a cross-check.
//!
//! Both are second order in the step size. A guard refuses steps with
//! dt * (sum of drive amplitudes + spectral norm of H_int) > 0.1, where
//! the splitting is no longer trustworthy.
//!
//! Drive phases are carrier-referenced: the field is evaluated at absolute
//! time (the state's clock plus the offset into the segment), so a segment
//! played after others sees the same phase-coherent carriers it would have
//! seen running continuously from t = 0.

use crate::error::{Error, Result};
use crate::hamiltonian::EigenSystem;
use crate::linalg::{from_basis, gemm, gemm_adjoint_right, to_basis, trace_of_product, CMat};
use crate::pulse::PulseSegment;
use crate::system::ClusterSystem;
use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Hard ceiling on dt * (drive sup + spectral norm of H_int).
pub const STABILITY_LIMIT: f64 = 0.1;
/// Default-dt target for the same product, kept under the ceiling.
const DEFAULT_STABILITY_TARGET: f64 = 0.08;
/// Default dt resolves the fastest scale in the problem to 1/50 of a cycle.
const PERIODS_RESOLVED: f64 = 50.0;
/// Refuse integrations that would need more steps than this.
const MAX_STEPS: usize = 50_000_000;
/// FID terms below this fraction of the strongest term are dropped.
const FID_PRUNE_RELATIVE: f64 = 1e-15;

/// Traceless deviation part of the density operator, with its clock.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationState {
    pub rho: CMat,
    /// Absolute time (s) the state has reached; drives are phase-coherent
    /// with respect to t = 0.
    pub time: f64,
}

impl DeviationState {
    pub fn frobenius_norm(&self) -> f64 {
        self.rho.norm()
    }
}

/// High-temperature initial condition: the deviation operator is the
/// collective longitudinal magnetization, at time zero.
pub fn thermal_state(sys: &ClusterSystem) -> DeviationState {
    DeviationState {
        rho: sys.ops.sz().clone(),
        time: 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PropagationMethod {
    #[default]
    Trotter2,
    MidpointExponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PropagationParams {
    /// Target step (s); defaulted from the fastest problem frequency and
    /// clamped by the stability target when omitted.
    pub dt: Option<f64>,
    pub method: PropagationMethod,
}

/// tr(rho * op), real part; deviation observables are real for Hermitian op.
pub fn expectation(state: &DeviationState, op: &CMat) -> f64 {
    trace_of_product(&state.rho, op).re
}

/// Exact free evolution for a duration (s) under the internal Hamiltonian.
pub fn evolve_free(
    state: &DeviationState,
    eigen: &EigenSystem,
    duration: f64,
) -> Result<DeviationState> {
    if !duration.is_finite() {
        return Err(Error::config(format!(
            "free evolution duration must be finite, got {duration}"
        )));
    }
    let mut rho_eig = to_basis(&eigen.vectors, &state.rho);
    let dim = eigen.dim();
    for j in 0..dim {
        for i in 0..dim {
            let omega = eigen.eigenvalues[i] - eigen.eigenvalues[j];
            rho_eig[(i, j)] *= Complex64::from_polar(1.0, -omega * duration);
        }
    }
    Ok(DeviationState {
        rho: from_basis(&eigen.vectors, &rho_eig),
        time: state.time + duration,
    })
}

fn choose_steps(
    segment: &PulseSegment,
    sys: &ClusterSystem,
    params: &PropagationParams,
) -> Result<(usize, f64)> {
    let rate = segment.amplitude_sup() + sys.spectral_norm();
    let duration = segment.duration;
    let dt_target = match params.dt {
        Some(dt) => {
            if dt <= 0.0 || !dt.is_finite() {
                return Err(Error::config(format!(
                    "time step must be positive and finite, got {dt}"
                )));
            }
            if dt * rate > STABILITY_LIMIT * (1.0 + 1e-12) {
                return Err(Error::Stability(format!(
                    "dt = {dt} s is too coarse: dt * (drive sup + |H|) = {:.3} \
                     exceeds the limit {STABILITY_LIMIT}; use dt <= {:.3e} s",
                    dt * rate,
                    STABILITY_LIMIT / rate
                )));
            }
            dt
        }
        None => {
            let omega_max = segment
                .max_abs_offset()
                .max(sys.table.omega_loc)
                .max(segment.max_amplitude());
            let dt_resolve = if omega_max > 0.0 {
                TAU / (PERIODS_RESOLVED * omega_max)
            } else {
                duration
            };
            let dt_stable = if rate > 0.0 {
                DEFAULT_STABILITY_TARGET / rate
            } else {
                f64::INFINITY
            };
            dt_resolve.min(dt_stable).min(duration)
        }
    };
    let n_steps = (duration / dt_target).ceil().max(1.0);
    if n_steps > MAX_STEPS as f64 {
        return Err(Error::Stability(format!(
            "pulse would need {n_steps:.0} integration steps (> {MAX_STEPS}); \
             shorten the segment or raise dt"
        )));
    }
    Ok((n_steps as usize, duration / n_steps))
}

/// Left-multiplies `m` by the collective rotation exp(-i * theta * S_x),
/// applied as a tensor product of single-spin rotations: O(n * dim^2).
fn apply_collective_x_rotation(m: &mut CMat, theta: f64, n_spins: usize) {
    if theta == 0.0 {
        return;
    }
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    let mis = Complex64::new(0.0, -s);
    let dim = m.nrows();
    let cols = m.ncols();
    let data = m.as_mut_slice();
    for col in 0..cols {
        let base = col * dim;
        for axis in 0..n_spins {
            let stride = 1usize << axis;
            let mut r0 = 0usize;
            while r0 < dim {
                if r0 & stride == 0 {
                    let r1 = r0 | stride;
                    let x = data[base + r0];
                    let y = data[base + r1];
                    data[base + r0] = c * x + mis * y;
                    data[base + r1] = mis * x + c * y;
                }
                r0 += 1;
            }
        }
    }
}

/// Internal-evolution half step in the lab basis: V e^{-i e dt} V^H.
fn phase_propagator(eigen: &EigenSystem, dt: f64) -> CMat {
    let mut scaled = eigen.vectors.clone();
    for (i, energy) in eigen.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -energy * dt);
        scaled.column_mut(i).apply(|x| *x *= phase);
    }
    gemm_adjoint_right(&scaled, &eigen.vectors)
}

/// Evolves through one pulse segment starting at the state's clock.
pub fn evolve_pulse(
    state: &DeviationState,
    sys: &ClusterSystem,
    segment: &PulseSegment,
    params: &PropagationParams,
) -> Result<DeviationState> {
    let (n_steps, dt) = choose_steps(segment, sys, params)?;
    let t_start = state.time;
    let unitary = match params.method {
        PropagationMethod::Trotter2 => {
            let e_half = phase_propagator(&sys.eigen, dt / 2.0);
            let full = gemm(&e_half, &e_half);
            let mut u = e_half.clone();
            for k in 0..n_steps {
                if k > 0 {
                    u = gemm(&full, &u);
                }
                let t_mid = (k as f64 + 0.5) * dt;
                let theta = segment.drive_amplitude_offset(t_mid, t_start) * dt;
                apply_collective_x_rotation(&mut u, theta, sys.n_spins());
            }
            gemm(&e_half, &u)
        }
        PropagationMethod::MidpointExponential => {
            let dim = sys.dim();
            let mut u = CMat::identity(dim, dim);
            for k in 0..n_steps {
                let t_mid = (k as f64 + 0.5) * dt;
                let omega = segment.drive_amplitude_offset(t_mid, t_start);
                let mut h = sys.hamiltonian.clone();
                h += sys.ops.sx() * Complex64::new(omega, 0.0);
                let eig = SymmetricEigen::new(h);
                let mut scaled = eig.eigenvectors.clone();
                for (i, energy) in eig.eigenvalues.iter().enumerate() {
                    let phase = Complex64::from_polar(1.0, -energy * dt);
                    scaled.column_mut(i).apply(|x| *x *= phase);
                }
                let step = gemm_adjoint_right(&scaled, &eig.eigenvectors);
                u = gemm(&step, &u);
            }
            u
        }
    };
    let rho = gemm_adjoint_right(&gemm(&unitary, &state.rho), &unitary);
    Ok(DeviationState {
        rho,
        time: t_start + segment.duration,
    })
}

/// Samples tr(rho(t) * S_plus) at t = k * dwell for k = 0..n_samples,
/// evolving freely from the given state. The state itself is not advanced.
pub fn acquire_fid(
    state: &DeviationState,
    sys: &ClusterSystem,
    n_samples: usize,
    dwell: f64,
) -> Result<Vec<Complex64>> {
    if n_samples == 0 {
        return Err(Error::config("acquisition needs at least one sample"));
    }
    if dwell <= 0.0 || !dwell.is_finite() {
        return Err(Error::config(format!(
            "dwell time must be positive and finite, got {dwell}"
        )));
    }
    let rho_eig = to_basis(&sys.eigen.vectors, &state.rho);
    let splus_eig = to_basis(&sys.eigen.vectors, &sys.ops.s_plus());
    let dim = sys.dim();
    let mut terms: Vec<(Complex64, f64)> = Vec::new();
    let mut max_coeff = 0.0f64;
    for j in 0..dim {
        for i in 0..dim {
            let coeff = rho_eig[(i, j)] * splus_eig[(j, i)];
            let norm = coeff.norm();
            if norm > 0.0 {
                max_coeff = max_coeff.max(norm);
                terms.push((coeff, sys.eigen.eigenvalues[i] - sys.eigen.eigenvalues[j]));
            }
        }
    }
    let cutoff = FID_PRUNE_RELATIVE * max_coeff;
    terms.retain(|(c, _)| c.norm() > cutoff);
    let mut samples = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = k as f64 * dwell;
        let mut acc = Complex64::new(0.0, 0.0);
        for (coeff, omega) in &terms {
            acc += coeff * Complex64::from_polar(1.0, -omega * t);
        }
        samples.push(acc);
    }
    Ok(samples)
}
