//! Precomputed per-cluster bundle: operators, internal Hamiltonian, its
//! eigensystem, and the transition table, built once and shared by
//! propagation, readout, and experiment code.

use crate::cluster::SpinCluster;
use crate::error::Result;
use crate::hamiltonian::{eigensystem, internal_hamiltonian, EigenSystem};
use crate::operators::SpinOperatorSet;
use crate::transitions::{transition_table, TransitionTable, WEIGHT_EPSILON};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone)]
pub struct ClusterSystem {
    pub cluster: SpinCluster,
    pub ops: SpinOperatorSet,
    pub hamiltonian: CMat,
    pub eigen: EigenSystem,
    pub table: TransitionTable,
    h_spectral_norm: f64,
}

impl ClusterSystem {
    pub fn new(cluster: SpinCluster) -> Result<Self> {
        let ops = SpinOperatorSet::new(cluster.n_spins());
        let hamiltonian = internal_hamiltonian(&cluster);
        let eigen = eigensystem(&hamiltonian)?;
        let table = transition_table(&eigen, &ops, WEIGHT_EPSILON)?;
        let h_spectral_norm = eigen
            .eigenvalues
            .iter()
            .map(|e| e.abs())
            .fold(0.0, f64::max);
        Ok(ClusterSystem {
            cluster,
            ops,
            hamiltonian,
            eigen,
            table,
            h_spectral_norm,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.cluster.n_spins()
    }

    pub fn dim(&self) -> usize {
        self.cluster.dim()
    }

    /// Largest eigenvalue magnitude of the internal Hamiltonian (rad/s).
    pub fn spectral_norm(&self) -> f64 {
        self.h_spectral_norm
    }
}
