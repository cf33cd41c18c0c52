//! Secular dipolar Hamiltonian and its eigensystem.
//!
//! H = sum_i delta_i I_z^i + sum_{i<j} d_ij (2 I_z^i I_z^j - I_x^i I_x^j - I_y^i I_y^j)
//!
//! In the product basis this matrix is real symmetric: the z-z part is
//! diagonal and the flip-flop part connects states with one up-down pair
//! exchanged, with element -d_ij / 2. H commutes with total S_z, so every
//! eigenvector carries a sharp total magnetization.

use crate::cluster::SpinCluster;
use crate::error::{Error, Result};
use crate::operators::magnetization_of_basis_state;
use nalgebra::DMatrix;
use num_complex::Complex64;

type CMat = DMatrix<Complex64>;

/// Builds the internal Hamiltonian of a cluster (rad/s).
pub fn internal_hamiltonian(cluster: &SpinCluster) -> CMat {
    let n = cluster.n_spins();
    let dim = cluster.dim();
    let offsets = cluster.offsets();
    let couplings = cluster.couplings();
    let mut h = CMat::zeros(dim, dim);
    for b in 0..dim {
        let mut diag = 0.0;
        for i in 0..n {
            let mi = if b & (1 << i) != 0 { -0.5 } else { 0.5 };
            diag += offsets[i] * mi;
            for j in (i + 1)..n {
                let mj = if b & (1 << j) != 0 { -0.5 } else { 0.5 };
                diag += 2.0 * couplings[(i, j)] * mi * mj;
                // flip-flop couples opposite pairs with -d/2
                let bi = b & (1 << i) != 0;
                let bj = b & (1 << j) != 0;
                if bi != bj {
                    let flipped = b ^ (1 << i) ^ (1 << j);
                    h[(flipped, b)] += Complex64::new(-0.5 * couplings[(i, j)], 0.0);
                }
            }
        }
        h[(b, b)] = Complex64::new(diag, 0.0);
    }
    h
}

/// Eigendecomposition of a Hermitian matrix over a 2^n space, with the
/// total-magnetization expectation attached to every eigenvector.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Ascending eigenvalues (rad/s).
    pub eigenvalues: Vec<f64>,
    /// Columns are the matching orthonormal eigenvectors.
    pub vectors: CMat,
    /// Total S_z expectation per eigenvector, snapped to half-integers.
    pub magnetization: Vec<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn n_spins(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }
}

/// Relative Hermiticity tolerance accepted by `eigensystem`.
const HERMITICITY_TOL: f64 = 1e-10;

pub fn eigensystem(h: &CMat) -> Result<EigenSystem> {
    let dim = h.nrows();
    if dim == 0 || h.ncols() != dim {
        return Err(Error::config("eigensystem needs a square nonempty matrix"));
    }
    if !dim.is_power_of_two() {
        return Err(Error::config(format!(
            "matrix dimension {dim} is not a power of two"
        )));
    }
    let n_spins = dim.trailing_zeros() as usize;
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let herm_err = (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm_err > HERMITICITY_TOL * scale.max(1e-300) {
        return Err(Error::config(format!(
            "matrix is not Hermitian: max |H - H^+| = {herm_err:.3e}"
        )));
    }

    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap()
            .then(a.cmp(&b))
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }

    let magnetization = (0..dim)
        .map(|col| {
            let raw: f64 = (0..dim)
                .map(|b| {
                    vectors[(b, col)].norm_sqr() * magnetization_of_basis_state(b, n_spins)
                })
                .sum();
            (raw * 2.0).round() / 2.0
        })
        .collect();

    Ok(EigenSystem {
        eigenvalues,
        vectors,
        magnetization,
    })
}
