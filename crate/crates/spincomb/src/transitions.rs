//! Transition table: the S_x-allowed lines of a cluster.
//!
//! Every unordered eigenstate pair with |<i|S_x|j>|^2 above threshold is
//! one line. `omega` is the positive level splitting; `signed_omega` is
//! where the line lands in a complex detected spectrum (positive when the
//! higher-magnetization state is the higher level).

use crate::error::{Error, Result};
use crate::hamiltonian::EigenSystem;
use crate::operators::SpinOperatorSet;
use serde::Serialize;

/// Default threshold on |<i|S_x|j>|^2 for retaining a line.
pub const WEIGHT_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct TransitionEntry {
    /// Index of the higher-energy eigenstate.
    pub upper: usize,
    /// Index of the lower-energy eigenstate.
    pub lower: usize,
    /// Positive splitting epsilon_upper - epsilon_lower (rad/s).
    pub omega: f64,
    /// Frequency at which the line appears under S_+ detection (rad/s).
    pub signed_omega: f64,
    /// |<upper|S_x|lower>|^2.
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitionTable {
    pub entries: Vec<TransitionEntry>,
    /// Spectral width: max omega - min omega over the table (rad/s).
    pub omega_loc: f64,
    /// Coincidence tolerance, 1e-9 * omega_loc.
    pub freq_epsilon: f64,
    /// True when two lines coincide within freq_epsilon.
    pub degenerate: bool,
}

impl TransitionTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry with the largest weight.
    pub fn strongest(&self) -> Option<&TransitionEntry> {
        self.entries
            .iter()
            .max_by(|a, b| a.weight.partial_cmp(&b.weight).unwrap())
    }

    /// Hard upper bound on the line count for n spins: C(2n, n+1).
    pub fn generic_count_bound(n_spins: usize) -> u128 {
        binomial(2 * n_spins as u128, n_spins as u128 + 1)
    }
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Enumerates the allowed lines of an eigensystem.
pub fn transition_table(
    eigen: &EigenSystem,
    ops: &SpinOperatorSet,
    weight_epsilon: f64,
) -> Result<TransitionTable> {
    let dim = eigen.dim();
    if ops.dim() != dim {
        return Err(Error::config(format!(
            "operator dimension {} does not match eigensystem dimension {dim}",
            ops.dim()
        )));
    }
    if weight_epsilon.is_nan() || weight_epsilon < 0.0 {
        return Err(Error::config("weight threshold must be non-negative"));
    }

    // S_x in the eigenbasis; one dense conjugation, reused for every pair.
    let sx_eig = eigen.vectors.adjoint() * ops.sx() * &eigen.vectors;

    let mut entries = Vec::new();
    for lower in 0..dim {
        for upper in (lower + 1)..dim {
            let weight = sx_eig[(upper, lower)].norm_sqr();
            if weight > weight_epsilon {
                let omega = eigen.eigenvalues[upper] - eigen.eigenvalues[lower];
                let signed = if eigen.magnetization[upper] >= eigen.magnetization[lower] {
                    omega
                } else {
                    -omega
                };
                entries.push(TransitionEntry {
                    upper,
                    lower,
                    omega,
                    signed_omega: signed,
                    weight,
                });
            }
        }
    }

    let (omega_loc, freq_epsilon, degenerate) = if entries.is_empty() {
        (0.0, 0.0, false)
    } else {
        let mut omegas: Vec<f64> = entries.iter().map(|e| e.omega).collect();
        omegas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let span = omegas[omegas.len() - 1] - omegas[0];
        let eps = 1e-9 * span;
        let degenerate = omegas.windows(2).any(|w| (w[1] - w[0]).abs() <= eps);
        (span, eps, degenerate)
    };

    Ok(TransitionTable {
        entries,
        omega_loc,
        freq_epsilon,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::SpinCluster;
    use crate::hamiltonian::{eigensystem, internal_hamiltonian};
    use nalgebra::DMatrix;

    fn table_for(cluster: &SpinCluster) -> TransitionTable {
        let eig = eigensystem(&internal_hamiltonian(cluster)).unwrap();
        let ops = SpinOperatorSet::new(cluster.n_spins());
        transition_table(&eig, &ops, WEIGHT_EPSILON).unwrap()
    }

    #[test]
    fn single_spin_has_one_line_at_its_offset() {
        let cluster = SpinCluster::new(vec![120.0], DMatrix::zeros(1, 1)).unwrap();
        let t = table_for(&cluster);
        assert_eq!(t.len(), 1);
        assert!((t.entries[0].omega - 120.0).abs() < 1e-10);
        assert!((t.entries[0].signed_omega - 120.0).abs() < 1e-10);
        assert!((t.entries[0].weight - 0.25).abs() < 1e-12);
        assert_eq!(t.omega_loc, 0.0);
        assert!(!t.degenerate);
    }

    #[test]
    fn generic_counts_saturate_the_combinatorial_bound() {
        // independent oracle: sum_k C(n,k) C(n,k+1) = C(2n, n+1)
        for n in 2..=5usize {
            let mut sector_sum: u128 = 0;
            for k in 0..n {
                sector_sum += binomial(n as u128, k as u128) * binomial(n as u128, k as u128 + 1);
            }
            assert_eq!(sector_sum, TransitionTable::generic_count_bound(n));

            let cluster =
                SpinCluster::random_geometric(n, 90.0, 700.0, 0.3, 40 + n as u64).unwrap();
            let t = table_for(&cluster);
            assert_eq!(
                t.len() as u128,
                TransitionTable::generic_count_bound(n),
                "n = {n}"
            );
        }
    }

    #[test]
    fn expected_counts_for_small_sizes() {
        assert_eq!(TransitionTable::generic_count_bound(1), 1);
        assert_eq!(TransitionTable::generic_count_bound(2), 4);
        assert_eq!(TransitionTable::generic_count_bound(3), 15);
        assert_eq!(TransitionTable::generic_count_bound(4), 56);
        assert_eq!(TransitionTable::generic_count_bound(5), 210);
    }

    #[test]
    fn retained_lines_connect_adjacent_magnetization_sectors() {
        let cluster = SpinCluster::random_geometric(4, 150.0, 500.0, 0.3, 17).unwrap();
        let eig = eigensystem(&internal_hamiltonian(&cluster)).unwrap();
        let ops = SpinOperatorSet::new(4);
        let t = transition_table(&eig, &ops, WEIGHT_EPSILON).unwrap();
        assert!(!t.is_empty());
        for e in &t.entries {
            let dm = (eig.magnetization[e.upper] - eig.magnetization[e.lower]).abs();
            assert!((dm - 1.0).abs() < 1e-12);
            assert!(e.omega >= 0.0);
            assert_eq!(e.signed_omega.abs(), e.omega);
        }
    }

    #[test]
    fn identical_uncoupled_spins_flag_degeneracy() {
        let cluster = SpinCluster::new(vec![100.0, 100.0, 250.0], DMatrix::zeros(3, 3)).unwrap();
        let t = table_for(&cluster);
        assert!(t.degenerate);
        assert!(t.omega_loc > 0.0);
        assert!((t.freq_epsilon - 1e-9 * t.omega_loc).abs() <= f64::EPSILON * t.omega_loc);
    }

    #[test]
    fn width_spans_min_to_max_line() {
        // uncoupled pair: each flip appears twice (two neighbor contexts)
        let cluster = SpinCluster::new(vec![100.0, 300.0], DMatrix::zeros(2, 2)).unwrap();
        let t = table_for(&cluster);
        assert_eq!(t.len(), 4);
        assert!((t.omega_loc - 200.0).abs() < 1e-10);
        assert!(t.degenerate);
    }

    #[test]
    fn threshold_prunes_weak_lines() {
        let cluster = SpinCluster::random_geometric(3, 80.0, 400.0, 0.3, 23).unwrap();
        let eig = eigensystem(&internal_hamiltonian(&cluster)).unwrap();
        let ops = SpinOperatorSet::new(3);
        let loose = transition_table(&eig, &ops, WEIGHT_EPSILON).unwrap();
        let tight = transition_table(&eig, &ops, 1e-2).unwrap();
        assert!(tight.len() < loose.len());
        assert!(tight.entries.iter().all(|e| e.weight > 1e-2));
    }
}
