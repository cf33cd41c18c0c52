//! Dense spin-1/2 operators over the 2^n product basis.
//!
//! Basis convention: state index b runs over bit patterns; bit i of b set
//! means spin i points down. Ladder phases follow the standard Pauli
//! matrices, so [S_x, S_y] = i S_z holds elementwise.

use nalgebra::DMatrix;
use num_complex::Complex64;

type CMat = DMatrix<Complex64>;

const HALF: Complex64 = Complex64::new(0.5, 0.0);

/// Collective spin operators for a fixed cluster size.
#[derive(Debug, Clone)]
pub struct SpinOperatorSet {
    n_spins: usize,
    sx: CMat,
    sy: CMat,
    sz: CMat,
}

impl SpinOperatorSet {
    pub fn new(n_spins: usize) -> Self {
        let dim = 1usize << n_spins;
        let mut sx = CMat::zeros(dim, dim);
        let mut sy = CMat::zeros(dim, dim);
        let mut sz = CMat::zeros(dim, dim);
        for b in 0..dim {
            sz[(b, b)] = Complex64::new(magnetization_of_basis_state(b, n_spins), 0.0);
            for i in 0..n_spins {
                let flipped = b ^ (1 << i);
                sx[(flipped, b)] += HALF;
                // raising a down spin lands in the -i/2 element of I_y
                let phase = if b & (1 << i) != 0 {
                    Complex64::new(0.0, -0.5)
                } else {
                    Complex64::new(0.0, 0.5)
                };
                sy[(flipped, b)] += phase;
            }
        }
        SpinOperatorSet { n_spins, sx, sy, sz }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        1 << self.n_spins
    }

    pub fn sx(&self) -> &CMat {
        &self.sx
    }

    pub fn sy(&self) -> &CMat {
        &self.sy
    }

    pub fn sz(&self) -> &CMat {
        &self.sz
    }

    /// S_+ = S_x + i S_y, the detection operator.
    pub fn s_plus(&self) -> CMat {
        &self.sx + &self.sy * Complex64::new(0.0, 1.0)
    }

    /// Single-spin I_x for site i, built on demand.
    pub fn single_x(&self, i: usize) -> CMat {
        assert!(i < self.n_spins);
        let dim = self.dim();
        let mut m = CMat::zeros(dim, dim);
        for b in 0..dim {
            m[(b ^ (1 << i), b)] = HALF;
        }
        m
    }

    /// Single-spin I_z for site i, built on demand.
    pub fn single_z(&self, i: usize) -> CMat {
        assert!(i < self.n_spins);
        let dim = self.dim();
        let mut m = CMat::zeros(dim, dim);
        for b in 0..dim {
            let sign = if b & (1 << i) != 0 { -0.5 } else { 0.5 };
            m[(b, b)] = Complex64::new(sign, 0.0);
        }
        m
    }
}

/// Total z-projection of a product basis state (bit set = spin down).
pub fn magnetization_of_basis_state(b: usize, n_spins: usize) -> f64 {
    let down = (b & ((1usize << n_spins) - 1)).count_ones() as f64;
    (n_spins as f64 - 2.0 * down) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn max_abs(m: &CMat) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn collective_operators_are_hermitian_and_traceless() {
        for n in 1..=4 {
            let ops = SpinOperatorSet::new(n);
            for m in [ops.sx(), ops.sy(), ops.sz()] {
                assert!(max_abs(&(m - m.adjoint())) < 1e-14);
                assert!(m.trace().norm() < 1e-14);
            }
        }
    }

    #[test]
    fn commutator_closes_on_sz() {
        for n in 1..=4 {
            let ops = SpinOperatorSet::new(n);
            let lhs = ops.sx() * ops.sy() - ops.sy() * ops.sx();
            let rhs = ops.sz() * Complex64::new(0.0, 1.0);
            assert!(max_abs(&(lhs - rhs)) < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn collective_equals_sum_of_single_site_operators() {
        let ops = SpinOperatorSet::new(3);
        let sum_x = (0..3).fold(CMat::zeros(8, 8), |acc, i| acc + ops.single_x(i));
        let sum_z = (0..3).fold(CMat::zeros(8, 8), |acc, i| acc + ops.single_z(i));
        assert!(max_abs(&(ops.sx() - sum_x)) < 1e-14);
        assert!(max_abs(&(ops.sz() - sum_z)) < 1e-14);
    }

    #[test]
    fn sz_trace_of_square_counts_states() {
        // Tr(Sz^2) = n 2^n / 4
        for n in 1..=5 {
            let ops = SpinOperatorSet::new(n);
            let tr = (ops.sz() * ops.sz()).trace();
            let expect = n as f64 * (1 << n) as f64 / 4.0;
            assert_abs_diff_eq!(tr.re, expect, epsilon = 1e-12);
            assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn basis_magnetization_counts_down_spins() {
        assert_eq!(magnetization_of_basis_state(0b000, 3), 1.5);
        assert_eq!(magnetization_of_basis_state(0b001, 3), 0.5);
        assert_eq!(magnetization_of_basis_state(0b111, 3), -1.5);
    }

    #[test]
    fn s_plus_raises_magnetization_by_one() {
        let ops = SpinOperatorSet::new(3);
        let sp = ops.s_plus();
        for col in 0..8 {
            for row in 0..8 {
                if sp[(row, col)].norm() > 1e-14 {
                    let dm = magnetization_of_basis_state(row, 3)
                        - magnetization_of_basis_state(col, 3);
                    assert_abs_diff_eq!(dm, 1.0, epsilon = 1e-12);
                }
            }
        }
    }
}
