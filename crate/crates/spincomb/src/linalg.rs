//! Dense complex matrix products routed through packed BLAS-style kernels.
//!
//! Time propagation multiplies dim x dim complex matrices thousands of
//! times per pulse; the generic operator path is a naive triple loop, so
//! the hot products go through `matrixmultiply::zgemm` instead. Matrices
//! are column-major, which fixes the stride arguments below.

use matrixmultiply::{zgemm, CGemmOption};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

const ONE: [f64; 2] = [1.0, 0.0];
const ZERO: [f64; 2] = [0.0, 0.0];

/// C = A * B.
pub fn gemm(a: &CMat, b: &CMat) -> CMat {
    let (m, k) = a.shape();
    let (kb, n) = b.shape();
    assert_eq!(k, kb, "inner dimensions must agree: {k} vs {kb}");
    let mut c = CMat::zeros(m, n);
    // Complex64 is repr(C) { re: f64, im: f64 }, layout-identical to [f64; 2].
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            ONE,
            a.as_slice().as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_slice().as_ptr() as *const [f64; 2],
            1,
            k as isize,
            ZERO,
            c.as_mut_slice().as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    c
}

/// C = A^H * B. The adjoint is materialized first (an O(dim^2) copy,
/// negligible next to the O(dim^3) product); the kernel in this
/// matrixmultiply release has no conjugation flag.
pub fn gemm_adjoint_left(a: &CMat, b: &CMat) -> CMat {
    gemm(&a.adjoint(), b)
}

/// C = A * B^H; see [`gemm_adjoint_left`] for why the adjoint is copied.
pub fn gemm_adjoint_right(a: &CMat, b: &CMat) -> CMat {
    gemm(a, &b.adjoint())
}

/// Similarity transform into an orthonormal column basis: V^H * M * V.
pub fn to_basis(v: &CMat, m: &CMat) -> CMat {
    gemm_adjoint_left(v, &gemm(m, v))
}

/// Inverse of [`to_basis`] for unitary V: V * M * V^H.
pub fn from_basis(v: &CMat, m: &CMat) -> CMat {
    gemm_adjoint_right(&gemm(v, m), v)
}

/// tr(A * B) without forming the product.
pub fn trace_of_product(a: &CMat, b: &CMat) -> Complex64 {
    let (m, k) = a.shape();
    let (kb, n) = b.shape();
    assert_eq!(k, kb, "inner dimensions must agree: {k} vs {kb}");
    assert_eq!(m, n, "product must be square to take a trace: {m} vs {n}");
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..k {
        for i in 0..m {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}
