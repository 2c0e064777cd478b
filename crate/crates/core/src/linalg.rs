//! Small dense complex linear-algebra helpers shared by the evaluators and the
//! SDP builders.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{CMat, CVec};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `conj(v) * v^T`, the Hermitian matrix with `x^H (v* v^T) x = |v^T x|^2`.
pub fn conj_outer(v: &CVec) -> CMat {
    let vc = v.conjugate();
    &vc * v.transpose()
}

/// `g^T Q g*`, real for Hermitian `Q`.
pub fn received_power(g: &CVec, q: &CMat) -> f64 {
    let gc = g.conjugate();
    (g.transpose() * q * gc)[(0, 0)].re
}

/// `g^T W h`.
pub fn bilinear(g: &CVec, w: &CMat, h: &CVec) -> Complex64 {
    (g.transpose() * w * h)[(0, 0)]
}

/// Real part of `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            let x = a[(i, k)] * b[(k, i)];
            acc += x.re;
        }
    }
    acc
}

pub fn trace_re(a: &CMat) -> f64 {
    a.diagonal().iter().map(|z| z.re).sum()
}

/// Largest entry of `|A - A^H|`.
pub fn hermitian_defect(a: &CMat) -> f64 {
    if a.nrows() != a.ncols() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(a));
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Projects a Hermitian matrix onto the PSD cone by clipping eigenvalues.
pub fn psd_projection(a: &CMat) -> CMat {
    let (values, vectors) = hermitian_eigen(a);
    let clipped = CVec::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v.max(0.0), 0.0)));
    &vectors * CMat::from_diagonal(&clipped) * vectors.adjoint()
}

/// Column-stacking vectorisation.
pub fn vec(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

/// Inverse of [`vec`].
pub fn unvec(v: &CVec, rows: usize, cols: usize) -> Result<CMat> {
    if rows * cols != v.len() {
        return Err(Error::Dimension(format!(
            "cannot reshape length {} into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(CMat::from_column_slice(rows, cols, v.as_slice()))
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Checks `Tr(ABCD) = vec(D^T)^T (C^T ⊗ A) vec(B)` for conformable matrices.
///
/// Both sides are evaluated independently; returns whether they agree within
/// `1e-10` relative to the magnitude of the operands.
pub fn trace_identity_check(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> Result<bool> {
    let (lhs, rhs) = trace_identity_sides(a, b, c, d)?;
    let scale = 1.0 + a.norm() * b.norm() * c.norm() * d.norm();
    Ok((lhs - rhs).norm() <= 1e-10 * scale)
}

/// Returns `(Tr(ABCD), vec(D^T)^T (C^T ⊗ A) vec(B))`.
pub fn trace_identity_sides(
    a: &CMat,
    b: &CMat,
    c: &CMat,
    d: &CMat,
) -> Result<(Complex64, Complex64)> {
    if a.ncols() != b.nrows() || b.ncols() != c.nrows() || c.ncols() != d.nrows() || d.ncols() != a.nrows() {
        return Err(Error::Dimension(format!(
            "non-conformable product {}x{} · {}x{} · {}x{} · {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            c.nrows(),
            c.ncols(),
            d.nrows(),
            d.ncols()
        )));
    }
    let lhs = (a * b * c * d).trace();
    let rhs = (vec(&d.transpose()).transpose() * kron(&c.transpose(), a) * vec(b))[(0, 0)];
    Ok((lhs, rhs))
}

/// Real symmetric embedding `[[Re, -Im], [Im, Re]]` of a complex matrix.
pub fn realify(a: &CMat) -> DMatrix<f64> {
    let (r, c) = a.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = a[(i, j)];
            out[(i, j)] = z.re;
            out[(i + r, j + c)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
        }
    }
    out
}

/// Inverse of [`realify`] for matrices with the embedded structure. Any
/// deviation from the structure is averaged away.
pub fn complexify(y: &DMatrix<f64>) -> CMat {
    let n = y.nrows() / 2;
    CMat::from_fn(n, n, |i, j| {
        let re = 0.5 * (y[(i, j)] + y[(i + n, j + n)]);
        let im = 0.5 * (y[(i + n, j)] - y[(i, j + n)]);
        Complex64::new(re, im)
    })
}
