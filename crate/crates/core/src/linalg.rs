//! Small dense complex linear-algebra helpers shared by every module.
//!
//! Matrices here never exceed 16×16, so everything is plain `DMatrix`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// e^{iθ}
#[inline]
pub fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// max |U†U − I|, entrywise.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

/// max |A − A†|, entrywise.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues of a Hermitian matrix in ascending order. Only the
/// Hermitian part of `m` is used.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * real(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Square root of a positive semidefinite Hermitian matrix. Negative
/// eigenvalues from round-off are clipped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let h = (m + m.adjoint()) * real(0.5);
    let eig = h.symmetric_eigen();
    let roots = eig.eigenvalues.map(|x| real(x.max(0.0).sqrt()));
    let v = &eig.eigenvectors;
    v * CMatrix::from_diagonal(&roots) * v.adjoint()
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Rank of a Hermitian matrix, counting eigenvalues above `tol` in modulus.
pub fn hermitian_rank(m: &CMatrix, tol: f64) -> usize {
    hermitian_eigenvalues(m)
        .into_iter()
        .filter(|x| x.abs() > tol)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_squares_back() {
        let m = CMatrix::from_row_slice(2, 2, &[real(2.0), c(0.0, 1.0), c(0.0, -1.0), real(2.0)]);
        let s = psd_sqrt(&m);
        assert!(max_abs(&(&s * &s - &m)) < 1e-12);
    }

    #[test]
    fn eigenvalues_are_sorted() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![real(3.0), real(-1.0), real(0.5)]));
        assert_eq!(hermitian_eigenvalues(&m), vec![-1.0, 0.5, 3.0]);
    }
}
