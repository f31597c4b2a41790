//! Thin helpers over dense complex matrices.
//!
//! All operator algebra in this crate happens on dynamically sized
//! `DMatrix<Complex64>` values at desk scale (dimensions up to ~10^3 for the
//! two-mode tensor products), so plain dense routines are sufficient.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex matrix used for every operator representation.
pub type CMat = DMatrix<Complex64>;
/// Dense complex vector used for state amplitudes.
pub type CVec = nalgebra::DVector<Complex64>;

/// Identity matrix of dimension `n`.
pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest entry magnitude; the defect norm used by all contract checks.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.norm()))
}

/// Largest entry magnitude over the leading `k x k` block.
///
/// Truncated-space identities only hold away from the top of the ladder, so
/// defects are routinely measured on a leading block rather than on the full
/// matrix.
pub fn max_abs_leading(m: &CMat, k: usize) -> f64 {
    let k = k.min(m.nrows()).min(m.ncols());
    let mut acc = 0.0_f64;
    for i in 0..k {
        for j in 0..k {
            acc = acc.max(m[(i, j)].norm());
        }
    }
    acc
}

/// Commutator `[a, b] = ab - ba`.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Kronecker product, mode-0 factor on the left (slow index).
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Matrix exponential by scaling-and-squaring with a Padé approximant.
///
/// nalgebra's `exp` implements the standard Higham scaling-and-squaring
/// scheme; its accuracy at desk scale is well below the 1e-13 target the
/// operator contracts assume, which the displacement tests pin down.
pub fn expm(m: &CMat) -> CMat {
    m.exp()
}

/// Inverse with an explicit error instead of a panic.
pub fn inverse(m: &CMat, context: &'static str) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or(Error::SingularMatrix { context })
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The input is symmetrized as `(m + m†)/2` first; `defect_tolerance` bounds
/// how far the input may be from Hermitian before that silent repair would be
/// a lie, in which case an error is returned.
pub fn hermitian_eigenvalues(m: &CMat, defect_tolerance: f64) -> Result<Vec<f64>> {
    let herm_defect = max_abs(&(m - m.adjoint()));
    if herm_defect > defect_tolerance {
        return Err(Error::CrossCheckFailure {
            context: "hermitian eigenvalue input",
            defect: herm_defect,
            tolerance: defect_tolerance,
        });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(eig)
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix given by its
/// diagonal and sub-diagonal, returning `(eigenvalues, first components)`.
///
/// Used by the Golub–Welsch step: Gauss nodes are the eigenvalues of the
/// Jacobi matrix and the weights come from the squared first components of
/// the normalized eigenvectors.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], offdiag: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    assert_eq!(offdiag.len() + 1, n, "offdiag must have length n-1");
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = offdiag[i];
            m[(i + 1, i)] = offdiag[i];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("eigenvalues are finite")
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let firsts = order.iter().map(|&i| eig.eigenvectors[(0, i)]).collect();
    (values, firsts)
}
