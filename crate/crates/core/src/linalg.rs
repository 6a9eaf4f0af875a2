//! Dense complex linear algebra for the small matrices used throughout the
//! crate: 4x4 two-qubit densities and (4n)x(4n) tripartite densities with
//! n <= 64.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Hermiticity tolerance accepted by [`herm_eig`].
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Eigenvalues in `[-PSD_CLAMP, 0)` are round-off and clamp to zero.
pub const PSD_CLAMP: f64 = 1e-6;
/// Eigenvalues below this fraction of the spectral radius are treated as
/// exact zeros by spectral functions.
pub const RELATIVE_EIG_FLOOR: f64 = 1e-14;

pub const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
pub const ONE: C64 = Complex { re: 1.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Builds a matrix from row-major real entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c(x, 0.0)))
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = c(v, 0.0);
    }
    m
}

/// Tensor (Kronecker) product `a ⊗ b`; the row index of `b` varies fastest.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(identity(1), |acc, f| kron(&acc, f))
}

/// Largest absolute entry.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Largest entry of `|m - m^dag|`; `f64::INFINITY` for non-square input.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `(m + m^dag) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn real_trace(m: &ComplexMatrix) -> f64 {
    m.trace().re
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermEig {
    /// Rebuilds `V diag(f(values)) V^dag`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &v) in self.values.iter().enumerate() {
            let s = f(v);
            for i in 0..n {
                scaled[(i, k)] *= s;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|v| v)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted in decreasing order.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEig> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", h.nrows(), h.ncols()),
        });
    }
    if !is_finite(h) {
        return Err(Error::NonFinite);
    }
    let defect = hermiticity_defect(h);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.nrows();
    let eig = SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(HermEig { values, vectors })
}

/// Eigendecomposition of a PSD matrix with round-off clamped: eigenvalues in
/// `[-PSD_CLAMP, 0)` and below `RELATIVE_EIG_FLOOR` times the spectral
/// radius become exactly zero.
pub fn psd_eig(m: &ComplexMatrix) -> Result<HermEig> {
    let mut eig = herm_eig(m)?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -PSD_CLAMP {
        return Err(Error::NotPositive(min));
    }
    let floor = RELATIVE_EIG_FLOOR * eig.spectral_radius();
    for v in eig.values.iter_mut() {
        if *v <= floor {
            *v = 0.0;
        }
    }
    Ok(eig)
}

/// Principal square root of a Hermitian PSD matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_part(&psd_eig(m)?.map(f64::sqrt)))
}

/// `m^{-1/2}` for a positive definite matrix.
pub fn pd_inv_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = psd_eig(m)?;
    if let Some(&min) = eig.values.last() {
        if min <= 0.0 {
            return Err(Error::NotPositive(min));
        }
    }
    Ok(hermitian_part(&eig.map(|v| 1.0 / v.sqrt())))
}

/// Singular values in decreasing order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Orthonormalizes the columns of a full-column-rank matrix (two passes of
/// modified Gram-Schmidt).
pub fn orthonormalize_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let mut q = m.clone();
    let cols = q.ncols();
    for _pass in 0..2 {
        for k in 0..cols {
            for j in 0..k {
                let proj = q.column(j).dotc(&q.column(k));
                let qj = q.column(j).into_owned();
                let mut ck = q.column_mut(k);
                ck.axpy(-proj, &qj, ONE);
            }
            let norm = q.column(k).norm();
            q.column_mut(k).unscale_mut(norm);
        }
    }
    q
}
