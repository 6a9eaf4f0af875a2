//! Pure and mixed states over a list of subsystems.
//!
//! Flattened indices are row-major over the subsystem list: the LAST
//! subsystem varies fastest. For a tripartite `(2, 2, n)` state the
//! amplitude of `|a b c>` sits at `a * 2n + b * n + c`, so Charlie's index is
//! the fastest and local operators on Alice and Bob act as `M_A ⊗ M_B ⊗ I_C`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{dims_mismatch, Error, Result};
use crate::linalg::{
    c, hermiticity_defect, is_finite, kron, psd_eig, real_trace, ComplexMatrix, ComplexVector,
    HermEig, C64, ZERO,
};
use crate::rng::seeded;

/// Normalization tolerance for [`PureState::new`].
pub const NORM_TOL: f64 = 1e-10;
/// Hermiticity, trace and positivity tolerance for [`DensityMatrix::new`].
pub const DENSITY_TOL: f64 = 1e-10;

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "subsystem dimensions must be non-empty and positive, got {dims:?}"
        )));
    }
    Ok(dims.iter().product())
}

/// Index bookkeeping for splitting a flattened index into kept and traced
/// parts.
struct Split {
    kept_dim: usize,
    traced_dim: usize,
    /// `full[k * traced_dim + t]` is the flattened index of (kept `k`, traced `t`).
    full: Vec<usize>,
}

impl Split {
    fn new(dims: &[usize], keep: &[usize]) -> Result<(Self, Vec<usize>)> {
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.len() != keep.len() || kept.iter().any(|&k| k >= dims.len()) {
            return Err(Error::InvalidSubsystems(format!(
                "keep set {keep:?} is not a set of distinct indices below {}",
                dims.len()
            )));
        }
        if kept.is_empty() || kept.len() == dims.len() {
            return Err(Error::InvalidSubsystems(format!(
                "keep set {keep:?} must be a non-empty proper subset of {} subsystems",
                dims.len()
            )));
        }
        let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();
        let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
        let kept_dim: usize = kept_dims.iter().product();
        let traced_dim: usize = traced_dims.iter().product();

        let strides = strides(dims);
        let kept_offsets = offsets(&kept, &kept_dims, &strides);
        let traced_offsets = offsets(&traced, &traced_dims, &strides);
        let mut full = Vec::with_capacity(kept_dim * traced_dim);
        for &ko in &kept_offsets {
            for &to in &traced_offsets {
                full.push(ko + to);
            }
        }
        Ok((
            Split {
                kept_dim,
                traced_dim,
                full,
            },
            kept_dims,
        ))
    }

    #[inline]
    fn index(&self, k: usize, t: usize) -> usize {
        self.full[k * self.traced_dim + t]
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Flattened offsets of every multi-index over `subsystems`, enumerated with
/// the last listed subsystem fastest.
fn offsets(subsystems: &[usize], sub_dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let total: usize = sub_dims.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; subsystems.len()];
    for _ in 0..total {
        out.push(
            subsystems
                .iter()
                .zip(&digits)
                .map(|(&s, &d)| d * strides[s])
                .sum(),
        );
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < sub_dims[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    out
}

/// Normalized state vector with explicit subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: ComplexVector,
}

impl PureState {
    /// Validates length and unit norm (within [`NORM_TOL`]).
    pub fn new(dims: Vec<usize>, amplitudes: ComplexVector) -> Result<Self> {
        Self::with_tolerance(dims, amplitudes, NORM_TOL)
    }

    pub fn with_tolerance(dims: Vec<usize>, amplitudes: ComplexVector, tol: f64) -> Result<Self> {
        let total = check_dims(&dims)?;
        if amplitudes.len() != total {
            return Err(Error::DimensionMismatch {
                expected: format!("{total} amplitudes for dims {dims:?}"),
                actual: format!("{}", amplitudes.len()),
            });
        }
        if !amplitudes
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState { dims, amplitudes })
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(dims: Vec<usize>, amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized(norm));
        }
        PureState::new(dims, amplitudes.unscale(norm))
    }

    pub fn from_slice(dims: Vec<usize>, amplitudes: &[C64]) -> Result<Self> {
        PureState::new(dims, ComplexVector::from_column_slice(amplitudes))
    }

    /// Computational basis state `|digits>`.
    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        let total = check_dims(&dims)?;
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(d, n)| d >= n) {
            return Err(Error::InvalidArgument(format!(
                "basis label {digits:?} does not fit dims {dims:?}"
            )));
        }
        let idx: usize = digits.iter().zip(strides(&dims)).map(|(d, s)| d * s).sum();
        let mut amps = ComplexVector::zeros(total);
        amps[idx] = c(1.0, 0.0);
        PureState::new(dims, amps)
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, amplitudes: ComplexVector) -> Self {
        PureState { dims, amplitudes }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> ComplexVector {
        self.amplitudes
    }

    /// Checks the `(2, 2, n)` layout and returns `n`.
    pub fn tripartite_n(&self) -> Result<usize> {
        match self.dims.as_slice() {
            [2, 2, n] => Ok(*n),
            other => Err(dims_mismatch("(2, 2, n)", other)),
        }
    }

    /// Tensor product `|self> ⊗ |other>`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState {
            dims,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// Reduced density matrix on `keep`, tracing out the rest.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (split, kept_dims) = Split::new(&self.dims, keep)?;
        Ok(DensityMatrix {
            dims: kept_dims,
            matrix: reduce_vector(&self.amplitudes, &split),
        })
    }

    /// `|<self|other>|^2`.
    pub fn overlap_sq(&self, other: &PureState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

fn reduce_vector(amps: &ComplexVector, split: &Split) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(split.kept_dim, split.kept_dim);
    for k1 in 0..split.kept_dim {
        for k2 in k1..split.kept_dim {
            let mut acc = ZERO;
            for t in 0..split.traced_dim {
                acc += amps[split.index(k1, t)] * amps[split.index(k2, t)].conj();
            }
            out[(k1, k2)] = acc;
            out[(k2, k1)] = acc.conj();
        }
    }
    out
}

/// Reduced matrix on `keep` of an unnormalized vector; used where the
/// measures are evaluated homogeneously on unnormalized branches.
pub fn reduce_unnormalized(
    dims: &[usize],
    amplitudes: &ComplexVector,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total = check_dims(dims)?;
    if amplitudes.len() != total {
        return Err(dims_mismatch(
            format!("{total} amplitudes"),
            &[amplitudes.len()],
        ));
    }
    let (split, _) = Split::new(dims, keep)?;
    Ok(reduce_vector(amplitudes, &split))
}

/// Hermitian, positive semidefinite, unit-trace matrix with subsystem dims.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates shape, Hermiticity, unit trace and positivity, all within
    /// [`DENSITY_TOL`].
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(dims, matrix, DENSITY_TOL)
    }

    pub fn with_tolerance(dims: Vec<usize>, matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let total = check_dims(&dims)?;
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimensionMismatch {
                expected: format!("{total}x{total} matrix for dims {dims:?}"),
                actual: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        if !is_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        let defect = hermiticity_defect(&matrix);
        if defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        let tr = real_trace(&matrix);
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidTrace(tr));
        }
        let eig = crate::linalg::herm_eig(&matrix)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::NotPositive(min));
        }
        Ok(DensityMatrix { dims, matrix })
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, matrix: ComplexMatrix) -> Self {
        DensityMatrix { dims, matrix }
    }

    /// Maximally mixed state `I / d`.
    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims)?;
        let matrix = ComplexMatrix::identity(total, total).unscale(total as f64);
        Ok(DensityMatrix { dims, matrix })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn is_two_qubit(&self) -> bool {
        self.matrix.nrows() == 4
    }

    pub fn tripartite_n(&self) -> Result<usize> {
        match self.dims.as_slice() {
            [2, 2, n] => Ok(*n),
            other => Err(dims_mismatch("(2, 2, n)", other)),
        }
    }

    pub fn eig(&self) -> Result<HermEig> {
        psd_eig(&self.matrix)
    }

    /// Number of eigenvalues above `cutoff`.
    pub fn numerical_rank(&self, cutoff: f64) -> Result<usize> {
        Ok(self.eig()?.values.iter().filter(|&&v| v > cutoff).count())
    }

    /// Reduced density matrix on the subsystems in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (split, kept_dims) = Split::new(&self.dims, keep)?;
        let mut out = ComplexMatrix::zeros(split.kept_dim, split.kept_dim);
        for k1 in 0..split.kept_dim {
            for k2 in 0..split.kept_dim {
                let mut acc = ZERO;
                for t in 0..split.traced_dim {
                    acc += self.matrix[(split.index(k1, t), split.index(k2, t))];
                }
                out[(k1, k2)] = acc;
            }
        }
        Ok(DensityMatrix {
            dims: kept_dims,
            matrix: out,
        })
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &DensityMatrix, weight: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::WeightOutOfRange(weight));
        }
        if self.dims != other.dims {
            return Err(dims_mismatch(format!("{:?}", self.dims), &other.dims));
        }
        Ok(DensityMatrix {
            dims: self.dims.clone(),
            matrix: self.matrix.scale(weight) + other.matrix.scale(1.0 - weight),
        })
    }

    /// Convex combination `sum_k w_k rho_k` (weights are renormalized).
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || total <= 0.0 {
            return Err(Error::InvalidArgument(
                "mixture weights must be non-negative".into(),
            ));
        }
        let mut matrix = ComplexMatrix::zeros(first.1.dim(), first.1.dim());
        for (w, rho) in parts {
            if rho.dims != first.1.dims {
                return Err(dims_mismatch(format!("{:?}", first.1.dims), &rho.dims));
            }
            matrix += rho.matrix.scale(w / total);
        }
        Ok(DensityMatrix {
            dims: first.1.dims.clone(),
            matrix,
        })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            dims,
            matrix: kron(&self.matrix, &other.matrix),
        }
    }
}

/// Vector of i.i.d. standard complex Gaussian entries.
pub fn gaussian_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> ComplexVector {
    ComplexVector::from_fn(len, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Matrix of i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random pure state: a normalized standard complex Gaussian vector.
pub fn haar_pure_with<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    let total = check_dims(dims)?;
    loop {
        let v = gaussian_vector(total, rng);
        let norm = v.norm();
        if norm > 0.0 {
            return Ok(PureState::from_parts_unchecked(
                dims.to_vec(),
                v.unscale(norm),
            ));
        }
    }
}

pub fn haar_pure(dims: &[usize], seed: u64) -> Result<PureState> {
    haar_pure_with(dims, &mut seeded(seed))
}

/// Random density of rank at most `rank`: a Haar pure state on
/// `dim x rank` with the ancilla traced out.
pub fn random_density_with<R: Rng + ?Sized>(
    dims: &[usize],
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let total = check_dims(dims)?;
    if rank == 0 || rank > total {
        return Err(Error::RankOutOfRange { rank, dim: total });
    }
    // amplitude matrix X (total x rank); rho = X X^dag
    let x = gaussian_matrix(total, rank, rng);
    let norm = x.norm();
    let x = x.unscale(norm);
    let matrix = crate::linalg::hermitian_part(&(&x * x.adjoint()));
    Ok(DensityMatrix::from_parts_unchecked(dims.to_vec(), matrix))
}

pub fn random_density(dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(dims, rank, &mut seeded(seed))
}

/// Haar-random unitary (QR of a complex Ginibre matrix with phase fix).
pub fn haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    crate::linalg::orthonormalize_columns(&gaussian_matrix(dim, dim, rng))
}
