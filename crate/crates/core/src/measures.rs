//! Two-qubit entanglement measures: the spin-flipped spectrum, concurrence,
//! concurrence of assistance and the tangle built from them.
//!
//! Every `*_of` function takes a raw 4x4 positive semidefinite matrix and is
//! homogeneous of degree one, so `f(s * rho) = s * f(rho)` for `s >= 0`. The
//! local-filter identities `C(M rho M^dag) = |det M| C(rho)` are stated for
//! unnormalized branches, which is why trace one is never required here.

use std::sync::OnceLock;

use crate::error::{dims_mismatch, Error, Result};
use crate::linalg::{
    hermitian_part, kron, pauli_y, psd_sqrt, real_trace, singular_values, ComplexMatrix, C64,
};
use crate::state::{DensityMatrix, PureState};

/// Spectrum entries (and concurrences) below this fraction of the input
/// trace are round-off and reported as exact zeros.
pub const LAMBDA_FLOOR: f64 = 1e-13;
/// Slightly negative spectrum values within this bound clamp to zero.
pub const LAMBDA_CLAMP: f64 = 1e-9;

fn sigma_yy() -> &'static ComplexMatrix {
    static YY: OnceLock<ComplexMatrix> = OnceLock::new();
    YY.get_or_init(|| kron(&pauli_y(), &pauli_y()))
}

fn check_two_qubit(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != 4 || m.ncols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: "4x4 two-qubit matrix".into(),
            actual: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

fn check_density(rho: &DensityMatrix) -> Result<&ComplexMatrix> {
    match rho.dims() {
        [2, 2] | [4] => Ok(rho.matrix()),
        other => Err(dims_mismatch("two-qubit dims (2, 2)", other)),
    }
}

/// The four `λ_i`, non-negative and in decreasing order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSpectrum([f64; 4]);

impl LambdaSpectrum {
    /// Sorts descending; values in `[-LAMBDA_CLAMP, 0)` clamp to zero.
    pub fn new(mut values: [f64; 4]) -> Result<Self> {
        for v in values.iter_mut() {
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            if *v < -LAMBDA_CLAMP {
                return Err(Error::NotPositive(*v));
            }
            *v = v.max(0.0);
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(LambdaSpectrum(values))
    }

    pub fn values(&self) -> [f64; 4] {
        self.0
    }

    pub fn largest(&self) -> f64 {
        self.0[0]
    }

    /// `λ₂ + λ₃ + λ₄`.
    pub fn rest(&self) -> f64 {
        self.0[1] + self.0[2] + self.0[3]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `max{0, λ₁ − λ₂ − λ₃ − λ₄}`.
    pub fn concurrence(&self) -> f64 {
        (self.largest() - self.rest()).max(0.0)
    }

    /// The piecewise closed form: `Σλ` when `λ₁ ≤ λ₂+λ₃+λ₄`, otherwise
    /// `2 sqrt(λ₁ (λ₂+λ₃+λ₄))`.
    pub fn tangle_closed_form(&self) -> f64 {
        let (l1, rest) = (self.largest(), self.rest());
        if l1 <= rest {
            l1 + rest
        } else {
            2.0 * (l1 * rest).sqrt()
        }
    }
}

/// Concurrence `C`, concurrence of assistance `C_a` and tangle `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureTriple {
    pub concurrence: f64,
    pub coa: f64,
    pub tangle: f64,
}

impl MeasureTriple {
    /// `|C_a² − C² − τ²|`.
    pub fn pythagorean_residual(&self) -> f64 {
        (self.coa * self.coa - self.concurrence * self.concurrence - self.tangle * self.tangle)
            .abs()
    }

    pub fn max_abs_diff(&self, other: &MeasureTriple) -> f64 {
        (self.concurrence - other.concurrence)
            .abs()
            .max((self.coa - other.coa).abs())
            .max((self.tangle - other.tangle).abs())
    }
}

/// `(σ_y ⊗ σ_y) m* (σ_y ⊗ σ_y)` for any 4x4 matrix.
pub fn spin_flip_of(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_two_qubit(m)?;
    let yy = sigma_yy();
    Ok(yy * m.conjugate() * yy)
}

pub fn spin_flip(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    spin_flip_of(check_density(rho)?)
}

/// `λ_i` of a PSD 4x4 matrix, taken as the singular values of
/// `sqrt(m) (σ_y ⊗ σ_y) sqrt(m)*`. Their squares are the eigenvalues of the
/// Hermitian form `sqrt(m) m̃ sqrt(m)`; going through the singular values
/// keeps zero entries at round-off level instead of its square root.
pub fn lambda_spectrum_of(m: &ComplexMatrix) -> Result<LambdaSpectrum> {
    check_two_qubit(m)?;
    let root = psd_sqrt(m)?;
    let product = &root * sigma_yy() * root.conjugate();
    let sv = singular_values(&product);
    let floor = LAMBDA_FLOOR * real_trace(m).max(0.0);
    let mut values = [0.0; 4];
    for (slot, s) in values.iter_mut().zip(sv) {
        *slot = if s <= floor { 0.0 } else { s };
    }
    LambdaSpectrum::new(values)
}

pub fn lambda_spectrum(rho: &DensityMatrix) -> Result<LambdaSpectrum> {
    lambda_spectrum_of(check_density(rho)?)
}

fn floored_concurrence(spectrum: &LambdaSpectrum, trace: f64) -> f64 {
    let value = spectrum.concurrence();
    if value <= LAMBDA_FLOOR * trace.max(0.0) {
        0.0
    } else {
        value
    }
}

/// Wootters concurrence of a (possibly unnormalized) PSD 4x4 matrix.
pub fn concurrence_of(m: &ComplexMatrix) -> Result<f64> {
    let spectrum = lambda_spectrum_of(m)?;
    Ok(floored_concurrence(&spectrum, real_trace(m)))
}

pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    concurrence_of(check_density(rho)?)
}

/// Concurrence of assistance as `Σ λ_i`.
pub fn coa_of(m: &ComplexMatrix) -> Result<f64> {
    Ok(lambda_spectrum_of(m)?.sum())
}

pub fn coa(rho: &DensityMatrix) -> Result<f64> {
    coa_of(check_density(rho)?)
}

/// Concurrence of assistance as `tr sqrt(sqrt(m) m̃ sqrt(m))`, evaluated
/// through eigendecompositions only (independent of [`coa_of`]).
pub fn coa_trace_sqrt_of(m: &ComplexMatrix) -> Result<f64> {
    let flipped = spin_flip_of(m)?;
    let root = psd_sqrt(m)?;
    let inner = hermitian_part(&(&root * flipped * &root));
    Ok(real_trace(&psd_sqrt(&inner)?))
}

pub fn coa_trace_sqrt(rho: &DensityMatrix) -> Result<f64> {
    coa_trace_sqrt_of(check_density(rho)?)
}

/// Tangle through the piecewise closed form in `λ`.
pub fn tau_formula_of(m: &ComplexMatrix) -> Result<f64> {
    Ok(lambda_spectrum_of(m)?.tangle_closed_form())
}

pub fn tau_formula(rho: &DensityMatrix) -> Result<f64> {
    tau_formula_of(check_density(rho)?)
}

/// All three measures from a single spectrum; `τ = sqrt(max{0, C_a² − C²})`.
pub fn measures_of(m: &ComplexMatrix) -> Result<MeasureTriple> {
    let spectrum = lambda_spectrum_of(m)?;
    let concurrence = floored_concurrence(&spectrum, real_trace(m));
    let coa = spectrum.sum();
    let tangle = (coa * coa - concurrence * concurrence).max(0.0).sqrt();
    Ok(MeasureTriple {
        concurrence,
        coa,
        tangle,
    })
}

pub fn measures(rho: &DensityMatrix) -> Result<MeasureTriple> {
    measures_of(check_density(rho)?)
}

/// Tangle `sqrt(max{0, C_a² − C²})` of a raw PSD 4x4 matrix.
pub fn tangle_of(m: &ComplexMatrix) -> Result<f64> {
    Ok(measures_of(m)?.tangle)
}

/// `2 |ad − bc|` for `a|00> + b|01> + c|10> + d|11>`, unnormalized input
/// allowed (degree two in the amplitudes).
pub fn pure_concurrence_amplitudes(v: &[C64]) -> f64 {
    debug_assert_eq!(v.len(), 4);
    2.0 * (v[0] * v[3] - v[1] * v[2]).norm()
}

pub fn pure_concurrence(phi: &PureState) -> Result<f64> {
    match phi.dims() {
        [2, 2] | [4] => Ok(pure_concurrence_amplitudes(phi.amplitudes().as_slice())),
        other => Err(dims_mismatch("two-qubit dims (2, 2)", other)),
    }
}

/// `ρ_AB = Tr_C |Ψ><Ψ|` of a `(2, 2, n)` pure state.
pub fn reduced_ab(psi: &PureState) -> Result<DensityMatrix> {
    psi.tripartite_n()?;
    psi.reduce(&[0, 1])
}

/// `(C, C_a, τ)` of the Alice-Bob reduction of a `(2, 2, n)` pure state.
pub fn triple_measures(psi: &PureState) -> Result<MeasureTriple> {
    measures(&reduced_ab(psi)?)
}
