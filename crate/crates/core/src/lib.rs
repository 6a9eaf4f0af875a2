//! Concurrence, concurrence of assistance and the genuine tripartite tangle
//! for `2 ⊗ 2 ⊗ n` quantum states, with the machinery to check the
//! Pythagorean monogamy relation `C_a² = C² + τ²` numerically.
//!
//! Layout:
//! - [`linalg`], [`state`]: dense complex kernels, pure and mixed states.
//! - [`measures`]: spin flip, `λ` spectrum, `C`, `C_a`, `τ`.
//! - [`locc`]: Kraus channels, Charlie-assisted POVMs, monotonicity trials.
//! - [`roof`]: decompositions of mixed states and convex-roof search.
//! - [`monogamy`]: verification of the monogamy relations and qubit groupings.

// `!(x <= tol)` is deliberate: NaN must fail tolerance checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod locc;
pub mod measures;
pub mod monogamy;
pub mod rng;
pub mod roof;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, C64};
pub use measures::{LambdaSpectrum, MeasureTriple};
pub use state::{DensityMatrix, PureState};
