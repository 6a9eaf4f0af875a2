//! Reference states with known measure values.

use crate::linalg::{c, ComplexVector};
use crate::measures::MeasureTriple;
use crate::state::PureState;

/// A named reference state with its expected `(C, C_a, τ)` for the Alice-Bob
/// pair `(0, 1)`.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub state: PureState,
    pub expected: MeasureTriple,
    /// How `expected` was obtained.
    pub derivation: &'static str,
}

fn from_real(dims: Vec<usize>, entries: &[(usize, f64)]) -> PureState {
    let total: usize = dims.iter().product();
    let mut amps = ComplexVector::zeros(total);
    for &(idx, value) in entries {
        amps[idx] = c(value, 0.0);
    }
    PureState::normalized(dims, amps).expect("fixture amplitudes are non-zero")
}

/// `(|000> + |111>) / sqrt(2)`.
pub fn ghz() -> PureState {
    ghz_qubits(3)
}

/// N-qubit GHZ state.
pub fn ghz_qubits(n: usize) -> PureState {
    let last = (1usize << n) - 1;
    from_real(vec![2; n], &[(0, 1.0), (last, 1.0)])
}

/// `(|001> + |010> + |100>) / sqrt(3)`.
pub fn w_state() -> PureState {
    w_qubits(3)
}

/// N-qubit W state.
pub fn w_qubits(n: usize) -> PureState {
    let entries: Vec<(usize, f64)> = (0..n).map(|k| (1usize << k, 1.0)).collect();
    from_real(vec![2; n], &entries)
}

/// `cos θ |000> + sin θ |111>`.
pub fn generalized_ghz(theta: f64) -> PureState {
    let amps = ComplexVector::from_fn(8, |i, _| match i {
        0 => c(theta.cos(), 0.0),
        7 => c(theta.sin(), 0.0),
        _ => c(0.0, 0.0),
    });
    PureState::normalized(vec![2, 2, 2], amps).expect("non-zero")
}

/// `|Φ⁺>_AB ⊗ |0>_C`.
pub fn bell_times_zero() -> PureState {
    from_real(vec![2, 2, 2], &[(0, 1.0), (6, 1.0)])
}

/// `|Φ⁺>_01 ⊗ |Φ⁺>_23` on four qubits.
pub fn bell_bell() -> PureState {
    let bell = from_real(vec![2, 2], &[(0, 1.0), (3, 1.0)]);
    bell.tensor(&bell)
}

/// `|000>`.
pub fn product_000() -> PureState {
    from_real(vec![2, 2, 2], &[(0, 1.0)])
}

fn triple(concurrence: f64, coa: f64, tangle: f64) -> MeasureTriple {
    MeasureTriple {
        concurrence,
        coa,
        tangle,
    }
}

/// The shipped fixture library.
pub fn library() -> Vec<Fixture> {
    let theta = std::f64::consts::FRAC_PI_6;
    let g = (2.0 * theta).sin();
    vec![
        Fixture {
            name: "ghz",
            state: ghz(),
            expected: triple(0.0, 1.0, 1.0),
            derivation: "reduced state diag(1/2,0,0,1/2): lambda = (1/2,1/2,0,0)",
        },
        Fixture {
            name: "w",
            state: w_state(),
            expected: triple(2.0 / 3.0, 2.0 / 3.0, 0.0),
            derivation: "reduced state (1/3)|00><00| + (2/3)|psi+><psi+|: lambda = (2/3,0,0,0)",
        },
        Fixture {
            name: "ggz-pi6",
            state: generalized_ghz(theta),
            expected: triple(0.0, g, g),
            derivation: "lambda = (sin t cos t, sin t cos t, 0, 0) at t = pi/6",
        },
        Fixture {
            name: "bell-zero",
            state: bell_times_zero(),
            expected: triple(1.0, 1.0, 0.0),
            derivation: "Charlie factorizes out of a Bell pair",
        },
        Fixture {
            name: "bell-bell",
            state: bell_bell(),
            expected: triple(1.0, 1.0, 0.0),
            derivation: "pair (0,1) is a Bell pair, qubits 2 and 3 factorize",
        },
        Fixture {
            name: "product",
            state: product_000(),
            expected: triple(0.0, 0.0, 0.0),
            derivation: "product state",
        },
    ]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    library().into_iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_layout_uses_charlie_fastest_indexing() {
        let amps = ghz().into_amplitudes();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((amps[0].re - h).abs() < 1e-15 && (amps[7].re - h).abs() < 1e-15);
        // |001> is Charlie's bit set, index 1
        let w = w_state().into_amplitudes();
        for idx in [1, 2, 4] {
            assert!((w[idx].re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn library_names_are_unique() {
        let lib = library();
        for (i, a) in lib.iter().enumerate() {
            assert!(lib[i + 1..].iter().all(|b| b.name != a.name));
        }
    }
}
