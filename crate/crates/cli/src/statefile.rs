//! JSON state documents.
//!
//! ```json
//! { "kind": "pure", "dims": [2, 2, 2], "amplitudes": [[0.7071, 0], ...], "meta": {} }
//! ```
//!
//! Density documents carry `"matrix": [[[re, im], ...], ...]` in row-major
//! order instead. The last subsystem varies fastest in the flattened index.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use monogamy_core::{
    ComplexMatrix, ComplexVector, DensityMatrix, Error as CoreError, PureState, C64,
};

pub const FILE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Pure,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub kind: Kind,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    pub meta: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(PureState),
    Density(DensityMatrix),
}

impl State {
    pub fn dims(&self) -> &[usize] {
        match self {
            State::Pure(p) => p.dims(),
            State::Density(d) => d.dims(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedState {
    pub state: State,
    pub meta: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Error)]
pub enum StateFileError {
    #[error("malformed state file: {0}")]
    Syntax(String),
    #[error("dimension mismatch: {0}")]
    Dims(String),
    #[error("pure state is not normalized (norm {0})")]
    Normalization(f64),
    #[error("density matrix rejected: {0}")]
    Density(String),
}

impl StateFileError {
    /// Stable identifier, also printed by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            StateFileError::Syntax(_) => "E_SYNTAX",
            StateFileError::Dims(_) => "E_DIMS",
            StateFileError::Normalization(_) => "E_NORM",
            StateFileError::Density(_) => "E_DENSITY",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            StateFileError::Syntax(_) => 10,
            StateFileError::Dims(_) => 11,
            StateFileError::Normalization(_) => 12,
            StateFileError::Density(_) => 13,
        }
    }
}

fn from_core(err: CoreError) -> StateFileError {
    match err {
        CoreError::NotNormalized(norm) => StateFileError::Normalization(norm),
        CoreError::NotHermitian(_) | CoreError::NotPositive(_) | CoreError::InvalidTrace(_) => {
            StateFileError::Density(err.to_string())
        }
        CoreError::NonFinite => StateFileError::Syntax(err.to_string()),
        other => StateFileError::Dims(other.to_string()),
    }
}

fn entry(z: [f64; 2]) -> C64 {
    C64::new(z[0], z[1])
}

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

impl StateFile {
    pub fn into_state(self) -> Result<LoadedState, StateFileError> {
        let total: usize = self.dims.iter().product();
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(StateFileError::Dims(format!(
                "invalid dims {:?}",
                self.dims
            )));
        }
        let state = match (self.kind, self.amplitudes, self.matrix) {
            (Kind::Pure, Some(amps), None) => {
                if amps.len() != total {
                    return Err(StateFileError::Dims(format!(
                        "{} amplitudes for dims {:?} (expected {total})",
                        amps.len(),
                        self.dims
                    )));
                }
                let v = ComplexVector::from_iterator(total, amps.into_iter().map(entry));
                State::Pure(PureState::with_tolerance(self.dims, v, FILE_TOL).map_err(from_core)?)
            }
            (Kind::Density, None, Some(rows)) => {
                if rows.len() != total || rows.iter().any(|r| r.len() != total) {
                    return Err(StateFileError::Dims(format!(
                        "matrix is not {total}x{total} for dims {:?}",
                        self.dims
                    )));
                }
                let m = ComplexMatrix::from_fn(total, total, |i, j| entry(rows[i][j]));
                State::Density(
                    DensityMatrix::with_tolerance(self.dims, m, FILE_TOL).map_err(from_core)?,
                )
            }
            (Kind::Pure, ..) => {
                return Err(StateFileError::Syntax(
                    "pure documents need `amplitudes` and no `matrix`".into(),
                ))
            }
            (Kind::Density, ..) => {
                return Err(StateFileError::Syntax(
                    "density documents need `matrix` and no `amplitudes`".into(),
                ))
            }
        };
        Ok(LoadedState {
            state,
            meta: self.meta,
        })
    }

    pub fn from_state(state: &State, meta: BTreeMap<String, serde_json::Value>) -> Self {
        match state {
            State::Pure(p) => StateFile {
                kind: Kind::Pure,
                dims: p.dims().to_vec(),
                amplitudes: Some(p.amplitudes().iter().map(pair).collect()),
                matrix: None,
                meta,
            },
            State::Density(d) => {
                let m = d.matrix();
                StateFile {
                    kind: Kind::Density,
                    dims: d.dims().to_vec(),
                    amplitudes: None,
                    matrix: Some(
                        (0..m.nrows())
                            .map(|i| (0..m.ncols()).map(|j| pair(&m[(i, j)])).collect())
                            .collect(),
                    ),
                    meta,
                }
            }
        }
    }
}

pub fn parse_state_file(text: &str) -> Result<LoadedState, StateFileError> {
    let doc: StateFile =
        serde_json::from_str(text).map_err(|e| StateFileError::Syntax(e.to_string()))?;
    doc.into_state()
}

pub fn serialize_state(state: &State, meta: BTreeMap<String, serde_json::Value>) -> String {
    serde_json::to_string_pretty(&StateFile::from_state(state, meta)).expect("plain data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use monogamy_core::fixtures;

    #[test]
    fn ghz_document_places_amplitudes_at_corners() {
        let text = serialize_state(&State::Pure(fixtures::ghz()), BTreeMap::new());
        let loaded = parse_state_file(&text).unwrap();
        let State::Pure(psi) = loaded.state else {
            panic!("expected a pure state")
        };
        assert_eq!(psi.dims(), &[2, 2, 2]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (i, a) in psi.amplitudes().iter().enumerate() {
            let want = if i == 0 || i == 7 { h } else { 0.0 };
            assert!((a.re - want).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn short_norm_is_a_normalization_error() {
        let s = 0.9_f64.sqrt();
        let text =
            format!(r#"{{"kind":"pure","dims":[2,2,1],"amplitudes":[[{s},0],[0,0],[0,0],[0,0]]}}"#);
        let err = parse_state_file(&text).unwrap_err();
        assert_eq!(err.code(), "E_NORM");
    }

    #[test]
    fn error_codes_are_distinct() {
        let cases = [
            ("{not json", "E_SYNTAX"),
            (
                r#"{"kind":"pure","dims":[2,2,2],"amplitudes":[[1,0]]}"#,
                "E_DIMS",
            ),
            (
                r#"{"kind":"pure","dims":[2],"amplitudes":[[1,0],[1,0]]}"#,
                "E_NORM",
            ),
            (
                r#"{"kind":"density","dims":[2],"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#,
                "E_DENSITY",
            ),
            (
                r#"{"kind":"density","dims":[2],"matrix":[[[2,0],[0,0]],[[0,0],[-1,0]]]}"#,
                "E_DENSITY",
            ),
            (
                r#"{"kind":"density","dims":[2],"amplitudes":[[1,0],[0,0]]}"#,
                "E_SYNTAX",
            ),
        ];
        for (text, code) in cases {
            assert_eq!(parse_state_file(text).unwrap_err().code(), code, "{text}");
        }
    }

    #[test]
    fn tolerance_is_one_part_in_1e8() {
        let a = (1.0 + 5e-9_f64).sqrt();
        let text = format!(r#"{{"kind":"pure","dims":[2],"amplitudes":[[{a},0],[0,0]]}}"#);
        assert!(parse_state_file(&text).is_ok());
    }
}
