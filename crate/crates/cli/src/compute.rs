use monogamy_core::fixtures::{self, Fixture};
use monogamy_core::measures::{self, MeasureTriple};
use monogamy_core::monogamy::{
    group_qubits, grouping_sweep, triangle_classify, verify_theorem1, GroupingSpec,
};
use monogamy_core::{Error, PureState, Result};

use crate::report::ReportRow;
use crate::statefile::State;

fn row(
    state_id: &str,
    n: usize,
    grouping: String,
    triple: MeasureTriple,
    residual: f64,
) -> Result<ReportRow> {
    Ok(ReportRow {
        state_id: state_id.to_string(),
        n,
        grouping,
        concurrence: triple.concurrence,
        coa: triple.coa,
        tau: triple.tangle,
        residual,
        classification: triangle_classify(&triple)?.class.as_str().to_string(),
        seed: None,
    })
}

fn qubit_count(dims: &[usize]) -> Option<usize> {
    (dims.len() >= 3 && dims.iter().all(|&d| d == 2)).then_some(dims.len())
}

fn pure_row(state_id: &str, psi: &PureState, grouping: String) -> Result<ReportRow> {
    let check = verify_theorem1(psi)?;
    row(
        state_id,
        psi.tripartite_n()?,
        grouping,
        check.triple,
        check.residual,
    )
}

/// Rows for `compute`.
///
/// A `(2, 2, n)` pure state gives one row. An N-qubit pure state with a
/// grouping gives the row for that pair, and without one the rows for every
/// pair once N ≥ 4. Density inputs report the two-qubit quantities of
/// `ρ_AB`, which coincide with those of any purification.
pub fn compute_rows(
    state_id: &str,
    state: &State,
    grouping: Option<(usize, usize)>,
) -> Result<Vec<ReportRow>> {
    match (state, grouping) {
        (State::Pure(psi), Some((i, j))) => {
            let qubits = qubit_count(psi.dims()).ok_or_else(|| {
                Error::InvalidGrouping(format!(
                    "groupings need an N-qubit state with N >= 3, got dims {:?}",
                    psi.dims()
                ))
            })?;
            let spec = GroupingSpec::new(qubits, i, j)?;
            let grouped = group_qubits(psi, &spec)?;
            Ok(vec![pure_row(state_id, &grouped, spec.label())?])
        }
        (State::Pure(psi), None) => {
            if matches!(psi.dims(), [2, 2, _]) {
                return Ok(vec![pure_row(state_id, psi, "(0;1)".into())?]);
            }
            if qubit_count(psi.dims()).is_some() {
                return grouping_sweep(psi)?
                    .into_iter()
                    .map(|r| {
                        row(
                            state_id,
                            1 << r.spec.rest.len(),
                            r.spec.label(),
                            r.triple,
                            r.theorem1_residual,
                        )
                    })
                    .collect();
            }
            Err(Error::DimensionMismatch {
                expected: "dims (2, 2, n) or an N-qubit state".into(),
                actual: format!("{:?}", psi.dims()),
            })
        }
        (State::Density(rho), None) => {
            let (n, rho_ab) = match rho.dims() {
                [2, 2] => (1, rho.clone()),
                [2, 2, n] => (*n, rho.partial_trace(&[0, 1])?),
                other => {
                    return Err(Error::DimensionMismatch {
                        expected: "dims (2, 2) or (2, 2, n)".into(),
                        actual: format!("{other:?}"),
                    })
                }
            };
            let triple = measures::measures(&rho_ab)?;
            let trace_path = measures::coa_trace_sqrt(&rho_ab)?;
            let residual =
                (trace_path * trace_path - triple.concurrence.powi(2) - triple.tangle.powi(2))
                    .abs();
            Ok(vec![row(state_id, n, "(0;1)".into(), triple, residual)?])
        }
        (State::Density(_), Some(_)) => Err(Error::InvalidGrouping(
            "groupings apply to pure states only".into(),
        )),
    }
}

fn fixture_rows(f: &Fixture) -> Result<Vec<ReportRow>> {
    compute_rows(f.name, &State::Pure(f.state.clone()), None)
}

/// Rows for the built-in fixture library, in library order.
pub fn fixture_report() -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for f in fixtures::library() {
        rows.extend(fixture_rows(&f)?);
    }
    Ok(rows)
}
