//! Seeded verification suites. Every trial draws from its own
//! `(seed, trial)` stream, so results do not depend on thread scheduling.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use monogamy_core::locc::{
    coa_oracle_search, concavity_trial, det_scaling_residual, monotonicity_trial,
    sample_local_channel_with, Side,
};
use monogamy_core::measures::{self, MeasureTriple};
use monogamy_core::monogamy::{verify_theorem1, Theorem2Row};
use monogamy_core::rng::trial_rng;
use monogamy_core::roof::{
    chain_residual, roof_extremize, sample_decomposition_with, Direction, RoofFunctional,
};
use monogamy_core::state::{gaussian_matrix, haar_pure_with, random_density_with};

use crate::report::ReportRow;

pub const THEOREM1_TOL: f64 = 1e-9;
pub const MONOTONE_TOL: f64 = 1e-9;
pub const CONCAVITY_TOL: f64 = 1e-9;
pub const DET_SCALING_TOL: f64 = 1e-9;
pub const ORACLE_MIN_GAP: f64 = -1e-9;
pub const ORACLE_MAX_GAP: f64 = 1e-2;
pub const ROOF_PURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Theorem1,
    Monotonicity,
    Concavity,
    Chain,
    DetScaling,
    Oracle,
    Roof,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Theorem1,
        Suite::Monotonicity,
        Suite::Concavity,
        Suite::Chain,
        Suite::DetScaling,
        Suite::Oracle,
        Suite::Roof,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::Monotonicity => "monotonicity",
            Suite::Concavity => "concavity",
            Suite::Chain => "chain",
            Suite::DetScaling => "det-scaling",
            Suite::Oracle => "oracle",
            Suite::Roof => "roof",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown suite `{0}` (expected one of theorem1, monotonicity, concavity, chain, det-scaling, oracle, roof)")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteParams {
    /// Per `n` for `theorem1`; in total for the other suites.
    pub trials: usize,
    pub seed: u64,
    pub n_min: usize,
    pub n_max: usize,
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub rows: Vec<ReportRow>,
    pub violations: usize,
    pub max_residual: f64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Trial {
    id: String,
    n: usize,
    triple: MeasureTriple,
    residual: f64,
    violation: bool,
}

fn verdict(violation: bool) -> &'static str {
    if violation {
        "violation"
    } else {
        "pass"
    }
}

fn n_for(params: &SuiteParams, k: usize) -> usize {
    params.n_min + k % (params.n_max - params.n_min + 1)
}

fn theorem1(params: &SuiteParams, n: usize, k: usize) -> monogamy_core::Result<Trial> {
    let mut rng = trial_rng(params.seed.wrapping_add(n as u64), k as u64);
    let psi = haar_pure_with(&[2, 2, n], &mut rng)?;
    let check = verify_theorem1(&psi)?;
    Ok(Trial {
        id: format!("haar-n{n}-{k}"),
        n,
        triple: check.triple,
        residual: check.residual,
        violation: !(check.residual < THEOREM1_TOL),
    })
}

fn monotonicity(params: &SuiteParams, k: usize) -> monogamy_core::Result<Trial> {
    let mut rng = trial_rng(params.seed, k as u64);
    let n = n_for(params, k);
    let psi = haar_pure_with(&[2, 2, n], &mut rng)?;
    let alice = sample_local_channel_with(rng.random_range(2..=4), &mut rng)?;
    let bob = sample_local_channel_with(rng.random_range(2..=4), &mut rng)?;
    let out = monotonicity_trial(&psi, &alice, &bob)?;
    let increase = out.tau_after_avg - out.tau_before;
    let prob_err = (out.total_probability - 1.0).abs();
    Ok(Trial {
        id: format!("monotonicity-{k}"),
        n,
        triple: measures::triple_measures(&psi)?,
        residual: increase.max(0.0),
        violation: !(increase <= MONOTONE_TOL && prob_err <= MONOTONE_TOL),
    })
}

// two-qubit rows carry n = 1: they are the (2, 2, 1) case
fn concavity(params: &SuiteParams, k: usize) -> monogamy_core::Result<Trial> {
    let mut rng = trial_rng(params.seed, k as u64);
    let r1 = random_density_with(&[2, 2], rng.random_range(1..=4), &mut rng)?;
    let r2 = random_density_with(&[2, 2], rng.random_range(1..=4), &mut rng)?;
    let lambda: f64 = rng.random();
    let out = concavity_trial(&r1, &r2, lambda)?;
    let excess = out.lhs - out.rhs;
    Ok(Trial {
        id: format!("concavity-{k}"),
        n: 1,
        triple: measures::measures(&r1.mix(&r2, lambda)?)?,
        residual: excess.max(0.0),
        violation: !(excess <= CONCAVITY_TOL),
    })
}

fn chain(params: &SuiteParams, k: usize) -> monogamy_core::Result<Trial> {
    let mut rng = trial_rng(params.seed, k as u64);
    let n = n_for(params, k);
    let rank = rng.random_range(1..=4.min(4 * n));
    let rho = random_density_with(&[2, 2, n], rank, &mut rng)?;
    let size = rng.random_range(rank..=2 * rank);
    let d = sample_decomposition_with(&rho, size, &mut rng)?;
    let out = chain_residual(&rho, &d)?;
    let c = measures::concurrence(&rho.partial_trace(&[0, 1])?)?;
    Ok(Trial {
        id: format!("chain-{k}"),
        n,
        triple: MeasureTriple {
            concurrence: c,
            coa: (out.radicand + c * c).max(0.0).sqrt(),
            tangle: out.lhs,
        },
        residual: out.excess().max(0.0),
        violation: !out.holds,
    })
}

fn det_scaling(params: &SuiteParams, k: usize) -> monogamy_core::Result<Trial> {
    let mut rng = trial_rng(params.seed, k as u64);
    let rho = random_density_with(&[2, 2], rng.random_range(1..=4), &mut rng)?;
    let m = gaussian_matrix(2, 2, &mut rng);
    let side = if k.is_multiple_of(2) {
        Side::Alice
    } else {
        Side::Bob
    };
    let r = det_scaling_residual(&rho, &m, side)?;
    let residual = r.concurrence.max(r.coa);
    Ok(Trial {
        id: format!("det-scaling-{k}"),
        n: 1,
        triple: measures::measures(&rho)?,
        residual,
        violation: !(residual < DET_SCALING_TOL),
    })
}

fn oracle(params: &SuiteParams, k: usize) -> monogamy_core::Result<Trial> {
    let mut rng = trial_rng(params.seed, k as u64);
    let n = n_for(params, k);
    let psi = haar_pure_with(&[2, 2, n], &mut rng)?;
    let triple = measures::triple_measures(&psi)?;
    let found = coa_oracle_search(&psi, 4, rng.random())?;
    let gap = triple.coa - found;
    Ok(Trial {
        id: format!("oracle-{k}"),
        n,
        triple,
        residual: gap.abs(),
        violation: !(ORACLE_MIN_GAP..=ORACLE_MAX_GAP).contains(&gap),
    })
}

fn roof(params: &SuiteParams, k: usize) -> monogamy_core::Result<Trial> {
    let mut rng = trial_rng(params.seed, k as u64);
    let n = n_for(params, k);
    let psi = haar_pure_with(&[2, 2, n], &mut rng)?;
    let triple = measures::triple_measures(&psi)?;
    let rho = psi.projector();
    let roof_seed: u64 = rng.random();
    let tau = roof_extremize(
        &rho,
        RoofFunctional::Tangle,
        Direction::Min,
        2,
        2,
        roof_seed,
    )?;
    let coa = roof_extremize(&rho, RoofFunctional::Coa, Direction::Min, 2, 2, roof_seed)?;
    let residual = (tau.value - triple.tangle)
        .abs()
        .max((coa.value - triple.coa).abs());
    Ok(Trial {
        id: format!("roof-{k}"),
        n,
        triple,
        residual,
        violation: !(residual < ROOF_PURE_TOL),
    })
}

pub fn run_suite(suite: Suite, params: &SuiteParams) -> monogamy_core::Result<SuiteOutcome> {
    if params.n_min < 1 || params.n_min > params.n_max {
        return Err(monogamy_core::Error::InvalidArgument(format!(
            "n range {}..={} is empty",
            params.n_min, params.n_max
        )));
    }
    let trials: Vec<monogamy_core::Result<Trial>> = match suite {
        Suite::Theorem1 => (params.n_min..=params.n_max)
            .flat_map(|n| (0..params.trials).map(move |k| (n, k)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(n, k)| theorem1(params, n, k))
            .collect(),
        _ => {
            let run = match suite {
                Suite::Monotonicity => monotonicity,
                Suite::Concavity => concavity,
                Suite::Chain => chain,
                Suite::DetScaling => det_scaling,
                Suite::Oracle => oracle,
                Suite::Roof => roof,
                Suite::Theorem1 => unreachable!(),
            };
            (0..params.trials)
                .into_par_iter()
                .map(|k| run(params, k))
                .collect()
        }
    };
    let mut rows = Vec::with_capacity(trials.len());
    let mut violations = 0;
    let mut max_residual = 0.0_f64;
    for trial in trials {
        let t = trial?;
        violations += usize::from(t.violation);
        max_residual = max_residual.max(t.residual);
        rows.push(ReportRow {
            state_id: t.id,
            n: t.n,
            grouping: "(0;1)".into(),
            concurrence: t.triple.concurrence,
            coa: t.triple.coa,
            tau: t.triple.tangle,
            residual: t.residual,
            classification: verdict(t.violation).into(),
            seed: Some(params.seed),
        });
    }
    Ok(SuiteOutcome {
        suite,
        rows,
        violations,
        max_residual,
    })
}

/// Report row for one mixed-family point: `C` is exact, `Ca` and `tau` are
/// min-roof upper bounds, `residual` is the worst chain excess.
pub fn family_row(row: &Theorem2Row, seed: u64) -> ReportRow {
    ReportRow {
        state_id: format!(
            "{}@{}",
            row.family.name(),
            crate::report::format_float(row.param)
        ),
        n: 2,
        grouping: "(0;1)".into(),
        concurrence: row.concurrence,
        coa: row.coa_roof,
        tau: row.tau_roof,
        residual: row.max_chain_excess.max(0.0),
        classification: if row.flagged { "flagged" } else { "pass" }.into(),
        seed: Some(seed),
    }
}
