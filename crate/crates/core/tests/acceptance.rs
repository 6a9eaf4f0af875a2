//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line with the
//! measured statistic; run with `--nocapture` to see them all.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use monogamy_core::fixtures;
use monogamy_core::locc::{
    coa_oracle_search, concavity_trial, det_scaling_residual, monotonicity_trial,
    sample_local_channel_with, Side,
};
use monogamy_core::measures::{self, MeasureTriple};
use monogamy_core::monogamy::{
    grouping_sweep, unit_grid, verify_theorem1, verify_theorem2_family, Family, Theorem2Config,
};
use monogamy_core::rng::trial_rng;
use monogamy_core::roof::{
    chain_residual, roof_extremize, roof_extremize_with, sample_decomposition_with, Direction,
    RoofConfig, RoofFunctional,
};
use monogamy_core::state::{
    gaussian_matrix, haar_pure_with, haar_unitary_with, random_density_with, DensityMatrix,
};

const SEED: u64 = 20_240_601;

fn verdict(id: u32, name: &str, pass: bool, detail: String, elapsed: Duration, budget: Duration) {
    let in_time = elapsed <= budget;
    println!(
        "[{}] criterion {id:>2} {name}: {detail} ({:.2?} of {:?} budget)",
        if pass && in_time { "PASS" } else { "FAIL" },
        elapsed,
        budget
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
    assert!(
        in_time,
        "criterion {id} ({name}) over budget: {elapsed:?} > {budget:?}"
    );
}

fn triple(concurrence: f64, coa: f64, tangle: f64) -> MeasureTriple {
    MeasureTriple {
        concurrence,
        coa,
        tangle,
    }
}

#[test]
fn criterion_01_ghz_fixture() {
    let start = Instant::now();
    let got = measures::triple_measures(&fixtures::ghz()).unwrap();
    let err = got.max_abs_diff(&triple(0.0, 1.0, 1.0));
    verdict(
        1,
        "GHZ (C, Ca, tau) = (0, 1, 1)",
        err < 1e-12,
        format!("max error {err:.2e}"),
        start.elapsed(),
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_02_w_fixture() {
    let start = Instant::now();
    let got = measures::triple_measures(&fixtures::w_state()).unwrap();
    let two_thirds = 2.0 / 3.0;
    let err = got.max_abs_diff(&triple(two_thirds, two_thirds, 0.0));
    verdict(
        2,
        "W (C, Ca, tau) = (2/3, 2/3, 0)",
        err < 1e-12,
        format!("max error {err:.2e}"),
        start.elapsed(),
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_03_theorem1_sweep() {
    let start = Instant::now();
    let trials = 10_000u64;
    let mut worst = 0.0_f64;
    for n in 2..=8usize {
        let residual = (0..trials)
            .into_par_iter()
            .map(|k| {
                let mut rng = trial_rng(SEED + n as u64, k);
                let psi = haar_pure_with(&[2, 2, n], &mut rng).unwrap();
                let check = verify_theorem1(&psi).unwrap();
                // the primary triple must agree with the three-path one as well
                let primary = measures::triple_measures(&psi).unwrap();
                check.residual.max(primary.pythagorean_residual())
            })
            .reduce(|| 0.0, f64::max);
        println!("    n = {n}: max residual {residual:.3e}");
        worst = worst.max(residual);
    }
    let qubit = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(SEED, 1_000_000 + k);
            let psi = haar_pure_with(&[2, 2, 2], &mut rng).unwrap();
            let rho = measures::reduced_ab(&psi).unwrap();
            let l = measures::lambda_spectrum(&rho).unwrap().values();
            let tau = measures::tau_formula(&rho).unwrap();
            (tau - 2.0 * (l[0] * l[1]).sqrt()).abs()
        })
        .reduce(|| 0.0, f64::max);
    let pass = worst < 1e-9 && qubit < 1e-9;
    verdict(
        3,
        "Pythagorean residual over 7 x 10^4 Haar states",
        pass,
        format!("max residual {worst:.3e}, qubit specialization {qubit:.3e}"),
        start.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_04_oracle_equivalence() {
    let start = Instant::now();
    let cases: Vec<(usize, u64)> = (0..100)
        .map(|k| (2, k))
        .chain((0..50).map(|k| (3, 100 + k)))
        .chain((0..50).map(|k| (4, 200 + k)))
        .collect();
    let gaps: Vec<(usize, f64)> = cases
        .par_iter()
        .map(|&(n, k)| {
            let mut rng = trial_rng(SEED ^ 0x04, k);
            let psi = haar_pure_with(&[2, 2, n], &mut rng).unwrap();
            let closed = measures::triple_measures(&psi).unwrap().coa;
            let found = coa_oracle_search(&psi, 4, SEED + k).unwrap();
            (n, closed - found)
        })
        .collect();
    let min_gap = gaps.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
    let max_gap = gaps.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
    let pass = min_gap >= -1e-9 && max_gap <= 1e-2;
    verdict(
        4,
        "POVM search vs closed-form Ca",
        pass,
        format!(
            "{} states, gap range [{min_gap:.3e}, {max_gap:.3e}]",
            gaps.len()
        ),
        start.elapsed(),
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_05_det_scaling() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut worst_unitary = 0.0_f64;
    for side in [Side::Alice, Side::Bob] {
        let (general, unitary) = (0..1000u64)
            .into_par_iter()
            .map(|k| {
                let mut rng =
                    trial_rng(SEED ^ 0x05, k + if side == Side::Bob { 10_000 } else { 0 });
                let rank = 1 + (k as usize % 4);
                let rho = random_density_with(&[2, 2], rank, &mut rng).unwrap();
                let m = gaussian_matrix(2, 2, &mut rng);
                let r = det_scaling_residual(&rho, &m, side).unwrap();
                let u = haar_unitary_with(2, &mut rng);
                let ru = det_scaling_residual(&rho, &u, side).unwrap();
                (r.concurrence.max(r.coa), ru.concurrence.max(ru.coa))
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        worst = worst.max(general);
        worst_unitary = worst_unitary.max(unitary);
    }
    verdict(
        5,
        "det-scaling of C and Ca under local filters",
        worst < 1e-9 && worst_unitary < 1e-12,
        format!("general {worst:.3e}, unitary {worst_unitary:.3e}"),
        start.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_06_locc_monotonicity() {
    let start = Instant::now();
    let outcomes: Vec<(f64, f64)> = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(SEED ^ 0x06, k);
            let n = 2 + (k as usize % 3);
            let psi = haar_pure_with(&[2, 2, n], &mut rng).unwrap();
            let ch_a = sample_local_channel_with(2 + (k as usize % 3), &mut rng).unwrap();
            let ch_b = sample_local_channel_with(2 + ((k as usize / 3) % 3), &mut rng).unwrap();
            let out = monotonicity_trial(&psi, &ch_a, &ch_b).unwrap();
            (
                out.tau_after_avg - out.tau_before,
                (out.total_probability - 1.0).abs(),
            )
        })
        .collect();
    let violations = outcomes.iter().filter(|o| o.0 > 1e-9).count();
    let max_increase = outcomes
        .iter()
        .map(|o| o.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let prob_err = outcomes.iter().map(|o| o.1).fold(0.0, f64::max);
    verdict(
        6,
        "average tangle never increases under local operations",
        violations == 0 && prob_err < 1e-9,
        format!("{violations} violations, max increase {max_increase:.3e}, probability error {prob_err:.1e}"),
        start.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_07_concavity() {
    let start = Instant::now();
    let excess: Vec<f64> = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(SEED ^ 0x07, k);
            let r1 = random_density_with(&[2, 2], 1 + (k as usize % 4), &mut rng).unwrap();
            let r2 = random_density_with(&[2, 2], 1 + ((k as usize / 4) % 4), &mut rng).unwrap();
            let lam: f64 = rand::Rng::random(&mut rng);
            let out = concavity_trial(&r1, &r2, lam).unwrap();
            out.lhs - out.rhs
        })
        .collect();
    let violations = excess.iter().filter(|&&e| e > 1e-9).count();
    let worst = excess.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    verdict(
        7,
        "tangle concavity on two-qubit mixtures",
        violations == 0,
        format!("{violations} violations, max lhs - rhs {worst:.3e}"),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_08_chain_inequality() {
    let start = Instant::now();
    let random: Vec<f64> = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(SEED ^ 0x08, k);
            let rank = 1 + (k as usize % 4);
            let rho = random_density_with(&[2, 2, 2], rank, &mut rng).unwrap();
            let size = rank + (k as usize / 4) % (rank + 1);
            let d = sample_decomposition_with(&rho, size, &mut rng).unwrap();
            let out = chain_residual(&rho, &d).unwrap();
            if out.holds {
                out.excess().min(0.0)
            } else {
                out.excess().max(f64::MIN_POSITIVE)
            }
        })
        .collect();
    let random_violations = random.iter().filter(|&&e| e > 0.0).count();

    let pieces = [
        fixtures::ghz(),
        fixtures::w_state(),
        fixtures::product_000(),
    ];
    let family: Vec<bool> = (0..1000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(SEED ^ 0x88, k);
            let weights: Vec<f64> = (0..3).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
            let parts: Vec<(f64, DensityMatrix)> = weights
                .iter()
                .zip(&pieces)
                .map(|(&w, s)| (w, s.projector()))
                .collect();
            let rho = DensityMatrix::mixture(&parts).unwrap();
            let rank = rho.numerical_rank(1e-10).unwrap();
            let size = rank + (k as usize) % (rank + 1);
            let d = sample_decomposition_with(&rho, size, &mut rng).unwrap();
            chain_residual(&rho, &d).unwrap().holds
        })
        .collect();
    let family_violations = family.iter().filter(|h| !**h).count();

    // p = 1/2 GHZ/W mixture on its own
    let half = Family::GhzW.state(0.5).unwrap();
    let half_violations = (0..1000u64)
        .into_par_iter()
        .filter(|&k| {
            let mut rng = trial_rng(SEED ^ 0x8f, k);
            let d = sample_decomposition_with(&half, 2 + (k as usize % 3), &mut rng).unwrap();
            !chain_residual(&half, &d).unwrap().holds
        })
        .count();

    verdict(
        8,
        "per-decomposition chain inequality",
        random_violations == 0 && family_violations == 0 && half_violations == 0,
        format!(
            "violations: random {random_violations}/10000, GHZ/W/000 mixtures {family_violations}/1000, GHZ+W at 1/2 {half_violations}/1000"
        ),
        start.elapsed(),
        Duration::from_secs(180),
    );
}

#[test]
fn criterion_09_roof_sanity() {
    let start = Instant::now();
    // pure inputs
    let mut pure_err = 0.0_f64;
    for k in 0..10u64 {
        let mut rng = trial_rng(SEED ^ 0x09, k);
        let psi = haar_pure_with(&[2, 2, 2 + k as usize % 3], &mut rng).unwrap();
        let rho = psi.projector();
        for functional in [RoofFunctional::Tangle, RoofFunctional::Coa] {
            let want = functional.pure_value(&psi).unwrap();
            for direction in [Direction::Min, Direction::Max] {
                let got = roof_extremize(&rho, functional, direction, 2, 2, k).unwrap();
                pure_err = pure_err.max((got.value - want).abs());
            }
        }
    }

    // max-direction concurrence roof against the sum of lambdas
    let concurrence_gap = (0..50u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(SEED ^ 0x99, k);
            let rho = random_density_with(&[2, 2], 4, &mut rng).unwrap();
            let target = measures::coa(&rho).unwrap();
            let config = RoofConfig {
                restarts: 4,
                ..RoofConfig::default()
            };
            let found = roof_extremize_with(
                &rho,
                RoofFunctional::Concurrence,
                Direction::Max,
                &config,
                k,
            )
            .unwrap();
            (target - found.value).abs()
        })
        .reduce(|| 0.0, f64::max);

    // separable mixtures of random product states
    let separable = (0..10u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(SEED ^ 0x9a, k);
            let members = 2 + (k as usize % 2);
            let parts: Vec<(f64, DensityMatrix)> = (0..members)
                .map(|_| {
                    let a = haar_pure_with(&[2], &mut rng).unwrap();
                    let b = haar_pure_with(&[2], &mut rng).unwrap();
                    let cc = haar_pure_with(&[2], &mut rng).unwrap();
                    let w: f64 = 0.1 + rand::Rng::random::<f64>(&mut rng);
                    (w, a.tensor(&b).tensor(&cc).projector())
                })
                .collect();
            let rho = DensityMatrix::mixture(&parts).unwrap();
            roof_extremize_with(
                &rho,
                RoofFunctional::Tangle,
                Direction::Min,
                &RoofConfig::default(),
                k,
            )
            .unwrap()
            .value
        })
        .reduce(|| 0.0, f64::max);

    verdict(
        9,
        "roof optimizer sanity",
        pure_err < 1e-6 && concurrence_gap < 1e-3 && separable <= 1e-3,
        format!("pure error {pure_err:.2e}, concurrence roof gap {concurrence_gap:.2e}, separable tau bound {separable:.2e}"),
        start.elapsed(),
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_10_grouping_sweep() {
    let start = Instant::now();
    let ghz4 = grouping_sweep(&fixtures::ghz_qubits(4)).unwrap();
    let ghz_err = ghz4
        .iter()
        .map(|r| r.triple.max_abs_diff(&triple(0.0, 1.0, 1.0)))
        .fold(0.0, f64::max);

    let bell = grouping_sweep(&fixtures::bell_bell()).unwrap();
    let mut bell_ok = bell.len() == 6;
    for row in &bell {
        let partners = row.spec.pair == (0, 1) || row.spec.pair == (2, 3);
        if partners {
            bell_ok &= row.triple.max_abs_diff(&triple(1.0, 1.0, 0.0)) < 1e-12;
        } else {
            bell_ok &= row.triple.concurrence.abs() < 1e-12
                && (row.triple.coa - row.triple.tangle).abs() < 1e-12;
        }
    }
    let residual = ghz4
        .iter()
        .chain(&bell)
        .map(|r| r.theorem1_residual.max(r.triple.pythagorean_residual()))
        .fold(0.0, f64::max);
    verdict(
        10,
        "qubit groupings of 4-qubit GHZ and Bell x Bell",
        ghz4.len() == 6 && ghz_err < 1e-12 && bell_ok && residual < 1e-9,
        format!(
            "GHZ error {ghz_err:.2e}, Bell x Bell ok = {bell_ok}, max row residual {residual:.2e}"
        ),
        start.elapsed(),
        Duration::from_secs(10),
    );
}

#[test]
fn mixed_families_have_no_flagged_points() {
    let start = Instant::now();
    let config = Theorem2Config {
        decompositions_per_point: 1000,
        roof: RoofConfig {
            restarts: 2,
            ..RoofConfig::default()
        },
    };
    let mut flagged = 0;
    let mut detail = Vec::new();
    for family in Family::all() {
        let rows = verify_theorem2_family(family, &unit_grid(11), &config, SEED).unwrap();
        let bad = rows.iter().filter(|r| r.flagged).count();
        let pure_ok = rows
            .iter()
            .filter_map(|r| r.pure_residual)
            .all(|res| res < 1e-6);
        flagged += bad + usize::from(!pure_ok);
        detail.push(format!("{}: {bad} flagged", family.name()));
    }
    verdict(
        11,
        "mixed-family chain and exact-case checks",
        flagged == 0,
        detail.join(", "),
        start.elapsed(),
        Duration::from_secs(300),
    );
}
