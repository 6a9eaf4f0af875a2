//! Local operations on Alice and Bob, Charlie-assisted measurements, and the
//! trials that probe how the tangle behaves under them.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{dims_mismatch, Error, Result};
use crate::linalg::{
    herm_eig, identity, kron, max_abs, pd_inv_sqrt, psd_eig, real_trace, ComplexMatrix,
    ComplexVector, C64, ZERO,
};
use crate::measures::{self, coa_of, concurrence_of, pure_concurrence_amplitudes};
use crate::rng::{seeded, trial_rng};
use crate::state::{gaussian_matrix, DensityMatrix, PureState};

/// Completeness tolerance for channels and POVMs.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Outcomes below this probability are skipped in averages.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;

fn det2(m: &ComplexMatrix) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

fn check_2x2(m: &ComplexMatrix) -> Result<()> {
    if m.shape() != (2, 2) {
        return Err(Error::DimensionMismatch {
            expected: "2x2 local operator".into(),
            actual: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

/// A set of 2x2 Kraus operators with `Σ M_j^dag M_j ≤ I`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidArgument(
                "channel needs at least one operator".into(),
            ));
        }
        for m in &operators {
            check_2x2(m)?;
        }
        let channel = KrausChannel { operators };
        let top = herm_eig(&channel.gram())?.values[0];
        if top > 1.0 + COMPLETENESS_TOL {
            return Err(Error::KrausCompleteness(top));
        }
        Ok(channel)
    }

    pub fn identity() -> Self {
        KrausChannel {
            operators: vec![identity(2)],
        }
    }

    /// Projective measurement in the computational basis.
    pub fn measure_z() -> Self {
        let p0 = crate::linalg::diag_real(&[1.0, 0.0]);
        let p1 = crate::linalg::diag_real(&[0.0, 1.0]);
        KrausChannel {
            operators: vec![p0, p1],
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `Σ M_j^dag M_j`.
    pub fn gram(&self) -> ComplexMatrix {
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(2, 2), |acc, m| acc + m.adjoint() * m)
    }

    /// Max-entry distance of `Σ M_j^dag M_j` from the identity.
    pub fn completeness_residual(&self) -> f64 {
        max_abs(&(self.gram() - identity(2)))
    }

    /// `Σ_j |det M_j|`.
    pub fn det_sum(&self) -> f64 {
        self.operators.iter().map(|m| det2(m).norm()).sum()
    }
}

/// Random complete channel: `M_j = G_j S^{-1/2}` with `S = Σ G_j^dag G_j`
/// built from complex Gaussian `G_j`.
pub fn sample_local_channel_with<R: Rng + ?Sized>(
    count: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "channel needs at least one operator".into(),
        ));
    }
    let raw: Vec<ComplexMatrix> = (0..count).map(|_| gaussian_matrix(2, 2, rng)).collect();
    let gram = raw
        .iter()
        .fold(ComplexMatrix::zeros(2, 2), |acc, g| acc + g.adjoint() * g);
    let inv_sqrt = pd_inv_sqrt(&gram)?;
    Ok(KrausChannel {
        operators: raw.iter().map(|g| g * &inv_sqrt).collect(),
    })
}

pub fn sample_local_channel(count: usize, seed: u64) -> Result<KrausChannel> {
    sample_local_channel_with(count, &mut seeded(seed))
}

/// One branch of a local operation.
#[derive(Debug, Clone)]
pub struct OutcomeRecord {
    pub probability: f64,
    /// `None` when the branch probability is below
    /// [`MIN_OUTCOME_PROBABILITY`] and the post-state is undefined.
    pub post_state: Option<PureState>,
}

/// `(m_a ⊗ m_b ⊗ I_C) |Ψ>` as an unnormalized vector.
pub fn apply_local_unnormalized(
    psi: &PureState,
    m_a: &ComplexMatrix,
    m_b: &ComplexMatrix,
) -> Result<ComplexVector> {
    let n = psi.tripartite_n()?;
    check_2x2(m_a)?;
    check_2x2(m_b)?;
    let local = kron(m_a, m_b);
    let amps = psi.amplitudes();
    let mut out = ComplexVector::zeros(4 * n);
    for row in 0..4 {
        for col in 0..4 {
            let coeff = local[(row, col)];
            if coeff == ZERO {
                continue;
            }
            for k in 0..n {
                out[row * n + k] += coeff * amps[col * n + k];
            }
        }
    }
    Ok(out)
}

pub fn apply_local_pair(
    psi: &PureState,
    m_a: &ComplexMatrix,
    m_b: &ComplexMatrix,
) -> Result<OutcomeRecord> {
    let branch = apply_local_unnormalized(psi, m_a, m_b)?;
    let probability = branch.norm_squared();
    let post_state = if probability < MIN_OUTCOME_PROBABILITY {
        None
    } else {
        Some(PureState::normalized(psi.dims().to_vec(), branch)?)
    };
    Ok(OutcomeRecord {
        probability,
        post_state,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Alice,
    Bob,
}

/// Deviations from `C(M ρ M^dag) = |det M| C(ρ)` and its `C_a` analogue,
/// evaluated on the unnormalized filtered matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetScalingResidual {
    pub concurrence: f64,
    pub coa: f64,
}

pub fn det_scaling_residual(
    rho: &DensityMatrix,
    m: &ComplexMatrix,
    side: Side,
) -> Result<DetScalingResidual> {
    check_2x2(m)?;
    if !rho.is_two_qubit() {
        return Err(dims_mismatch("two-qubit density", rho.dims()));
    }
    let local = match side {
        Side::Alice => kron(m, &identity(2)),
        Side::Bob => kron(&identity(2), m),
    };
    let filtered = crate::linalg::hermitian_part(&(&local * rho.matrix() * local.adjoint()));
    let det = det2(m).norm();
    Ok(DetScalingResidual {
        concurrence: (concurrence_of(&filtered)? - det * concurrence_of(rho.matrix())?).abs(),
        coa: (coa_of(&filtered)? - det * coa_of(rho.matrix())?).abs(),
    })
}

/// Charlie's measurement: PSD `n x n` elements summing to the identity.
#[derive(Debug, Clone)]
pub struct CharliePovm {
    elements: Vec<ComplexMatrix>,
}

impl CharliePovm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidArgument("POVM needs at least one element".into()))?;
        let n = first.nrows();
        let mut total = ComplexMatrix::zeros(n, n);
        for e in &elements {
            if e.shape() != (n, n) {
                return Err(Error::DimensionMismatch {
                    expected: format!("{n}x{n} POVM element"),
                    actual: format!("{}x{}", e.nrows(), e.ncols()),
                });
            }
            let min = herm_eig(e)?.values.last().copied().unwrap_or(0.0);
            if min < -COMPLETENESS_TOL {
                return Err(Error::NotPositive(min));
            }
            total += e;
        }
        let deviation = max_abs(&(total - identity(n)));
        if deviation > COMPLETENESS_TOL {
            return Err(Error::PovmCompleteness(deviation));
        }
        Ok(CharliePovm { elements })
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn from_basis(unitary: &ComplexMatrix) -> Result<Self> {
        let elements = unitary
            .column_iter()
            .map(|col| col * col.adjoint())
            .collect();
        CharliePovm::new(elements)
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

/// `Ψ` as the 4 x n matrix with rows indexed by `ab` and columns by `c`.
fn amplitude_matrix(psi: &PureState) -> Result<ComplexMatrix> {
    let n = psi.tripartite_n()?;
    Ok(ComplexMatrix::from_row_slice(
        4,
        n,
        psi.amplitudes().as_slice(),
    ))
}

/// Average Alice-Bob concurrence after Charlie measures `povm` and announces
/// the outcome: `Σ_i p_i C(ρ_AB^i)`.
pub fn povm_assist_average(psi: &PureState, povm: &CharliePovm) -> Result<f64> {
    let amp = amplitude_matrix(psi)?;
    if povm.dim() != amp.ncols() {
        return Err(dims_mismatch(
            format!("POVM on dimension {}", amp.ncols()),
            &[povm.dim()],
        ));
    }
    let mut total = 0.0;
    for e in povm.elements() {
        // unnormalized branch p_i ρ_AB^i = Ψ E^T Ψ^dag
        let branch = crate::linalg::hermitian_part(&(&amp * e.transpose() * amp.adjoint()));
        if real_trace(&branch) < MIN_OUTCOME_PROBABILITY {
            continue;
        }
        let eig = psd_eig(&branch)?;
        let rank = eig.values.iter().filter(|&&v| v > 0.0).count();
        total += if rank == 1 {
            let phi = eig.vectors.column(0) * C64::from(eig.values[0].sqrt());
            pure_concurrence_amplitudes(phi.as_slice())
        } else {
            concurrence_of(&branch)?
        };
    }
    Ok(total)
}

/// Search parameters for [`coa_oracle_search_with`].
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub restarts: usize,
    /// POVM elements per restart; `None` means `2n`.
    pub elements: Option<usize>,
    pub initial_step: f64,
    pub cooling: f64,
    pub patience: usize,
    pub min_step: f64,
    pub max_iterations: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            restarts: 4,
            elements: None,
            initial_step: 0.3,
            cooling: 0.5,
            patience: 50,
            min_step: 1e-6,
            max_iterations: 20_000,
        }
    }
}

/// Best rank-one POVM found by the oracle search.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: f64,
    /// Columns are the POVM vectors `v_k`, with `Σ v_k v_k^dag = I`.
    pub vectors: ComplexMatrix,
    pub restart: usize,
    pub evaluations: usize,
}

/// Average concurrence of the rank-one POVM `{v_k v_k^dag}`: each outcome
/// leaves Alice and Bob with `φ_k = Ψ conj(v_k)`, contributing
/// `|φ_k^T (σ_y ⊗ σ_y) φ_k| = |u_k^T T u_k|` with `T = Ψ^T (σ_y ⊗ σ_y) Ψ`
/// and `u_k = conj(v_k)`.
fn rank_one_average(flip_form: &ComplexMatrix, vectors: &ComplexMatrix) -> f64 {
    vectors
        .column_iter()
        .map(|v| {
            let u = v.conjugate();
            (u.transpose() * flip_form * &u)[(0, 0)].norm()
        })
        .sum()
}

fn complete_rank_one(raw: &ComplexMatrix) -> Option<ComplexMatrix> {
    let frame = raw * raw.adjoint();
    pd_inv_sqrt(&frame).ok().map(|s| s * raw)
}

fn flip_form(psi: &PureState) -> Result<ComplexMatrix> {
    let amp = amplitude_matrix(psi)?;
    let yy = kron(&crate::linalg::pauli_y(), &crate::linalg::pauli_y());
    Ok(amp.transpose() * yy * amp)
}

fn oracle_restart(
    flip: &ComplexMatrix,
    config: &OracleConfig,
    seed: u64,
    restart: usize,
) -> OracleResult {
    let n = flip.nrows();
    let m = config.elements.unwrap_or(2 * n).max(n);
    let mut rng = trial_rng(seed, restart as u64);
    let mut current = loop {
        if let Some(v) = complete_rank_one(&gaussian_matrix(n, m, &mut rng)) {
            break v;
        }
    };
    let mut best = rank_one_average(flip, &current);
    let mut evaluations = 1;
    let mut step = config.initial_step;
    let mut stale = 0;
    while step >= config.min_step && evaluations < config.max_iterations {
        let trial = &current + gaussian_matrix(n, m, &mut rng).scale(step);
        evaluations += 1;
        if let Some(candidate) = complete_rank_one(&trial) {
            let value = rank_one_average(flip, &candidate);
            if value > best {
                best = value;
                current = candidate;
                stale = 0;
                continue;
            }
        }
        stale += 1;
        if stale >= config.patience {
            step *= config.cooling;
            stale = 0;
        }
    }
    OracleResult {
        value: best,
        vectors: current,
        restart,
        evaluations,
    }
}

/// Lower-bound oracle for the concurrence of assistance: hill climbing over
/// Charlie's rank-one POVMs from seeded random starts.
pub fn coa_oracle_search_with(
    psi: &PureState,
    config: &OracleConfig,
    seed: u64,
) -> Result<OracleResult> {
    let flip = flip_form(psi)?;
    let restarts = config.restarts.max(1);
    let results: Vec<OracleResult> = (0..restarts)
        .into_par_iter()
        .map(|r| oracle_restart(&flip, config, seed, r))
        .collect();
    // strict comparison keeps the lowest restart index on ties
    let best = results
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one restart");
    Ok(best)
}

pub fn coa_oracle_search(psi: &PureState, restarts: usize, seed: u64) -> Result<f64> {
    let config = OracleConfig {
        restarts,
        ..OracleConfig::default()
    };
    Ok(coa_oracle_search_with(psi, &config, seed)?.value)
}

/// Tangle before and averaged after a local operation pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityOutcome {
    pub tau_before: f64,
    pub tau_after_avg: f64,
    /// `Σ P_kk'` over all branches (1 for complete channels).
    pub total_probability: f64,
}

impl MonotonicityOutcome {
    pub fn holds(&self, tol: f64) -> bool {
        self.tau_after_avg <= self.tau_before + tol
    }
}

/// Applies every `M_a ⊗ M_b` branch and averages the tangle of the
/// normalized post-states, weighted by branch probability.
pub fn monotonicity_trial(
    psi: &PureState,
    ch_a: &KrausChannel,
    ch_b: &KrausChannel,
) -> Result<MonotonicityOutcome> {
    let tau_before = measures::triple_measures(psi)?.tangle;
    let mut tau_after_avg = 0.0;
    let mut total_probability = 0.0;
    for m_a in ch_a.operators() {
        for m_b in ch_b.operators() {
            let outcome = apply_local_pair(psi, m_a, m_b)?;
            total_probability += outcome.probability;
            if let Some(post) = outcome.post_state {
                tau_after_avg += outcome.probability * measures::triple_measures(&post)?.tangle;
            }
        }
    }
    Ok(MonotonicityOutcome {
        tau_before,
        tau_after_avg,
        total_probability,
    })
}

/// Both sides of the concavity inequality for the tangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcavityOutcome {
    /// `λ τ(ρ₁) + (1 − λ) τ(ρ₂)`.
    pub lhs: f64,
    /// `τ(λ ρ₁ + (1 − λ) ρ₂)`.
    pub rhs: f64,
}

impl ConcavityOutcome {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

pub fn concavity_trial(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    lam: f64,
) -> Result<ConcavityOutcome> {
    if !(0.0..=1.0).contains(&lam) {
        return Err(Error::WeightOutOfRange(lam));
    }
    let mixed = rho1.mix(rho2, lam)?;
    Ok(ConcavityOutcome {
        lhs: lam * measures::tau_formula(rho1)? + (1.0 - lam) * measures::tau_formula(rho2)?,
        rhs: measures::tau_formula(&mixed)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::{c, diag_real, max_abs_diff};
    use crate::state::{haar_pure, haar_unitary_with, random_density};

    #[test]
    fn single_operator_channel_is_unitary() {
        let ch = sample_local_channel(1, 5).unwrap();
        let m = &ch.operators()[0];
        assert!(max_abs_diff(&(m.adjoint() * m), &identity(2)) < 1e-10);
        assert!((ch.det_sum() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sampled_channels_are_complete_and_det_bounded() {
        for seed in 0..200 {
            let ch = sample_local_channel(1 + seed as usize % 5, seed).unwrap();
            assert!(ch.completeness_residual() < 1e-10);
            assert!(ch.det_sum() <= 1.0 + 1e-9, "{}", ch.det_sum());
        }
    }

    #[test]
    fn overcomplete_operators_are_rejected() {
        let ops = vec![identity(2), diag_real(&[0.5, 0.0])];
        assert!(matches!(
            KrausChannel::new(ops),
            Err(Error::KrausCompleteness(_))
        ));
        assert!(KrausChannel::new(vec![diag_real(&[0.5, 0.3])]).is_ok());
    }

    #[test]
    fn identity_pair_keeps_state() {
        let psi = haar_pure(&[2, 2, 3], 1).unwrap();
        let out = apply_local_pair(&psi, &identity(2), &identity(2)).unwrap();
        assert!((out.probability - 1.0).abs() < 1e-12);
        assert!(out.post_state.unwrap().overlap_sq(&psi) > 1.0 - 1e-12);
    }

    #[test]
    fn projecting_ghz_on_alice() {
        let p0 = diag_real(&[1.0, 0.0]);
        let out = apply_local_pair(&fixtures::ghz(), &p0, &identity(2)).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-12);
        let post = out.post_state.unwrap();
        assert!(post.overlap_sq(&fixtures::product_000()) > 1.0 - 1e-12);
    }

    #[test]
    fn zero_probability_branch_is_flagged() {
        let p0 = diag_real(&[1.0, 0.0]);
        let p1 = diag_real(&[0.0, 1.0]);
        let psi = fixtures::product_000();
        let out = apply_local_pair(&psi, &p1, &p0).unwrap();
        assert!(out.probability < 1e-14);
        assert!(out.post_state.is_none());
    }

    #[test]
    fn branch_probability_is_squared_norm() {
        let mut rng = seeded(17);
        for _ in 0..20 {
            let psi = haar_pure_with_rng(&mut rng);
            let a = gaussian_matrix(2, 2, &mut rng);
            let b = gaussian_matrix(2, 2, &mut rng);
            let branch = apply_local_unnormalized(&psi, &a, &b).unwrap();
            let direct = kron(&kron(&a, &b), &identity(3)) * psi.amplitudes();
            assert!((branch - &direct).norm() < 1e-12);
            let p = apply_local_pair(&psi, &a, &b).unwrap().probability;
            assert!((p - direct.norm_squared()).abs() < 1e-12);
        }
    }

    fn haar_pure_with_rng(rng: &mut crate::rng::TrialRng) -> PureState {
        crate::state::haar_pure_with(&[2, 2, 3], rng).unwrap()
    }

    #[test]
    fn det_scaling_unitary_and_rank_one() {
        let mut rng = seeded(2);
        let rho = random_density(&[2, 2], 3, 4).unwrap();
        for side in [Side::Alice, Side::Bob] {
            let u = haar_unitary_with(2, &mut rng);
            let r = det_scaling_residual(&rho, &u, side).unwrap();
            assert!(r.concurrence < 1e-12 && r.coa < 1e-12, "{r:?}");
        }
        let filter = diag_real(&[1.0, 0.0]);
        let local = kron(&filter, &identity(2));
        let out = &local * rho.matrix() * local.adjoint();
        assert_eq!(concurrence_of(&out).unwrap(), 0.0);
    }

    #[test]
    fn det_scaling_filter_on_bell() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::from_slice(vec![2, 2], &[c(h, 0.0), ZERO, ZERO, c(h, 0.0)]).unwrap();
        let filter = diag_real(&[1.0, 0.5]);
        let local = kron(&filter, &identity(2));
        let out = &local * bell.projector().matrix() * local.adjoint();
        assert!((concurrence_of(&out).unwrap() - 0.5).abs() < 1e-12);
        let r = det_scaling_residual(&bell.projector(), &filter, Side::Alice).unwrap();
        assert!(r.concurrence < 1e-12 && r.coa < 1e-12);
    }

    #[test]
    fn ghz_assisted_by_x_basis_measurement() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard =
            ComplexMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
        let x_basis = CharliePovm::from_basis(&hadamard).unwrap();
        let avg = povm_assist_average(&fixtures::ghz(), &x_basis).unwrap();
        assert!((avg - 1.0).abs() < 1e-12, "{avg}");
        let z_basis = CharliePovm::from_basis(&identity(2)).unwrap();
        let avg = povm_assist_average(&fixtures::ghz(), &z_basis).unwrap();
        assert!(avg.abs() < 1e-12);
    }

    #[test]
    fn povm_average_never_exceeds_coa() {
        let mut rng = seeded(8);
        for seed in 0..100 {
            let n = 2 + seed as usize % 3;
            let psi = haar_pure(&[2, 2, n], seed).unwrap();
            let ceiling = measures::triple_measures(&psi).unwrap().coa;
            let basis = CharliePovm::from_basis(&haar_unitary_with(n, &mut rng)).unwrap();
            assert!(povm_assist_average(&psi, &basis).unwrap() <= ceiling + 1e-9);
            // coarse two-element POVM with mixed branches
            let half = identity(n).scale(0.5);
            let trivial = CharliePovm::new(vec![half.clone(), half]).unwrap();
            assert!(povm_assist_average(&psi, &trivial).unwrap() <= ceiling + 1e-9);
        }
    }

    #[test]
    fn rank_one_average_matches_generic_average() {
        let psi = haar_pure(&[2, 2, 3], 77).unwrap();
        let flip = flip_form(&psi).unwrap();
        let vectors = complete_rank_one(&gaussian_matrix(3, 6, &mut seeded(1))).unwrap();
        let povm =
            CharliePovm::new(vectors.column_iter().map(|v| v * v.adjoint()).collect()).unwrap();
        let a = rank_one_average(&flip, &vectors);
        let b = povm_assist_average(&psi, &povm).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn incomplete_povm_is_rejected() {
        let e = diag_real(&[1.0, 0.0]);
        assert!(matches!(
            CharliePovm::new(vec![e]),
            Err(Error::PovmCompleteness(_))
        ));
    }

    #[test]
    fn oracle_finds_ghz_and_w_values() {
        let ghz = coa_oracle_search(&fixtures::ghz(), 4, 1).unwrap();
        assert!((1.0 - 1e-3..=1.0 + 1e-9).contains(&ghz), "{ghz}");
        let w = coa_oracle_search(&fixtures::w_state(), 4, 1).unwrap();
        assert!((w - 2.0 / 3.0).abs() < 1e-3, "{w}");
    }

    #[test]
    fn oracle_is_reproducible() {
        let psi = haar_pure(&[2, 2, 3], 12).unwrap();
        let a = coa_oracle_search(&psi, 3, 99).unwrap();
        let b = coa_oracle_search(&psi, 3, 99).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn identity_channels_keep_tangle() {
        let psi = haar_pure(&[2, 2, 2], 3).unwrap();
        let out =
            monotonicity_trial(&psi, &KrausChannel::identity(), &KrausChannel::identity()).unwrap();
        assert!((out.tau_after_avg - out.tau_before).abs() < 1e-12);
    }

    #[test]
    fn measuring_alice_destroys_ghz_tangle() {
        let out = monotonicity_trial(
            &fixtures::ghz(),
            &KrausChannel::measure_z(),
            &KrausChannel::identity(),
        )
        .unwrap();
        assert!((out.tau_before - 1.0).abs() < 1e-12);
        assert!(out.tau_after_avg.abs() < 1e-12);
        assert!((out.total_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concavity_endpoints_and_degenerate_mix() {
        let r1 = random_density(&[2, 2], 2, 1).unwrap();
        let r2 = random_density(&[2, 2], 3, 2).unwrap();
        for lam in [0.0, 1.0] {
            let out = concavity_trial(&r1, &r2, lam).unwrap();
            assert!((out.lhs - out.rhs).abs() < 1e-12);
        }
        let out = concavity_trial(&r1, &r1, 0.3).unwrap();
        assert!((out.lhs - out.rhs).abs() < 1e-12);
        assert!(matches!(
            concavity_trial(&r1, &r2, 1.5),
            Err(Error::WeightOutOfRange(_))
        ));
    }
}
