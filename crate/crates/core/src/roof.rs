//! Pure-state decompositions of mixed states and numerical convex-roof
//! search over them.
//!
//! Every decomposition of `ρ = Σ_j μ_j |e_j><e_j|` (rank `r`) into `m`
//! members has the form `|φ̃_i> = Σ_j V_ij sqrt(μ_j) |e_j>` for an `m x r`
//! isometry `V`, with weights `p_i = <φ̃_i|φ̃_i>`. The search below walks
//! over such isometries.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    c, identity, max_abs_diff, orthonormalize_columns, ComplexMatrix, ComplexVector, C64,
};
use crate::measures::{self, pure_concurrence_amplitudes};
use crate::rng::{seeded, trial_rng};
use crate::state::{gaussian_matrix, reduce_unnormalized, DensityMatrix, PureState};

/// Eigenvalues above this count toward the numerical rank.
pub const RANK_CUTOFF: f64 = 1e-10;
/// Maximum-entry tolerance for a decomposition to reconstruct its source.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Members lighter than this are skipped when evaluating a functional.
pub const MIN_MEMBER_WEIGHT: f64 = 1e-12;

/// Tolerance for the weights summing to one.
const WEIGHT_SUM_TOL: f64 = 1e-9;
/// Members lighter than this are dropped when building a decomposition.
const DROP_WEIGHT: f64 = 1e-15;

#[derive(Debug, Clone)]
pub struct Member {
    pub weight: f64,
    pub state: PureState,
}

/// Weighted pure states `{p_i, |φ_i>}` with `Σ p_i = 1`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    members: Vec<Member>,
}

impl Decomposition {
    pub fn new(members: Vec<Member>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty decomposition".into()))?;
        if let Some(bad) = members.iter().find(|m| !(m.weight > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "decomposition weights must be positive, got {}",
                bad.weight
            )));
        }
        if members.iter().any(|m| m.state.dims() != first.state.dims()) {
            return Err(Error::InvalidArgument(
                "members have mixed dimensions".into(),
            ));
        }
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "decomposition weights sum to {total}"
            )));
        }
        Ok(Decomposition { members })
    }

    /// The single-member decomposition of a pure state.
    pub fn trivial(state: PureState) -> Self {
        Decomposition {
            members: vec![Member { weight: 1.0, state }],
        }
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        self.members[0].state.dims()
    }

    /// `Σ p_i |φ_i><φ_i|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.members[0].state.dim();
        self.members
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, m| {
                let v = m.state.amplitudes();
                acc + (v * v.adjoint()).scale(m.weight)
            })
    }

    /// Max-entry distance between the reconstruction and `rho`.
    pub fn reconstruction_residual(&self, rho: &DensityMatrix) -> f64 {
        if rho.dims() != self.dims() {
            return f64::INFINITY;
        }
        max_abs_diff(&self.reconstruct(), rho.matrix())
    }
}

/// `ρ = X X^dag` with the columns of `X` equal to `sqrt(μ_j) |e_j>` for the
/// eigenvalues above [`RANK_CUTOFF`].
#[derive(Debug, Clone)]
pub struct EigenFactor {
    dims: Vec<usize>,
    columns: ComplexMatrix,
}

impl EigenFactor {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        let eig = rho.eig()?;
        let rank = eig.values.iter().filter(|&&v| v > RANK_CUTOFF).count();
        let d = rho.dim();
        let columns = ComplexMatrix::from_fn(d, rank, |i, j| {
            eig.vectors[(i, j)] * c(eig.values[j].sqrt(), 0.0)
        });
        Ok(EigenFactor {
            dims: rho.dims().to_vec(),
            columns,
        })
    }

    pub fn rank(&self) -> usize {
        self.columns.ncols()
    }

    /// Unnormalized members `φ̃_i`, one per column: `X V^T`.
    fn member_vectors(&self, isometry: &ComplexMatrix) -> ComplexMatrix {
        &self.columns * isometry.transpose()
    }

    /// Decomposition induced by an `m x r` isometry.
    pub fn decomposition(&self, isometry: &ComplexMatrix) -> Result<Decomposition> {
        if isometry.ncols() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: format!("isometry with {} columns", self.rank()),
                actual: format!("{}x{}", isometry.nrows(), isometry.ncols()),
            });
        }
        let vectors = self.member_vectors(isometry);
        let mut members = Vec::with_capacity(vectors.ncols());
        for col in vectors.column_iter() {
            let weight = col.norm_squared();
            if weight <= DROP_WEIGHT {
                continue;
            }
            let state = PureState::normalized(self.dims.clone(), col.into_owned())?;
            members.push(Member { weight, state });
        }
        // dropped members shift the total by at most DROP_WEIGHT each
        let total: f64 = members.iter().map(|m| m.weight).sum();
        for m in members.iter_mut() {
            m.weight /= total;
        }
        Decomposition::new(members)
    }
}

/// Random `m x r` isometry (orthonormalized complex Gaussian columns).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    orthonormalize_columns(&gaussian_matrix(rows, cols, rng))
}

/// The isometry `[I_r; 0]`, which reproduces the eigendecomposition.
pub fn padded_identity(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::identity(rows, cols)
}

fn check_size(size: usize, rank: usize) -> Result<()> {
    if size < rank {
        return Err(Error::DecompositionTooSmall { size, rank });
    }
    Ok(())
}

pub fn sample_decomposition_with<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    size: usize,
    rng: &mut R,
) -> Result<Decomposition> {
    let factor = EigenFactor::new(rho)?;
    check_size(size, factor.rank())?;
    factor.decomposition(&random_isometry(size, factor.rank(), rng))
}

/// Random decomposition of `rho` into `size` members.
pub fn sample_decomposition(rho: &DensityMatrix, size: usize, seed: u64) -> Result<Decomposition> {
    sample_decomposition_with(rho, size, &mut seeded(seed))
}

/// Pure-state functional extended by the roof.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoofFunctional {
    /// Tangle of a `(2, 2, n)` member.
    Tangle,
    /// Concurrence of assistance of a `(2, 2, n)` member.
    Coa,
    /// Concurrence of a two-qubit member.
    Concurrence,
}

impl RoofFunctional {
    fn check_dims(self, dims: &[usize]) -> Result<()> {
        let ok = match self {
            RoofFunctional::Tangle | RoofFunctional::Coa => matches!(dims, [2, 2, _]),
            RoofFunctional::Concurrence => matches!(dims, [2, 2] | [4]),
        };
        if ok {
            Ok(())
        } else {
            Err(crate::error::dims_mismatch(
                format!("dims suitable for {self:?}"),
                dims,
            ))
        }
    }

    /// `p f(φ)` from the unnormalized `φ̃ = sqrt(p) φ`; every functional
    /// here is homogeneous of degree one in `p`.
    fn weighted(self, dims: &[usize], member: &ComplexVector) -> Result<f64> {
        match self {
            RoofFunctional::Concurrence => Ok(pure_concurrence_amplitudes(member.as_slice())),
            RoofFunctional::Tangle => {
                measures::tangle_of(&reduce_unnormalized(dims, member, &[0, 1])?)
            }
            RoofFunctional::Coa => measures::coa_of(&reduce_unnormalized(dims, member, &[0, 1])?),
        }
    }

    /// Value on a normalized pure state.
    pub fn pure_value(self, state: &PureState) -> Result<f64> {
        self.check_dims(state.dims())?;
        self.weighted(state.dims(), state.amplitudes())
    }

    /// `Σ p_i f(φ_i)` over a decomposition.
    pub fn average(self, decomposition: &Decomposition) -> Result<f64> {
        self.check_dims(decomposition.dims())?;
        let mut total = 0.0;
        for m in decomposition.members() {
            if m.weight < MIN_MEMBER_WEIGHT {
                continue;
            }
            total += m.weight * self.weighted(m.state.dims(), m.state.amplitudes())?;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

/// What an optimizer value proves about the exact roof value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// A minimization result: the exact roof is at most this value.
    Upper,
    /// A maximization result: the exact extremum is at least this value.
    Lower,
}

impl Direction {
    pub fn bound(self) -> BoundKind {
        match self {
            Direction::Min => BoundKind::Upper,
            Direction::Max => BoundKind::Lower,
        }
    }

    fn improves(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Direction::Min => candidate < incumbent,
            Direction::Max => candidate > incumbent,
        }
    }
}

/// Hill-climbing parameters for [`roof_extremize_with`].
#[derive(Debug, Clone, Copy)]
pub struct RoofConfig {
    /// Members per decomposition; `None` means `min(2r, r + 4)`.
    pub size: Option<usize>,
    pub restarts: usize,
    pub initial_step: f64,
    pub cooling: f64,
    /// Non-improving steps before the step size is cooled.
    pub patience: usize,
    pub min_step: f64,
    pub max_iterations: usize,
}

impl Default for RoofConfig {
    fn default() -> Self {
        RoofConfig {
            size: None,
            restarts: 4,
            initial_step: 0.5,
            cooling: 0.5,
            patience: 50,
            min_step: 1e-6,
            max_iterations: 20_000,
        }
    }
}

pub fn default_size(rank: usize) -> usize {
    (2 * rank).min(rank + 4)
}

#[derive(Debug, Clone)]
pub struct RoofResult {
    pub value: f64,
    /// Witness: a decomposition attaining `value`.
    pub decomposition: Decomposition,
    pub iterations: usize,
    /// The step size cooled below `min_step` before the iteration cap.
    pub converged: bool,
    pub bound: BoundKind,
    pub restart: usize,
}

struct Search<'a> {
    factor: &'a EigenFactor,
    functional: RoofFunctional,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Objective {
    Plain,
    /// `Σ p_i (λ2² + λ3² + λ4²)` of the members: smooth, and zero exactly
    /// where every member has zero tangle.
    Surrogate,
}

impl Search<'_> {
    fn objective(&self, isometry: &ComplexMatrix, objective: Objective) -> Result<f64> {
        let vectors = self.factor.member_vectors(isometry);
        let mut total = 0.0;
        for col in vectors.column_iter() {
            let p = col.norm_squared();
            if p < MIN_MEMBER_WEIGHT {
                continue;
            }
            let col = col.into_owned();
            total += match objective {
                Objective::Plain => self.functional.weighted(&self.factor.dims, &col)?,
                Objective::Surrogate => {
                    let rho_ab = reduce_unnormalized(&self.factor.dims, &col, &[0, 1])?;
                    let l = measures::lambda_spectrum_of(&rho_ab)?.values();
                    (l[1] * l[1] + l[2] * l[2] + l[3] * l[3]) / p
                }
            };
        }
        Ok(total)
    }
}

/// Small random unitary close to `exp(i step H)` for Gaussian Hermitian `H`.
fn unitary_kick<R: Rng + ?Sized>(dim: usize, step: f64, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let hermitian = (&g + g.adjoint()).scale(0.5);
    let generator = identity(dim) + hermitian * c(0.0, step);
    orthonormalize_columns(&generator)
}

struct Climb {
    value: f64,
    isometry: ComplexMatrix,
    iterations: usize,
    converged: bool,
}

fn climb<R: Rng + ?Sized>(
    search: &Search<'_>,
    direction: Direction,
    config: &RoofConfig,
    objective: Objective,
    start: ComplexMatrix,
    rng: &mut R,
) -> Result<Climb> {
    let size = start.nrows();
    let mut current = start;
    let mut best = search.objective(&current, objective)?;
    let mut iterations = 0;
    let mut step = config.initial_step;
    let mut stale = 0;
    while step >= config.min_step && iterations < config.max_iterations {
        iterations += 1;
        let candidate = if size > 1 && iterations % 2 == 0 {
            pair_kick(&current, step, rng)
        } else {
            unitary_kick(size, step, rng) * &current
        };
        let value = search.objective(&candidate, objective)?;
        if direction.improves(value, best) {
            best = value;
            current = candidate;
            stale = 0;
            if iterations % 64 == 0 {
                current = orthonormalize_columns(&current);
            }
        } else {
            stale += 1;
            if stale >= config.patience {
                step *= config.cooling;
                stale = 0;
            }
        }
    }
    Ok(Climb {
        value: best,
        isometry: current,
        iterations,
        converged: step < config.min_step,
    })
}

/// Mixes two random rows of `isometry` by a random `SU(2)` rotation of angle ~ `step`.
fn pair_kick<R: Rng + ?Sized>(isometry: &ComplexMatrix, step: f64, rng: &mut R) -> ComplexMatrix {
    let size = isometry.nrows();
    let i = rng.random_range(0..size);
    let mut j = rng.random_range(0..size - 1);
    if j >= i {
        j += 1;
    }
    let theta = step * rng.sample::<f64, _>(StandardNormal);
    let phi = rng.random::<f64>() * std::f64::consts::TAU;
    let (s, co) = theta.sin_cos();
    let phase = C64::from_polar(1.0, phi);
    let mut out = isometry.clone();
    let (ri, rj) = (isometry.row(i).into_owned(), isometry.row(j).into_owned());
    out.set_row(i, &(ri.scale(co) - rj.map(|z| z * phase * s)));
    out.set_row(j, &(ri.map(|z| z * phase.conj() * s) + rj.scale(co)));
    out
}

fn roof_restart(
    search: &Search<'_>,
    direction: Direction,
    config: &RoofConfig,
    size: usize,
    seed: u64,
    restart: usize,
) -> Result<(f64, ComplexMatrix, usize, bool)> {
    let rank = search.factor.rank();
    let mut rng = trial_rng(seed, restart as u64);
    let mut start = if restart == 0 {
        padded_identity(size, rank)
    } else {
        random_isometry(size, rank, &mut rng)
    };
    let mut warm_iterations = 0;
    if direction == Direction::Min
        && search.functional == RoofFunctional::Tangle
        && restart % 2 == 1
    {
        let warm = climb(
            search,
            direction,
            config,
            Objective::Surrogate,
            start,
            &mut rng,
        )?;
        warm_iterations = warm.iterations;
        start = warm.isometry;
    }
    let run = climb(search, direction, config, Objective::Plain, start, &mut rng)?;
    Ok((
        run.value,
        run.isometry,
        warm_iterations + run.iterations,
        run.converged,
    ))
}

/// Extremizes `Σ p_i f(φ_i)` over decompositions of `rho`.
///
/// Restart 0 starts from the eigendecomposition; the others from random
/// isometries. Each restart hill-climbs by left-multiplying the isometry
/// with small random unitaries, cooling the step by `cooling` after
/// `patience` rejected moves. Min results are upper bounds on the roof and
/// max results lower bounds on the supremum.
pub fn roof_extremize_with(
    rho: &DensityMatrix,
    functional: RoofFunctional,
    direction: Direction,
    config: &RoofConfig,
    seed: u64,
) -> Result<RoofResult> {
    functional.check_dims(rho.dims())?;
    let factor = EigenFactor::new(rho)?;
    let rank = factor.rank();
    let size = config.size.unwrap_or_else(|| default_size(rank));
    check_size(size, rank)?;
    if size > 2 * rank.max(1) {
        return Err(Error::InvalidArgument(format!(
            "decomposition size {size} exceeds twice the rank {rank}"
        )));
    }
    let search = Search {
        factor: &factor,
        functional,
    };
    let restarts = config.restarts.max(1);
    let runs: Vec<Result<(f64, ComplexMatrix, usize, bool)>> = (0..restarts)
        .into_par_iter()
        .map(|r| roof_restart(&search, direction, config, size, seed, r))
        .collect();
    let mut best: Option<(usize, f64, ComplexMatrix, usize, bool)> = None;
    for (restart, run) in runs.into_iter().enumerate() {
        let (value, isometry, iterations, converged) = run?;
        let better = match &best {
            None => true,
            Some((_, incumbent, ..)) => direction.improves(value, *incumbent),
        };
        if better {
            best = Some((restart, value, isometry, iterations, converged));
        }
    }
    let (restart, value, isometry, iterations, converged) = best.expect("at least one restart");
    Ok(RoofResult {
        value,
        decomposition: factor.decomposition(&isometry)?,
        iterations,
        converged,
        bound: direction.bound(),
        restart,
    })
}

pub fn roof_extremize(
    rho: &DensityMatrix,
    functional: RoofFunctional,
    direction: Direction,
    size: usize,
    restarts: usize,
    seed: u64,
) -> Result<RoofResult> {
    let config = RoofConfig {
        size: Some(size),
        restarts,
        ..RoofConfig::default()
    };
    roof_extremize_with(rho, functional, direction, &config, seed)
}

/// Both sides of `Σ_k p_k τ(ψ_k) ≤ sqrt((Σ_k p_k C_a(σ_k))² − C²(ρ_AB))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainResidual {
    pub lhs: f64,
    pub rhs: f64,
    /// `(Σ_k p_k C_a(σ_k))² − C²(ρ_AB)` before the square root.
    pub radicand: f64,
    pub holds: bool,
}

impl ChainResidual {
    /// `max(0, lhs − rhs)`, or the negative radicand when that is what fails.
    pub fn excess(&self) -> f64 {
        (self.lhs - self.rhs).max(-self.radicand).max(0.0)
    }
}

/// Tolerance on each step of the chain inequality.
pub const CHAIN_TOL: f64 = 1e-9;

pub fn chain_residual(rho_abc: &DensityMatrix, decomp: &Decomposition) -> Result<ChainResidual> {
    rho_abc.tripartite_n()?;
    let residual = decomp.reconstruction_residual(rho_abc);
    if !(residual <= RECONSTRUCTION_TOL) {
        return Err(Error::ReconstructionMismatch(residual));
    }
    let mut lhs = 0.0;
    let mut coa_avg = 0.0;
    for m in decomp.members() {
        if m.weight < MIN_MEMBER_WEIGHT {
            continue;
        }
        let triple = measures::triple_measures(&m.state)?;
        lhs += m.weight * triple.tangle;
        coa_avg += m.weight * triple.coa;
    }
    let c_ab = measures::concurrence(&rho_abc.partial_trace(&[0, 1])?)?;
    let radicand = coa_avg * coa_avg - c_ab * c_ab;
    let rhs = radicand.max(0.0).sqrt();
    let holds = radicand >= -CHAIN_TOL && lhs <= rhs + CHAIN_TOL;
    Ok(ChainResidual {
        lhs,
        rhs,
        radicand,
        holds,
    })
}
