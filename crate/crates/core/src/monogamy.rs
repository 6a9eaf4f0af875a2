//! Checks of the monogamy relations: the Pythagorean equation on pure
//! states, the chain evidence for mixed families, qubit groupings of
//! multi-qubit states, and the triangle picture of `(C, τ, C_a)`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexVector};
use crate::measures::{self, MeasureTriple};
use crate::rng::trial_rng;
use crate::roof::{
    self, chain_residual, roof_extremize_with, sample_decomposition_with, BoundKind, Direction,
    EigenFactor, RoofConfig, RoofFunctional,
};
use crate::state::{DensityMatrix, PureState};

/// Side lengths below this count as zero.
pub const DEGENERATE_SIDE: f64 = 1e-9;
/// Tolerance on `C_a² − C² − τ²` separating right from obtuse.
pub const RIGHT_ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleClass {
    Right,
    Obtuse,
    Degenerate,
}

impl TriangleClass {
    pub fn as_str(self) -> &'static str {
        match self {
            TriangleClass::Right => "right",
            TriangleClass::Obtuse => "obtuse",
            TriangleClass::Degenerate => "degenerate",
        }
    }
}

/// Triangle with legs `C`, `τ` and long side `C_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleReport {
    pub concurrence: f64,
    pub tangle: f64,
    pub coa: f64,
    pub class: TriangleClass,
    /// Angle opposite `C_a`, when both legs are non-degenerate.
    pub angle_opposite_coa: Option<f64>,
}

pub fn triangle_classify(triple: &MeasureTriple) -> Result<TriangleReport> {
    let MeasureTriple {
        concurrence,
        coa,
        tangle,
    } = *triple;
    if [concurrence, coa, tangle]
        .iter()
        .any(|v| !v.is_finite() || *v < 0.0)
    {
        return Err(Error::InvalidArgument(format!(
            "triangle sides must be finite and non-negative: {triple:?}"
        )));
    }
    let excess = coa * coa - concurrence * concurrence - tangle * tangle;
    if excess < -RIGHT_ANGLE_TOL {
        return Err(Error::InvalidArgument(format!(
            "C_a² < C² + τ² by {:e}: not a monogamy triangle",
            -excess
        )));
    }
    let degenerate = [concurrence, coa, tangle]
        .iter()
        .any(|&v| v < DEGENERATE_SIDE);
    let class = if degenerate {
        TriangleClass::Degenerate
    } else if excess.abs() < RIGHT_ANGLE_TOL {
        TriangleClass::Right
    } else {
        TriangleClass::Obtuse
    };
    let angle_opposite_coa =
        (concurrence > DEGENERATE_SIDE && tangle > DEGENERATE_SIDE).then(|| {
            let cos = (concurrence * concurrence + tangle * tangle - coa * coa)
                / (2.0 * concurrence * tangle);
            cos.clamp(-1.0, 1.0).acos()
        });
    Ok(TriangleReport {
        concurrence,
        tangle,
        coa,
        class,
        angle_opposite_coa,
    })
}

/// `(C, C_a, τ)` of a pure state through three separate routes, and the
/// residual of `C_a² = C² + τ²` between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Check {
    /// `C` from the `λ` spectrum, `C_a` from `tr sqrt(sqrt(ρ) ρ̃ sqrt(ρ))`,
    /// `τ` from the piecewise closed form.
    pub triple: MeasureTriple,
    pub residual: f64,
}

pub fn verify_theorem1(psi: &PureState) -> Result<Theorem1Check> {
    let rho = measures::reduced_ab(psi)?;
    let triple = MeasureTriple {
        concurrence: measures::concurrence(&rho)?,
        coa: measures::coa_trace_sqrt(&rho)?,
        tangle: measures::tau_formula(&rho)?,
    };
    Ok(Theorem1Check {
        triple,
        residual: triple.pythagorean_residual(),
    })
}

/// Alice and Bob's qubits plus the ordered qubits merged into Charlie.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupingSpec {
    pub pair: (usize, usize),
    pub rest: Vec<usize>,
}

impl GroupingSpec {
    /// Pair `(i, j)` with the remaining qubits in ascending order.
    pub fn new(qubits: usize, i: usize, j: usize) -> Result<Self> {
        let rest = (0..qubits).filter(|&k| k != i && k != j).collect();
        let spec = GroupingSpec { pair: (i, j), rest };
        spec.validate(qubits)?;
        Ok(spec)
    }

    pub fn with_rest(qubits: usize, pair: (usize, usize), rest: Vec<usize>) -> Result<Self> {
        let spec = GroupingSpec { pair, rest };
        spec.validate(qubits)?;
        Ok(spec)
    }

    pub fn validate(&self, qubits: usize) -> Result<()> {
        let (i, j) = self.pair;
        let mut all = vec![i, j];
        all.extend_from_slice(&self.rest);
        let mut sorted = all.clone();
        sorted.sort_unstable();
        if i == j || sorted != (0..qubits).collect::<Vec<_>>() {
            return Err(Error::InvalidGrouping(format!(
                "pair {:?} with rest {:?} is not a partition of {qubits} qubits",
                self.pair, self.rest
            )));
        }
        Ok(())
    }

    /// Ordering `[i, j, rest...]`.
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![self.pair.0, self.pair.1];
        order.extend_from_slice(&self.rest);
        order
    }

    /// `(i;j)`, the CSV label of the pair.
    pub fn label(&self) -> String {
        format!("({};{})", self.pair.0, self.pair.1)
    }
}

fn qubit_count(psi: &PureState) -> Result<usize> {
    if psi.dims().len() < 3 || psi.dims().iter().any(|&d| d != 2) {
        return Err(Error::InvalidGrouping(format!(
            "expected at least three qubits, got dims {:?}",
            psi.dims()
        )));
    }
    Ok(psi.dims().len())
}

/// Regroups an N-qubit state as `(2, 2, 2^(N-2))`: qubit `i` becomes Alice,
/// `j` Bob, and `rest` (in order, last fastest) Charlie. Only a permutation
/// of amplitudes.
pub fn group_qubits(psi: &PureState, spec: &GroupingSpec) -> Result<PureState> {
    let qubits = qubit_count(psi)?;
    spec.validate(qubits)?;
    let order = spec.order();
    let total = 1usize << qubits;
    let amps = psi.amplitudes();
    let mut out = ComplexVector::zeros(total);
    for (new_index, slot) in out.iter_mut().enumerate() {
        // bit for position p of the new ordering is (new_index >> (qubits-1-p)) & 1
        let mut old_index = 0usize;
        for (p, &q) in order.iter().enumerate() {
            let bit = (new_index >> (qubits - 1 - p)) & 1;
            old_index |= bit << (qubits - 1 - q);
        }
        *slot = amps[old_index];
    }
    PureState::new(vec![2, 2, total / 4], out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupingRow {
    pub spec: GroupingSpec,
    pub triple: MeasureTriple,
    pub theorem1_residual: f64,
}

/// One row per unordered pair `i < j`, in lexicographic pair order.
pub fn grouping_sweep(psi: &PureState) -> Result<Vec<GroupingRow>> {
    let qubits = qubit_count(psi)?;
    if qubits > 10 {
        return Err(Error::InvalidGrouping(format!(
            "grouping sweep supports at most 10 qubits, got {qubits}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..qubits)
        .flat_map(|i| ((i + 1)..qubits).map(move |j| (i, j)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(i, j)| {
            let spec = GroupingSpec::new(qubits, i, j)?;
            let grouped = group_qubits(psi, &spec)?;
            let triple = measures::triple_measures(&grouped)?;
            let theorem1_residual = verify_theorem1(&grouped)?.residual;
            Ok(GroupingRow {
                spec,
                triple,
                theorem1_residual,
            })
        })
        .collect()
}

/// Parametrized mixed three-qubit families for the mixed-state relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `p |GHZ><GHZ| + (1 − p) |000><000|`.
    GhzProduct,
    /// `p |GHZ><GHZ| + (1 − p) |W><W|`.
    GhzW,
    /// `p |000><000| + (1 − p) |+++><+++|`: separable for every `p`.
    Separable,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::GhzProduct => "ghz-product",
            Family::GhzW => "ghz-w",
            Family::Separable => "separable",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        [Family::GhzProduct, Family::GhzW, Family::Separable]
            .into_iter()
            .find(|f| f.name() == name)
    }

    pub fn all() -> [Family; 3] {
        [Family::GhzProduct, Family::GhzW, Family::Separable]
    }

    fn members(self) -> (PureState, PureState) {
        use crate::fixtures;
        match self {
            Family::GhzProduct => (fixtures::ghz(), fixtures::product_000()),
            Family::GhzW => (fixtures::ghz(), fixtures::w_state()),
            Family::Separable => {
                let plus = ComplexVector::from_element(8, c(1.0, 0.0));
                (
                    fixtures::product_000(),
                    PureState::normalized(vec![2, 2, 2], plus).expect("non-zero"),
                )
            }
        }
    }

    pub fn is_separable(self) -> bool {
        matches!(self, Family::Separable)
    }

    pub fn state(self, p: f64) -> Result<DensityMatrix> {
        let (a, b) = self.members();
        a.projector().mix(&b.projector(), p)
    }
}

/// Evidence for the mixed-state relation at one family parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Row {
    pub family: Family,
    pub param: f64,
    pub rank: usize,
    /// `C(ρ_AB)`, exact.
    pub concurrence: f64,
    /// Min-roof search value for `C_a(ρ_ABC)`.
    pub coa_roof: f64,
    /// Min-roof search value for `τ(ρ_ABC)`.
    pub tau_roof: f64,
    pub coa_bound: BoundKind,
    pub tau_bound: BoundKind,
    /// `coa_roof² − C² − tau_roof²`; informative only, since both roofs are
    /// one-sided.
    pub bound_gap: f64,
    pub chain_samples: usize,
    pub chain_violations: usize,
    pub max_chain_excess: f64,
    /// For rank-one points, `|C_a² − C² − τ²|` of the roof values.
    pub pure_residual: Option<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Theorem2Config {
    pub decompositions_per_point: usize,
    pub roof: RoofConfig,
}

impl Default for Theorem2Config {
    fn default() -> Self {
        Theorem2Config {
            decompositions_per_point: 1000,
            roof: RoofConfig::default(),
        }
    }
}

/// Tolerance on the separable-member tangle roof and pure-point residuals.
pub const FAMILY_ROOF_TOL: f64 = 1e-3;
pub const PURE_ROW_TOL: f64 = 1e-6;

fn chain_sizes<R: Rng + ?Sized>(rank: usize, rng: &mut R) -> usize {
    rng.random_range(rank..=2 * rank)
}

pub fn verify_theorem2_point(
    family: Family,
    param: f64,
    config: &Theorem2Config,
    seed: u64,
) -> Result<Theorem2Row> {
    let rho = family.state(param)?;
    let rank = EigenFactor::new(&rho)?.rank();
    let concurrence = measures::concurrence(&rho.partial_trace(&[0, 1])?)?;
    let coa = roof_extremize_with(
        &rho,
        RoofFunctional::Coa,
        Direction::Min,
        &config.roof,
        seed,
    )?;
    let tau = roof_extremize_with(
        &rho,
        RoofFunctional::Tangle,
        Direction::Min,
        &config.roof,
        seed ^ 0x5eed,
    )?;

    let chains: Vec<Result<roof::ChainResidual>> = (0..config.decompositions_per_point)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(seed, k as u64 + 1);
            let size = chain_sizes(rank, &mut rng);
            let d = sample_decomposition_with(&rho, size, &mut rng)?;
            chain_residual(&rho, &d)
        })
        .collect();
    let mut chain_violations = 0;
    let mut max_chain_excess = 0.0_f64;
    for chain in chains {
        let chain = chain?;
        if !chain.holds {
            chain_violations += 1;
        }
        max_chain_excess = max_chain_excess.max(chain.excess());
    }

    let pure_residual = (rank == 1)
        .then(|| (coa.value * coa.value - concurrence * concurrence - tau.value * tau.value).abs());
    let mut flagged = chain_violations > 0;
    if let Some(r) = pure_residual {
        flagged |= r > PURE_ROW_TOL;
    }
    if family.is_separable() {
        flagged |= concurrence > DEGENERATE_SIDE || tau.value > FAMILY_ROOF_TOL;
    }
    Ok(Theorem2Row {
        family,
        param,
        rank,
        concurrence,
        coa_roof: coa.value,
        tau_roof: tau.value,
        coa_bound: coa.bound,
        tau_bound: tau.bound,
        bound_gap: coa.value * coa.value - concurrence * concurrence - tau.value * tau.value,
        chain_samples: config.decompositions_per_point,
        chain_violations,
        max_chain_excess,
        pure_residual,
        flagged,
    })
}

/// One row per parameter point; rows never claim the mixed-state
/// inequality itself, only the chain checks and the exactly known cases.
pub fn verify_theorem2_family(
    family: Family,
    params: &[f64],
    config: &Theorem2Config,
    seed: u64,
) -> Result<Vec<Theorem2Row>> {
    params
        .iter()
        .enumerate()
        .map(|(k, &p)| verify_theorem2_point(family, p, config, seed.wrapping_add(k as u64 * 7919)))
        .collect()
}

/// `points` evenly spaced parameters on `[0, 1]`.
pub fn unit_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..points)
            .map(|k| k as f64 / (points - 1) as f64)
            .collect(),
    }
}
