//! Hamiltonian families, dimensionless reductions, classical phase-space
//! evaluation, the Fisher-Ruelle pair decomposition, and the complete-graph
//! bond identity.
//!
//! Three families are supported, each reduced to fixed dimensionless units so
//! every downstream number is O(1):
//!
//! * `CoulombAtom` — N bosonic charges attracted by a fixed nucleus of
//!   strength N·z, repelling pairwise.  Units: length ħ²/(m z²e²),
//!   energy m z⁴e⁴/ħ².  Reduced Hamiltonian
//!   `½ Σ|p_k|² − N Σ 1/|q_k| + Σ_{k<l} 1/|q_k−q_l|`.
//! * `NewtonFixedGrain` — N bosons attracted by a fixed grain and by each
//!   other.  Units: energy G²M²m³/ħ².  Reduced Hamiltonian
//!   `½ Σ|p_k|² − Σ 1/|q_k| − β Σ_{k<l} 1/|q_k−q_l|`, β = m/M.
//! * `NewtonIntrinsic` — the translation-invariant star after removing the
//!   center of mass.  Units: energy G²m⁵/ħ².  Reduced Hamiltonian
//!   `Σ_{k<l} ( |p_k−p_l|²/(2N) − 1/|q_k−q_l| )`.
//!
//! The `pair_rescale` option divides the pair coupling by (N−1), the
//! color-singlet baryon variant where the chain inequality relates physical
//! N- and (N−1)-body systems directly.

use nalgebra::Vector3;
use num::{BigInt, BigRational, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Radius of the sampling ball for random phase points.
pub const SAMPLE_BALL_RADIUS: f64 = 4.0;
/// Configurations with any pair (or center) distance below this are resampled.
pub const SAMPLE_MIN_DISTANCE: f64 = 1e-3;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid system: {0}")]
    InvalidSpec(String),
    #[error("phase point has {found} particles, system expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("singular configuration: {0}")]
    SingularConfiguration(String),
    #[error("pair decomposition requires N >= 2, got {0}")]
    TooFewParticles(u32),
    #[error("graph identity requires N >= 3, got {0}")]
    GraphTooSmall(u32),
}

/// Which of the three Hamiltonian families a system belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    CoulombAtom,
    NewtonFixedGrain,
    NewtonIntrinsic,
}

impl SystemKind {
    pub fn label(self) -> &'static str {
        match self {
            SystemKind::CoulombAtom => "coulomb_atom",
            SystemKind::NewtonFixedGrain => "newton_fixed_grain",
            SystemKind::NewtonIntrinsic => "newton_intrinsic",
        }
    }

    /// Whether the reduced Hamiltonian carries a central −1/|q| attraction.
    pub fn has_central_term(self) -> bool {
        !matches!(self, SystemKind::NewtonIntrinsic)
    }
}

/// Physical constants used only to restore dimensionless results to physical
/// units.  All default to 1 (pure dimensionless mode).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    /// Boson mass m.
    pub mass: f64,
    /// Squared elementary charge e² (Coulomb family).
    pub e2: f64,
    /// Gravitational constant G (Newton families).
    pub grav: f64,
    /// Grain mass M (fixed-grain family).
    pub grain_mass: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            hbar: 1.0,
            mass: 1.0,
            e2: 1.0,
            grav: 1.0,
            grain_mass: 1.0,
        }
    }
}

/// A concrete N-body system before nondimensionalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub kind: SystemKind,
    /// Number of bosons.
    pub n: u32,
    /// Positive integer charge multiplier (Coulomb only).
    pub z: u32,
    /// β = m/M, boson-to-grain mass ratio (fixed grain only).
    pub mass_ratio: f64,
    /// Divide the pair coupling by (N−1) (baryon-model variant).
    pub pair_rescale: bool,
}

impl SystemSpec {
    pub fn coulomb(n: u32, z: u32) -> Self {
        SystemSpec {
            kind: SystemKind::CoulombAtom,
            n,
            z,
            mass_ratio: 1.0,
            pair_rescale: false,
        }
    }

    pub fn fixed_grain(n: u32, mass_ratio: f64) -> Self {
        SystemSpec {
            kind: SystemKind::NewtonFixedGrain,
            n,
            z: 1,
            mass_ratio,
            pair_rescale: false,
        }
    }

    pub fn intrinsic(n: u32) -> Self {
        SystemSpec {
            kind: SystemKind::NewtonIntrinsic,
            n,
            z: 1,
            mass_ratio: 1.0,
            pair_rescale: false,
        }
    }

    pub fn with_pair_rescale(mut self) -> Self {
        self.pair_rescale = true;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n < 1 {
            return Err(ModelError::InvalidSpec("N must be >= 1".into()));
        }
        match self.kind {
            SystemKind::CoulombAtom => {
                if self.z < 1 {
                    return Err(ModelError::InvalidSpec("z must be >= 1".into()));
                }
            }
            SystemKind::NewtonFixedGrain => {
                if !(self.mass_ratio > 0.0) {
                    return Err(ModelError::InvalidSpec(format!(
                        "mass ratio must be positive, got {}",
                        self.mass_ratio
                    )));
                }
            }
            SystemKind::NewtonIntrinsic => {
                if self.n < 2 {
                    return Err(ModelError::InvalidSpec(
                        "the intrinsic system is an (N-1)-body problem; N must be >= 2".into(),
                    ));
                }
            }
        }
        if self.pair_rescale && self.n < 2 {
            return Err(ModelError::InvalidSpec(
                "pair rescaling by 1/(N-1) needs N >= 2".into(),
            ));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        let base = match self.kind {
            SystemKind::CoulombAtom => format!("coulomb_atom[z={}]", self.z),
            SystemKind::NewtonFixedGrain => format!("newton_fixed_grain[beta={}]", self.mass_ratio),
            SystemKind::NewtonIntrinsic => "newton_intrinsic".to_string(),
        };
        if self.pair_rescale {
            format!("{base}/pair_rescaled")
        } else {
            base
        }
    }
}

/// Dimensionless coefficients of a reduced Hamiltonian, plus the units that
/// restore physical values.
///
/// For `CoulombAtom` and `NewtonFixedGrain`:
/// `H = kinetic·Σ|p_k|² − central·Σ 1/|q_k| + pair·Σ_{k<l} 1/|q_k−q_l|`
/// (pair is signed: positive repulsive, negative attractive).
///
/// For `NewtonIntrinsic` the kinetic coefficient multiplies the pair momenta:
/// `H = Σ_{k<l} ( kinetic·|p_k−p_l|² + pair·1/|q_k−q_l| )` with central = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedSystem {
    pub kind: SystemKind,
    pub n: u32,
    pub kinetic: f64,
    pub central: f64,
    pub pair: f64,
    /// Multiplying a dimensionless energy by this restores physical units.
    pub energy_unit: f64,
    /// Multiplying a dimensionless length by this restores physical units.
    pub length_unit: f64,
}

/// Nondimensionalize a system with unit physical constants.
pub fn reduce(spec: &SystemSpec) -> Result<ReducedSystem, ModelError> {
    reduce_with_constants(spec, &PhysicalConstants::default())
}

/// Nondimensionalize a system, computing the unit-restoration factors from
/// the given constants.
pub fn reduce_with_constants(
    spec: &SystemSpec,
    c: &PhysicalConstants,
) -> Result<ReducedSystem, ModelError> {
    spec.validate()?;
    let n = spec.n;
    let rescale = if spec.pair_rescale {
        1.0 / f64::from(n - 1)
    } else {
        1.0
    };
    let (kinetic, central, pair, energy_unit, length_unit) = match spec.kind {
        SystemKind::CoulombAtom => {
            let z2e2 = f64::from(spec.z).powi(2) * c.e2;
            (
                0.5,
                f64::from(n),
                1.0 * rescale,
                c.mass * z2e2 * z2e2 / (c.hbar * c.hbar),
                c.hbar * c.hbar / (c.mass * z2e2),
            )
        }
        SystemKind::NewtonFixedGrain => {
            let gmm = c.grav * c.grain_mass * c.mass;
            (
                0.5,
                1.0,
                -spec.mass_ratio * rescale,
                gmm * gmm * c.mass / (c.hbar * c.hbar),
                c.hbar * c.hbar / (gmm * c.mass),
            )
        }
        SystemKind::NewtonIntrinsic => {
            let gm2 = c.grav * c.mass * c.mass;
            (
                1.0 / (2.0 * f64::from(n)),
                0.0,
                -rescale,
                gm2 * gm2 * c.mass / (c.hbar * c.hbar),
                c.hbar * c.hbar / (gm2 * c.mass),
            )
        }
    };
    Ok(ReducedSystem {
        kind: spec.kind,
        n,
        kinetic,
        central,
        pair,
        energy_unit,
        length_unit,
    })
}

/// A classical phase-space point for N particles.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub momenta: Vec<Vector3<f64>>,
    pub positions: Vec<Vector3<f64>>,
}

impl PhasePoint {
    pub fn new(momenta: Vec<Vector3<f64>>, positions: Vec<Vector3<f64>>) -> Self {
        assert_eq!(momenta.len(), positions.len());
        PhasePoint { momenta, positions }
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    /// Apply the same permutation to momenta and positions.
    pub fn permuted(&self, perm: &[usize]) -> PhasePoint {
        PhasePoint {
            momenta: perm.iter().map(|&i| self.momenta[i]).collect(),
            positions: perm.iter().map(|&i| self.positions[i]).collect(),
        }
    }
}

/// One summand of the pair decomposition, indexed by an unordered pair k < l.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerm {
    pub k: usize,
    pub l: usize,
    pub value: f64,
}

/// Compensated accumulator; keeps the decomposition residual at the
/// per-term rounding level even when the total nearly cancels.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

fn check_point(sys: &ReducedSystem, x: &PhasePoint) -> Result<(), ModelError> {
    if x.n() != sys.n as usize {
        return Err(ModelError::DimensionMismatch {
            expected: sys.n as usize,
            found: x.n(),
        });
    }
    Ok(())
}

fn central_distance(sys: &ReducedSystem, q: &Vector3<f64>, k: usize) -> Result<f64, ModelError> {
    let r = q.norm();
    if sys.kind.has_central_term() && r == 0.0 {
        return Err(ModelError::SingularConfiguration(format!(
            "particle {k} sits on the attracting center"
        )));
    }
    Ok(r)
}

fn pair_distance(
    qk: &Vector3<f64>,
    ql: &Vector3<f64>,
    k: usize,
    l: usize,
) -> Result<f64, ModelError> {
    let r = (qk - ql).norm();
    if r == 0.0 {
        return Err(ModelError::SingularConfiguration(format!(
            "particles {k} and {l} coincide"
        )));
    }
    Ok(r)
}

/// Value of the classical reduced Hamiltonian at a phase point.
pub fn classical_energy(sys: &ReducedSystem, x: &PhasePoint) -> Result<f64, ModelError> {
    check_point(sys, x)?;
    let n = sys.n as usize;
    let mut e = KahanSum::default();
    match sys.kind {
        SystemKind::CoulombAtom | SystemKind::NewtonFixedGrain => {
            for k in 0..n {
                e.add(sys.kinetic * x.momenta[k].norm_squared());
                e.add(-sys.central / central_distance(sys, &x.positions[k], k)?);
            }
            for k in 0..n {
                for l in (k + 1)..n {
                    e.add(sys.pair / pair_distance(&x.positions[k], &x.positions[l], k, l)?);
                }
            }
        }
        SystemKind::NewtonIntrinsic => {
            for k in 0..n {
                for l in (k + 1)..n {
                    let dp = x.momenta[k] - x.momenta[l];
                    e.add(sys.kinetic * dp.norm_squared());
                    e.add(sys.pair / pair_distance(&x.positions[k], &x.positions[l], k, l)?);
                }
            }
        }
    }
    let e = e.value();
    if !e.is_finite() {
        return Err(ModelError::SingularConfiguration(
            "non-finite Hamiltonian value".into(),
        ));
    }
    Ok(e)
}

/// Pair decomposition `H = Σ_{k<l} U_{k,l}`.
///
/// For the families with a central term, kinetic and central one-body pieces
/// are spread over the N−1 pairs containing each particle:
/// `U_{k,l} = [kinetic·(|p_k|²+|p_l|²) − central·(1/|q_k|+1/|q_l|)]/(N−1)
///            + pair/|q_k−q_l|`.
/// The intrinsic family is already a pure pair sum and returns its summands
/// `W_{k,l} = kinetic·|p_k−p_l|² + pair/|q_k−q_l|` unchanged.
pub fn pair_terms(sys: &ReducedSystem, x: &PhasePoint) -> Result<Vec<PairTerm>, ModelError> {
    check_point(sys, x)?;
    if sys.n < 2 {
        return Err(ModelError::TooFewParticles(sys.n));
    }
    let n = sys.n as usize;
    let mut terms = Vec::with_capacity(n * (n - 1) / 2);
    match sys.kind {
        SystemKind::CoulombAtom | SystemKind::NewtonFixedGrain => {
            let share = 1.0 / (n as f64 - 1.0);
            // Precompute the one-body pieces so each enters every pair once.
            let mut one_body = Vec::with_capacity(n);
            for k in 0..n {
                let r = central_distance(sys, &x.positions[k], k)?;
                one_body.push(sys.kinetic * x.momenta[k].norm_squared() - sys.central / r);
            }
            for k in 0..n {
                for l in (k + 1)..n {
                    let r_kl = pair_distance(&x.positions[k], &x.positions[l], k, l)?;
                    terms.push(PairTerm {
                        k,
                        l,
                        value: share * (one_body[k] + one_body[l]) + sys.pair / r_kl,
                    });
                }
            }
        }
        SystemKind::NewtonIntrinsic => {
            for k in 0..n {
                for l in (k + 1)..n {
                    let dp = x.momenta[k] - x.momenta[l];
                    let r_kl = pair_distance(&x.positions[k], &x.positions[l], k, l)?;
                    terms.push(PairTerm {
                        k,
                        l,
                        value: sys.kinetic * dp.norm_squared() + sys.pair / r_kl,
                    });
                }
            }
        }
    }
    Ok(terms)
}

/// Relative defect of the pair decomposition at a phase point,
/// `|Σ U_{k,l} − H| / |H|`.
pub fn pair_decomposition_residual(sys: &ReducedSystem, x: &PhasePoint) -> Result<f64, ModelError> {
    let e = classical_energy(sys, x)?;
    let mut sum = KahanSum::default();
    for term in pair_terms(sys, x)? {
        sum.add(term.value);
    }
    Ok((sum.value() - e).abs() / e.abs())
}

/// Residuals over a batch of phase points (rayon-parallel under the default
/// feature).
pub fn pair_decomposition_residuals(
    sys: &ReducedSystem,
    points: &[PhasePoint],
) -> Result<Vec<f64>, ModelError> {
    let out = crate::exec::map_collect(points.iter().collect::<Vec<_>>(), |x| {
        pair_decomposition_residual(sys, x)
    });
    out.into_iter().collect()
}

/// Always-sequential variant of [`pair_decomposition_residuals`], kept as the
/// benchmark baseline.
pub fn pair_decomposition_residuals_serial(
    sys: &ReducedSystem,
    points: &[PhasePoint],
) -> Result<Vec<f64>, ModelError> {
    points
        .iter()
        .map(|x| pair_decomposition_residual(sys, x))
        .collect()
}

/// Symmetric rational weights on the bonds of a complete N-graph.
#[derive(Debug, Clone, PartialEq)]
pub struct BondWeights {
    n: u32,
    w: Vec<BigRational>,
}

impl BondWeights {
    /// Build weights from a function of the unordered pair (k, l), 0-based.
    pub fn from_fn(n: u32, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let n_us = n as usize;
        let mut w = Vec::with_capacity(n_us * n_us.saturating_sub(1) / 2);
        for k in 0..n_us {
            for l in (k + 1)..n_us {
                w.push(f(k, l));
            }
        }
        BondWeights { n, w }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn get(&self, k: usize, l: usize) -> &BigRational {
        assert!(k < l && l < self.n as usize);
        // Row-major upper triangle: bonds (k, k+1..n) start at offset
        // k*n - k*(k+1)/2 - k ... easier to recompute directly.
        let n = self.n as usize;
        let idx = k * (2 * n - k - 1) / 2 + (l - k - 1);
        &self.w[idx]
    }
}

/// Complete-graph bond identity: the bond sum of a complete N-graph equals
/// 1/(N−2) times the bond sums of all its complete (N−1)-subgraphs.
///
/// Returns `(lhs, rhs)` computed in exact rational arithmetic; they are equal
/// for every weight assignment when N ≥ 3.
pub fn graph_identity_check(b: &BondWeights) -> Result<(BigRational, BigRational), ModelError> {
    let n = b.n() as usize;
    if n < 3 {
        return Err(ModelError::GraphTooSmall(b.n()));
    }
    let mut lhs = BigRational::zero();
    for k in 0..n {
        for l in (k + 1)..n {
            lhs += b.get(k, l);
        }
    }
    let mut inner_total = BigRational::zero();
    for hole in 0..n {
        for k in 0..n {
            for l in (k + 1)..n {
                if k != hole && l != hole {
                    inner_total += b.get(k, l);
                }
            }
        }
    }
    let rhs = inner_total / BigRational::from(BigInt::from(n as i64 - 2));
    Ok((lhs, rhs))
}

/// Draw a nonsingular random phase point: positions uniform in a ball of
/// radius [`SAMPLE_BALL_RADIUS`], rejecting configurations with any pair
/// distance (or distance to the center, when a central term applies) below
/// [`SAMPLE_MIN_DISTANCE`]; momenta standard normal per component.
pub fn random_phase_point(
    rng: &mut impl Rng,
    n: usize,
    needs_center_clearance: bool,
) -> PhasePoint {
    let mut positions: Vec<Vector3<f64>> = Vec::with_capacity(n);
    while positions.len() < n {
        let candidate = loop {
            let v = Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ) * SAMPLE_BALL_RADIUS;
            if v.norm() <= SAMPLE_BALL_RADIUS {
                break v;
            }
        };
        let clear_center = !needs_center_clearance || candidate.norm() >= SAMPLE_MIN_DISTANCE;
        let clear_pairs = positions
            .iter()
            .all(|p| (p - candidate).norm() >= SAMPLE_MIN_DISTANCE);
        if clear_center && clear_pairs {
            positions.push(candidate);
        }
    }
    let momenta = (0..n)
        .map(|_| {
            Vector3::new(
                standard_normal(rng),
                standard_normal(rng),
                standard_normal(rng),
            )
        })
        .collect();
    PhasePoint { momenta, positions }
}

/// Smallest accepted ratio |H| / Σ|U_{k,l}| for conditioned sampling.
pub const SAMPLE_CONDITION_FLOOR: f64 = 5e-3;

/// Draw a random phase point that is nonsingular and well-conditioned for
/// relative identity checks: configurations where the Hamiltonian nearly
/// cancels against its term magnitudes (|H| below [`SAMPLE_CONDITION_FLOOR`]
/// times Σ|U_{k,l}|) are redrawn, since the relative defect of any
/// floating-point evaluation is unbounded on the H = 0 surface.
pub fn conditioned_phase_point(
    rng: &mut impl Rng,
    sys: &ReducedSystem,
) -> Result<PhasePoint, ModelError> {
    loop {
        let x = random_phase_point(rng, sys.n as usize, sys.kind.has_central_term());
        let e = classical_energy(sys, &x)?;
        let magnitude: f64 = pair_terms(sys, &x)?.iter().map(|t| t.value.abs()).sum();
        if e.abs() >= SAMPLE_CONDITION_FLOOR * magnitude {
            return Ok(x);
        }
    }
}

/// Box-Muller standard normal draw; avoids a distributions dependency.
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
