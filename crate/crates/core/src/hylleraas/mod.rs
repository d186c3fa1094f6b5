//! Correlated-basis variational solver for two bosons bound to a fixed
//! center, with an explicit interparticle coordinate.
//!
//! The Hamiltonian treated here is, in dimensionless units,
//!
//! ```text
//! H = ½(|p₁|² + |p₂|²) − Z(1/r₁ + 1/r₂) + λ/r₁₂ ,
//! ```
//!
//! with Z > 0 and λ of either sign (λ = +1, Z = N for the two-electron-type
//! atom; λ = −β, Z = 1 for a gravitating pair about a grain).  Basis
//! functions are
//!
//! ```text
//! χ_{lmn} = e^{−α(r₁+r₂)} (r₁+r₂)^l (r₁−r₂)^{2m} r₁₂^n ,   l + 2m + n ≤ Ω,
//! ```
//!
//! symmetric under r₁ ↔ r₂ by construction (even powers only), so every
//! Rayleigh-Ritz eigenvalue is a rigorous upper bound on the bosonic ground
//! state.  The kinetic form is assembled in the symmetric first-derivative
//! form in (r₁, r₂, r₁₂), with cross terms weighted by
//! (r₁² − r₂² + r₁₂²)/(2 r₁ r₁₂) and its 1 ↔ 2 mirror, which keeps H
//! manifestly symmetric without numerically integrating Laplacians by parts.
//!
//! Matrices are assembled once at unit exponential scale; a dilation maps the
//! scale-α basis onto a diagonal rescaling of the unit-scale one, so
//! H(α) = α²·K − Zα·C + λα·P shares its generalized spectrum with the
//! directly assembled problem.  The α search reuses the raw matrices.

pub mod eigen;
pub mod quad;

use eigen::{overlap_condition, smallest_generalized_eigenpair, EigenError};
use nalgebra::{DMatrix, DVector};
use quad::{simplex_quadrature, QuadNode};
use thiserror::Error;

/// Golden-section tolerance for the exponential-scale search.
pub const ALPHA_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum HylleraasError {
    #[error("invalid two-body problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// One basis exponent triple; the t power stored is m, the basis carries t^{2m}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisTerm {
    pub l: u32,
    pub m: u32,
    pub n: u32,
}

impl BasisTerm {
    /// Truncation weight l + 2m + n.
    pub fn degree(&self) -> u32 {
        self.l + 2 * self.m + self.n
    }
}

/// The correlated basis at exponential scale α, truncated at l + 2m + n ≤ Ω.
///
/// Terms are ordered by degree band, so the basis for a smaller Ω is a prefix
/// of the basis for a larger one (nested spaces).
#[derive(Debug, Clone, PartialEq)]
pub struct HylleraasBasis {
    pub alpha: f64,
    pub omega: u32,
    terms: Vec<BasisTerm>,
}

impl HylleraasBasis {
    pub fn new(alpha: f64, omega: u32) -> Self {
        assert!(alpha > 0.0, "exponential scale must be positive");
        let mut terms = Vec::new();
        for degree in 0..=omega {
            for l in 0..=degree {
                for m in 0..=((degree - l) / 2) {
                    let n = degree - l - 2 * m;
                    terms.push(BasisTerm { l, m, n });
                }
            }
        }
        HylleraasBasis {
            alpha,
            omega,
            terms,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[BasisTerm] {
        &self.terms
    }

    /// Number of terms with degree ≤ omega (a prefix of `terms`).
    pub fn prefix_len(&self, omega: u32) -> usize {
        self.terms
            .iter()
            .take_while(|t| t.degree() <= omega)
            .count()
    }
}

/// Raw unit-scale matrices of the quadratic form pieces:
/// kinetic ½Σ|∇|², central Σ1/rᵢ, pair 1/r₁₂, and the overlap.
#[derive(Debug, Clone)]
pub struct RawMatrices {
    pub overlap: DMatrix<f64>,
    pub kinetic: DMatrix<f64>,
    pub central: DMatrix<f64>,
    pub pair: DMatrix<f64>,
    pub order_s: usize,
    pub order_inner: usize,
}

/// Per-node geometric factors; all carry the volume element r₁r₂r₁₂ already
/// multiplied in, so each is a polynomial in (s, t, u).
struct NodeFactors {
    w: Vec<f64>,
    vol: Vec<f64>,
    central: Vec<f64>,
    pair: Vec<f64>,
    cross1: Vec<f64>,
    cross2: Vec<f64>,
}

impl NodeFactors {
    fn from_nodes(nodes: &[QuadNode]) -> Self {
        let nn = nodes.len();
        let mut f = NodeFactors {
            w: Vec::with_capacity(nn),
            vol: Vec::with_capacity(nn),
            central: Vec::with_capacity(nn),
            pair: Vec::with_capacity(nn),
            cross1: Vec::with_capacity(nn),
            cross2: Vec::with_capacity(nn),
        };
        for q in nodes {
            let (s, t, u) = (q.s, q.t, q.u);
            let quarter = 0.25 * (s * s - t * t);
            f.w.push(q.w);
            // r₁r₂r₁₂
            f.vol.push(quarter * u);
            // (1/r₁ + 1/r₂)·r₁r₂r₁₂ = (r₁+r₂)·r₁₂
            f.central.push(s * u);
            // (1/r₁₂)·r₁r₂r₁₂ = r₁r₂
            f.pair.push(quarter);
            // c₁·r₁r₂r₁₂ with c₁ = (r₁²−r₂²+r₁₂²)/(2r₁r₁₂) = r₂(st+u²)/2
            f.cross1.push(0.25 * (s - t) * (s * t + u * u));
            // mirror: r₁(u²−st)/2
            f.cross2.push(0.25 * (s + t) * (u * u - s * t));
        }
        f
    }
}

/// Values and (s, t, u)-derivatives of one basis polynomial at every node.
/// The exponential is folded into the quadrature weight; the s-derivative
/// carries the −α from the exponential.
struct TermData {
    val: Vec<f64>,
    ds: Vec<f64>,
    dt: Vec<f64>,
    du: Vec<f64>,
}

fn term_data(term: &BasisTerm, alpha: f64, nodes: &[QuadNode]) -> TermData {
    let nn = nodes.len();
    let (l, m, n) = (term.l as i32, term.m as i32, term.n as i32);
    let mut td = TermData {
        val: Vec::with_capacity(nn),
        ds: Vec::with_capacity(nn),
        dt: Vec::with_capacity(nn),
        du: Vec::with_capacity(nn),
    };
    for q in nodes {
        let (s, t, u) = (q.s, q.t, q.u);
        let sl = s.powi(l);
        let t2m = t.powi(2 * m);
        let un = u.powi(n);
        let v = sl * t2m * un;
        td.val.push(v);
        let ds_poly = if l > 0 {
            f64::from(l) * s.powi(l - 1) * t2m * un
        } else {
            0.0
        };
        td.ds.push(ds_poly - alpha * v);
        td.dt.push(if m > 0 {
            f64::from(2 * m) * sl * t.powi(2 * m - 1) * un
        } else {
            0.0
        });
        td.du.push(if n > 0 {
            f64::from(n) * sl * t2m * u.powi(n - 1)
        } else {
            0.0
        });
    }
    td
}

/// Entries (overlap, kinetic, central, pair) of row `a` for columns b ≥ a.
fn row_entries(a: usize, terms: &[TermData], f: &NodeFactors) -> Vec<(f64, f64, f64, f64)> {
    let nb = terms.len();
    let ta = &terms[a];
    let mut out = Vec::with_capacity(nb - a);
    for tb in terms.iter().skip(a) {
        let mut s_ab = 0.0;
        let mut k_ab = 0.0;
        let mut c_ab = 0.0;
        let mut p_ab = 0.0;
        for i in 0..f.w.len() {
            let w = f.w[i];
            let vv = ta.val[i] * tb.val[i];
            s_ab += w * vv * f.vol[i];
            c_ab += w * vv * f.central[i];
            p_ab += w * vv * f.pair[i];
            // ½ Σ_particles ∇·∇ in (r₁, r₂, r₁₂): the diagonal derivative
            // products and the two cross terms, each against its measure-
            // weighted factor.
            let diag =
                2.0 * (ta.ds[i] * tb.ds[i] + ta.dt[i] * tb.dt[i] + ta.du[i] * tb.du[i]) * f.vol[i];
            let cross = ((ta.ds[i] + ta.dt[i]) * tb.du[i] + ta.du[i] * (tb.ds[i] + tb.dt[i]))
                * f.cross1[i]
                + ((ta.ds[i] - ta.dt[i]) * tb.du[i] + ta.du[i] * (tb.ds[i] - tb.dt[i]))
                    * f.cross2[i];
            k_ab += w * 0.5 * (diag + cross);
        }
        out.push((s_ab, k_ab, c_ab, p_ab));
    }
    out
}

fn assemble_from_rows(
    nb: usize,
    rows: Vec<Vec<(f64, f64, f64, f64)>>,
    order_s: usize,
    order_inner: usize,
) -> RawMatrices {
    let mut overlap = DMatrix::zeros(nb, nb);
    let mut kinetic = DMatrix::zeros(nb, nb);
    let mut central = DMatrix::zeros(nb, nb);
    let mut pair = DMatrix::zeros(nb, nb);
    for (a, row) in rows.into_iter().enumerate() {
        for (off, (s_ab, k_ab, c_ab, p_ab)) in row.into_iter().enumerate() {
            let b = a + off;
            overlap[(a, b)] = s_ab;
            overlap[(b, a)] = s_ab;
            kinetic[(a, b)] = k_ab;
            kinetic[(b, a)] = k_ab;
            central[(a, b)] = c_ab;
            central[(b, a)] = c_ab;
            pair[(a, b)] = p_ab;
            pair[(b, a)] = p_ab;
        }
    }
    RawMatrices {
        overlap,
        kinetic,
        central,
        pair,
        order_s,
        order_inner,
    }
}

/// Quadrature orders that integrate all matrix elements of a degree-Ω basis
/// exactly, with margin.
pub fn default_orders(omega: u32) -> (usize, usize) {
    (omega as usize + 6, omega as usize + 6)
}

/// Assemble the form matrices at exponential scale `alpha` (rayon-parallel
/// over rows under the default feature).
pub fn assemble_raw(alpha: f64, omega: u32, order_s: usize, order_inner: usize) -> RawMatrices {
    let basis = HylleraasBasis::new(alpha, omega);
    let nodes = simplex_quadrature(alpha, order_s, order_inner);
    let factors = NodeFactors::from_nodes(&nodes);
    let terms: Vec<TermData> = basis
        .terms()
        .iter()
        .map(|t| term_data(t, alpha, &nodes))
        .collect();
    let nb = terms.len();
    let rows = crate::exec::map_collect((0..nb).collect(), |a| row_entries(a, &terms, &factors));
    assemble_from_rows(nb, rows, order_s, order_inner)
}

/// Always-sequential variant of [`assemble_raw`]; benchmark baseline and the
/// fallback used when the `parallel` feature is disabled.
pub fn assemble_raw_serial(
    alpha: f64,
    omega: u32,
    order_s: usize,
    order_inner: usize,
) -> RawMatrices {
    let basis = HylleraasBasis::new(alpha, omega);
    let nodes = simplex_quadrature(alpha, order_s, order_inner);
    let factors = NodeFactors::from_nodes(&nodes);
    let terms: Vec<TermData> = basis
        .terms()
        .iter()
        .map(|t| term_data(t, alpha, &nodes))
        .collect();
    let nb = terms.len();
    let rows = (0..nb).map(|a| row_entries(a, &terms, &factors)).collect();
    assemble_from_rows(nb, rows, order_s, order_inner)
}

/// Hamiltonian and overlap matrices of the basis for central strength Z and
/// signed pair coupling λ, assembled directly at the basis's scale.
pub fn assemble(
    basis: &HylleraasBasis,
    central_strength: f64,
    pair_coeff: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let (order_s, order_inner) = default_orders(basis.omega);
    let raw = assemble_raw(basis.alpha, basis.omega, order_s, order_inner);
    let h = &raw.kinetic - central_strength * &raw.central + pair_coeff * &raw.pair;
    (h, raw.overlap)
}

/// A two-body problem about a fixed center: −Z(1/r₁+1/r₂) + λ/r₁₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBodyProblem {
    pub central_strength: f64,
    pub pair_coeff: f64,
}

impl TwoBodyProblem {
    pub fn new(central_strength: f64, pair_coeff: f64) -> Result<Self, HylleraasError> {
        if !(central_strength > 0.0) {
            return Err(HylleraasError::InvalidProblem(format!(
                "central strength must be positive, got {central_strength}"
            )));
        }
        Ok(TwoBodyProblem {
            central_strength,
            pair_coeff,
        })
    }
}

/// Exponential-scale policy for a solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaPolicy {
    Fixed(f64),
    /// Golden-section search over [0.5·Z, 2.5·Z] to [`ALPHA_TOLERANCE`].
    Optimize,
}

/// A converged variational solution; `energy` is a rigorous upper bound on
/// the bosonic two-body ground state of the problem.
#[derive(Debug, Clone)]
pub struct HylleraasSolution {
    pub basis: HylleraasBasis,
    /// Coefficients in the scale-α basis, normalized in its overlap metric.
    pub coeffs: DVector<f64>,
    pub energy: f64,
    /// |2⟨T⟩ + ⟨V⟩| / |E| at the solution.
    pub virial_residual: f64,
    pub order_s: usize,
    pub order_inner: usize,
    /// Energy of the nested basis truncated at each degree 0..=usable_omega,
    /// all at the final α.
    pub energies_by_omega: Vec<f64>,
    /// Largest degree whose overlap matrix was numerically positive definite;
    /// equals the requested Ω unless truncation was necessary.
    pub usable_omega: u32,
    pub alpha: f64,
}

/// Solve with default quadrature orders.
pub fn solve_two_body(
    problem: &TwoBodyProblem,
    omega: u32,
    alpha: AlphaPolicy,
) -> Result<HylleraasSolution, HylleraasError> {
    let (order_s, order_inner) = default_orders(omega);
    solve_two_body_with_orders(problem, omega, alpha, order_s, order_inner)
}

/// Full solver: assemble raw matrices once at unit scale, pick the usable
/// basis size, search α if requested, and report the nested-basis energies.
pub fn solve_two_body_with_orders(
    problem: &TwoBodyProblem,
    omega: u32,
    alpha: AlphaPolicy,
    order_s: usize,
    order_inner: usize,
) -> Result<HylleraasSolution, HylleraasError> {
    let z = problem.central_strength;
    let lam = problem.pair_coeff;
    if !(z > 0.0) {
        return Err(HylleraasError::InvalidProblem(
            "central strength must be positive".into(),
        ));
    }
    let unit_basis = HylleraasBasis::new(1.0, omega);
    let raw = assemble_raw(1.0, omega, order_s, order_inner);

    // Largest nested basis whose overlap stays positive definite and
    // acceptably conditioned at working precision.
    let mut usable_omega = omega;
    let size = loop {
        let k = unit_basis.prefix_len(usable_omega);
        let ok = overlap_condition(&raw.overlap.view((0, 0), (k, k)).into_owned())
            .map(|c| c < eigen::CONDITION_LIMIT)
            .unwrap_or(false);
        if ok {
            break k;
        }
        if usable_omega == 0 {
            // A single s-type function always has a 1x1 positive overlap.
            return Err(HylleraasError::Eigen(EigenError::NotPositiveDefinite {
                size: 1,
            }));
        }
        usable_omega -= 1;
    };

    let s_k = raw.overlap.view((0, 0), (size, size)).into_owned();
    let k_k = raw.kinetic.view((0, 0), (size, size)).into_owned();
    let c_k = raw.central.view((0, 0), (size, size)).into_owned();
    let p_k = raw.pair.view((0, 0), (size, size)).into_owned();

    let solve_at = |a: f64, sz: usize| -> Result<eigen::GeneralizedEigenpair, HylleraasError> {
        let h = a * a * k_k.view((0, 0), (sz, sz)).into_owned()
            - z * a * c_k.view((0, 0), (sz, sz)).into_owned()
            + lam * a * p_k.view((0, 0), (sz, sz)).into_owned();
        Ok(smallest_generalized_eigenpair(
            &h,
            &s_k.view((0, 0), (sz, sz)).into_owned(),
        )?)
    };

    let alpha_star = match alpha {
        AlphaPolicy::Fixed(a) => {
            if !(a > 0.0) {
                return Err(HylleraasError::InvalidProblem(format!(
                    "exponential scale must be positive, got {a}"
                )));
            }
            a
        }
        AlphaPolicy::Optimize => {
            let f = |a: f64| solve_at(a, size).map(|p| p.value);
            golden_min(f, 0.5 * z, 2.5 * z, ALPHA_TOLERANCE)?
        }
    };

    let mut energies_by_omega = Vec::with_capacity(usable_omega as usize + 1);
    for om in 0..usable_omega {
        let k = unit_basis.prefix_len(om);
        energies_by_omega.push(solve_at(alpha_star, k)?.value);
    }
    let final_pair = solve_at(alpha_star, size)?;
    energies_by_omega.push(final_pair.value);

    let c = &final_pair.vector;
    let t_exp = alpha_star * alpha_star * (c.transpose() * &k_k * c)[(0, 0)];
    let v_exp = -z * alpha_star * (c.transpose() * &c_k * c)[(0, 0)]
        + lam * alpha_star * (c.transpose() * &p_k * c)[(0, 0)];
    let energy = final_pair.value;
    let virial_residual = (2.0 * t_exp + v_exp).abs() / energy.abs();

    // Map unit-scale coefficients onto the scale-α basis: the dilation sends
    // χ(α)_a to α^{-(3+d_a)} times the unit-scale function in scaled
    // coordinates, so ĉ_a = α^{3+d_a}·c_a is normalized in the α metric.
    let basis = HylleraasBasis::new(alpha_star, usable_omega);
    let coeffs = DVector::from_fn(size, |i, _| {
        alpha_star.powi(3 + basis.terms()[i].degree() as i32) * c[i]
    });

    Ok(HylleraasSolution {
        basis,
        coeffs,
        energy,
        virial_residual,
        order_s,
        order_inner,
        energies_by_omega,
        usable_omega,
        alpha: alpha_star,
    })
}

/// Deterministic golden-section minimizer; returns the midpoint of the final
/// bracket.
fn golden_min(
    mut f: impl FnMut(f64) -> Result<f64, HylleraasError>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<f64, HylleraasError> {
    let invphi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a) > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Single-function Rayleigh quotient: E(α) = α² − 2Zα + (5/8)λα.
    fn one_term_energy(alpha: f64, z: f64, lam: f64) -> f64 {
        alpha * alpha - 2.0 * z * alpha + 0.625 * lam * alpha
    }

    #[test]
    fn basis_counts_and_nesting() {
        let b = HylleraasBasis::new(1.0, 8);
        assert_eq!(b.prefix_len(0), 1);
        assert_eq!(b.prefix_len(1), 3); // (0,0,0),(1,0,0),(0,0,1)
        assert_eq!(b.len(), 95);
        for (i, t) in b.terms().iter().enumerate() {
            if i > 0 {
                assert!(t.degree() >= b.terms()[i - 1].degree());
            }
        }
        let smaller = HylleraasBasis::new(1.0, 5);
        assert_eq!(&b.terms()[..smaller.len()], smaller.terms());
    }

    #[test]
    fn one_term_matrices_match_closed_forms() {
        for &(alpha, z, lam) in &[(1.0, 1.0, 0.0), (1.6875, 2.0, 1.0), (1.3, 1.0, -1.0)] {
            let basis = HylleraasBasis::new(alpha, 0);
            let (h, s) = assemble(&basis, z, lam);
            let e = h[(0, 0)] / s[(0, 0)];
            assert_relative_eq!(e, one_term_energy(alpha, z, lam), max_relative = 1e-12);
        }
    }

    #[test]
    fn separable_two_hydrogen_limit() {
        // λ = 0, Z = 1, α = 1, Ω = 0: two independent ground states at −1/2.
        let problem = TwoBodyProblem::new(1.0, 0.0).unwrap();
        let sol = solve_two_body(&problem, 0, AlphaPolicy::Fixed(1.0)).unwrap();
        assert_relative_eq!(sol.energy, -1.0, max_relative = 1e-8);
    }

    #[test]
    fn separable_limit_improves_toward_exact_with_omega() {
        // λ = 0 at any Z: exact energy is −Z² and α = Z is optimal already
        // in the one-term basis; larger bases must not go below −Z².
        let problem = TwoBodyProblem::new(1.5, 0.0).unwrap();
        let sol = solve_two_body(&problem, 4, AlphaPolicy::Optimize).unwrap();
        assert!(sol.energy >= -2.25 - 1e-9);
        assert_relative_eq!(sol.energy, -2.25, max_relative = 1e-7);
    }

    #[test]
    fn helium_type_one_term_optimum() {
        let problem = TwoBodyProblem::new(2.0, 1.0).unwrap();
        let sol = solve_two_body(&problem, 0, AlphaPolicy::Optimize).unwrap();
        let exact = -(27.0f64 / 16.0).powi(2);
        assert_relative_eq!(sol.energy, exact, max_relative = 1e-4);
        assert_relative_eq!(sol.alpha, 27.0 / 16.0, max_relative = 2e-3);
    }

    #[test]
    fn rayleigh_ritz_monotone_in_omega_at_fixed_alpha() {
        let problem = TwoBodyProblem::new(2.0, 1.0).unwrap();
        let sol = solve_two_body(&problem, 8, AlphaPolicy::Fixed(1.8)).unwrap();
        assert_eq!(sol.usable_omega, 8);
        for w in sol.energies_by_omega.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "not monotone: {w:?}");
        }
    }

    #[test]
    fn attraction_monotone_in_pair_coupling() {
        let mut last = f64::INFINITY;
        for lam in [0.5, 0.0, -0.5, -1.0] {
            let problem = TwoBodyProblem::new(1.0, lam).unwrap();
            let sol = solve_two_body(&problem, 4, AlphaPolicy::Fixed(1.2)).unwrap();
            assert!(sol.energy <= last + 1e-12);
            last = sol.energy;
        }
    }

    #[test]
    fn grain_pair_below_separable_value() {
        // Z = 1, λ = −1: attraction pulls below the two-hydrogen value −1.
        let problem = TwoBodyProblem::new(1.0, -1.0).unwrap();
        let sol = solve_two_body(&problem, 6, AlphaPolicy::Optimize).unwrap();
        assert!(sol.energy < -1.0);
    }

    /// Scaling all couplings by s dilates the ground state and multiplies
    /// the energy by s²; an independent algebraic check of the assembly.
    #[test]
    fn coupling_scaling_relation() {
        for &(z, lam, s) in &[(1.0, -1.0, 2.0), (1.5, 0.5, 3.0)] {
            let base = solve_two_body(
                &TwoBodyProblem::new(z, lam).unwrap(),
                5,
                AlphaPolicy::Optimize,
            )
            .unwrap();
            let scaled = solve_two_body(
                &TwoBodyProblem::new(s * z, s * lam).unwrap(),
                5,
                AlphaPolicy::Optimize,
            )
            .unwrap();
            assert_relative_eq!(scaled.energy, s * s * base.energy, max_relative = 1e-6);
        }
    }

    #[test]
    fn quadrature_doubling_is_inert() {
        let problem = TwoBodyProblem::new(2.0, 1.0).unwrap();
        let base =
            solve_two_body_with_orders(&problem, 6, AlphaPolicy::Fixed(1.8), 12, 12).unwrap();
        let doubled =
            solve_two_body_with_orders(&problem, 6, AlphaPolicy::Fixed(1.8), 24, 24).unwrap();
        assert!((base.energy - doubled.energy).abs() < 1e-8);
    }

    #[test]
    fn virial_residual_small_at_joint_optimum() {
        let problem = TwoBodyProblem::new(2.0, 1.0).unwrap();
        let sol = solve_two_body(&problem, 8, AlphaPolicy::Optimize).unwrap();
        assert!(
            sol.virial_residual < 1e-3,
            "virial residual {}",
            sol.virial_residual
        );
    }

    /// Cholesky-success oracle for the overlap, and where double precision
    /// gives out: the factorization holds through degree 9 (condition ~4e15
    /// there), degree 10 is numerically indefinite, and the usability gate
    /// truncates at degree 8.
    #[test]
    fn overlap_definiteness_by_omega() {
        let raw = assemble_raw(1.0, 10, 16, 16);
        let basis = HylleraasBasis::new(1.0, 10);
        for om in 0..=9u32 {
            let k = basis.prefix_len(om);
            let s = raw.overlap.view((0, 0), (k, k)).into_owned();
            assert!(
                nalgebra::Cholesky::new(s.clone()).is_some(),
                "cholesky failed at omega {om}"
            );
            let cond = overlap_condition(&s).unwrap();
            if om <= 8 {
                assert!(
                    cond < eigen::CONDITION_LIMIT,
                    "omega {om}: condition {cond:.3e}"
                );
            }
        }
        let full = raw.overlap.clone();
        assert!(overlap_condition(&full).is_err());

        let problem = TwoBodyProblem::new(2.0, 1.0).unwrap();
        let sol = solve_two_body(&problem, 10, AlphaPolicy::Fixed(1.8)).unwrap();
        assert_eq!(sol.usable_omega, 8);
    }

    /// Direct assembly at scale α and the α-scaled unit assembly are related
    /// by a diagonal similarity, so the generalized spectra agree.
    #[test]
    fn direct_and_scaled_assembly_agree() {
        let alpha = 1.7;
        let (z, lam) = (2.0, 1.0);
        let basis = HylleraasBasis::new(alpha, 3);
        let (h, s) = assemble(&basis, z, lam);
        let direct = smallest_generalized_eigenpair(&h, &s).unwrap();

        let problem = TwoBodyProblem::new(z, lam).unwrap();
        let scaled = solve_two_body(&problem, 3, AlphaPolicy::Fixed(alpha)).unwrap();
        assert_relative_eq!(direct.value, scaled.energy, max_relative = 1e-11);
    }

    #[test]
    fn invalid_problems_rejected() {
        assert!(TwoBodyProblem::new(0.0, 1.0).is_err());
        let p = TwoBodyProblem::new(1.0, 0.0).unwrap();
        assert!(solve_two_body(&p, 2, AlphaPolicy::Fixed(-1.0)).is_err());
    }
}
