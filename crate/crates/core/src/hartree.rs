//! Spherically symmetric one-orbital mean-field solver.
//!
//! Minimizes functionals of the form
//!
//! ```text
//! E[φ] = c_K·𝒦(φ) + c_C·𝒞(φ) + c_I·𝒤(φ⊗φ) ,
//!   𝒦 = ∫|∇φ|²,  𝒞 = ∫|φ|²/r,  𝒤 = ∬ |φ(x)|²|φ(y)|²/|x−y| ,
//! ```
//!
//! over normalized spherical orbitals, by self-consistent iteration of the
//! radial eigenproblem for u(r) = r·φ(r).  The product-state coefficients of
//! the three families all have c_K > 0, which together with the linear
//! dilation scaling of the potential terms keeps every functional bounded
//! below.  The minimum is a rigorous upper bound on the corresponding
//! bosonic ground-state energy.
//!
//! Discretization: uniform grid r_i = i·h with Dirichlet ends, three-point
//! Laplacian, and the shell-theorem reduction of the pair kernel to
//! 1/max(r, r′) (two cumulative sums per iteration).  The discrete forms are
//! chosen to match the eigenproblem's quadratic form exactly, so a converged
//! fixed point is a true critical point of the discrete functional and the
//! dilation (virial) residual is limited by the SCF tolerance, not by h.
//! Dilations map the grid family onto itself exactly, which makes the
//! scaling laws (k, c, i) → (λ²k, λc, λi) identities rather than
//! approximations.

use crate::estimate::{BoundKind, EnergyEstimate};
use crate::exact::HydrogenicProblem;
use crate::system::{ModelError, SystemKind, SystemSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HartreeError {
    #[error("invalid radial grid: {0}")]
    InvalidGrid(String),
    #[error("orbital is not normalized: ∫u²dr = {0}, expected 1/(4π)")]
    Unnormalized(f64),
    #[error("orbital and grid sizes differ: {u_len} values on a {n}-point grid")]
    SizeMismatch { u_len: usize, n: usize },
    #[error(
        "SCF did not converge after {iterations} iterations; energy trace tail: {trace_tail:?}"
    )]
    NotConverged {
        iterations: usize,
        trace_tail: Vec<f64>,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Uniform radial grid of n interior points, r_i = i·h with h = r_max/(n+1);
/// the Dirichlet endpoints r = 0 and r = r_max are implicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub n: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self, HartreeError> {
        if !(r_max > 0.0) || n < 16 {
            return Err(HartreeError::InvalidGrid(format!(
                "need r_max > 0 and n >= 16, got ({r_max}, {n})"
            )));
        }
        Ok(RadialGrid { r_max, n })
    }

    /// Default production grid.
    pub fn default_grid() -> Self {
        RadialGrid {
            r_max: 60.0,
            n: 6000,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / (self.n as f64 + 1.0)
    }

    pub fn r(&self, i: usize) -> f64 {
        (i as f64 + 1.0) * self.spacing()
    }
}

/// Normalized spherical orbital sampled as u(r) = r·φ(r) on a radial grid,
/// with the convention ∫u²dr = 1/(4π) (so ‖φ‖₂ = 1 after the angular
/// factor).  u(0) = 0 and u(r_max) = 0 are implicit Dirichlet values.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOrbital {
    pub grid: RadialGrid,
    pub u: Vec<f64>,
}

const NORM_TOLERANCE: f64 = 1e-6;

impl RadialOrbital {
    /// Build an orbital from unnormalized samples, normalizing to the
    /// ∫u²dr = 1/(4π) convention.
    pub fn from_samples(grid: RadialGrid, mut u: Vec<f64>) -> Result<Self, HartreeError> {
        if u.len() != grid.n {
            return Err(HartreeError::SizeMismatch {
                u_len: u.len(),
                n: grid.n,
            });
        }
        let h = grid.spacing();
        let norm: f64 = u.iter().map(|v| v * v).sum::<f64>() * h;
        if !(norm > 0.0) {
            return Err(HartreeError::Unnormalized(norm));
        }
        let scale = 1.0 / (4.0 * PI * norm).sqrt();
        for v in &mut u {
            *v *= scale;
        }
        Ok(RadialOrbital { grid, u })
    }

    /// Hydrogen-type seed ∝ r·e^{−κr}.
    pub fn exponential_seed(grid: RadialGrid, kappa: f64) -> Self {
        let u: Vec<f64> = (0..grid.n)
            .map(|i| {
                let r = grid.r(i);
                r * (-kappa * r).exp()
            })
            .collect();
        RadialOrbital::from_samples(grid, u).expect("seed is nonzero")
    }

    fn check_normalized(&self) -> Result<(), HartreeError> {
        let h = self.grid.spacing();
        let norm: f64 = self.u.iter().map(|v| v * v).sum::<f64>() * h;
        if (4.0 * PI * norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(HartreeError::Unnormalized(norm));
        }
        Ok(())
    }
}

/// Dilation φ_λ(q) = λ^{3/2} φ(λq): same samples scaled by √λ on the grid
/// compressed by λ.  Exact on the discrete level; norm is preserved.
pub fn rescale(orb: &RadialOrbital, lambda: f64) -> RadialOrbital {
    assert!(lambda > 0.0, "dilation parameter must be positive");
    let grid = RadialGrid {
        r_max: orb.grid.r_max / lambda,
        n: orb.grid.n,
    };
    let s = lambda.sqrt();
    RadialOrbital {
        grid,
        u: orb.u.iter().map(|v| s * v).collect(),
    }
}

/// Values of the three one-body forms at an orbital.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormValues {
    /// k = ∫|∇φ|²
    pub kinetic: f64,
    /// c = ∫|φ|²/r
    pub central: f64,
    /// i = ∬|φ(x)|²|φ(y)|²/|x−y|
    pub pair: f64,
}

/// Evaluate (k, c, i) for a normalized orbital.
pub fn evaluate_forms(orb: &RadialOrbital) -> Result<FormValues, HartreeError> {
    orb.check_normalized()?;
    let w = scaled_samples(orb);
    Ok(forms_from_w(&w, &orb.grid))
}

/// w = √(4π)·u, so that Σw²h = 1.
fn scaled_samples(orb: &RadialOrbital) -> Vec<f64> {
    let s = (4.0 * PI).sqrt();
    orb.u.iter().map(|v| s * v).collect()
}

fn forms_from_w(w: &[f64], grid: &RadialGrid) -> FormValues {
    let h = grid.spacing();
    let n = w.len();
    // Kinetic: edge differences including both Dirichlet ends; this is
    // exactly the quadratic form of the three-point Laplacian.
    let mut kinetic = w[0] * w[0] / h;
    for i in 1..n {
        let d = w[i] - w[i - 1];
        kinetic += d * d / h;
    }
    kinetic += w[n - 1] * w[n - 1] / h;

    let mut central = 0.0;
    for (i, wi) in w.iter().enumerate() {
        central += wi * wi / grid.r(i) * h;
    }

    let kernel = pair_potential(w, grid);
    let mut pair = 0.0;
    for (i, wi) in w.iter().enumerate() {
        pair += wi * wi * kernel[i] * h;
    }

    FormValues {
        kinetic,
        central,
        pair,
    }
}

/// W(r_i) = Σ_j w_j² h / max(r_i, r_j), by two cumulative sums.
fn pair_potential(w: &[f64], grid: &RadialGrid) -> Vec<f64> {
    let h = grid.spacing();
    let n = w.len();
    let mut inner = vec![0.0; n]; // Σ_{j<=i} w_j² h
    let mut acc = 0.0;
    for i in 0..n {
        acc += w[i] * w[i] * h;
        inner[i] = acc;
    }
    let mut outer = vec![0.0; n]; // Σ_{j>i} w_j² h / r_j
    let mut acc = 0.0;
    for i in (0..n).rev() {
        outer[i] = acc;
        acc += w[i] * w[i] * h / grid.r(i);
    }
    (0..n).map(|i| inner[i] / grid.r(i) + outer[i]).collect()
}

/// Signed coefficients (c_K, c_C, c_I) multiplying (𝒦, 𝒞, 𝒤).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HartreeFunctionalCoeffs {
    pub kinetic: f64,
    pub central: f64,
    pub pair: f64,
}

impl HartreeFunctionalCoeffs {
    pub fn new(kinetic: f64, central: f64, pair: f64) -> Self {
        assert!(kinetic > 0.0, "kinetic coefficient must be positive");
        HartreeFunctionalCoeffs {
            kinetic,
            central,
            pair,
        }
    }

    pub fn energy(&self, f: &FormValues) -> f64 {
        self.kinetic * f.kinetic + self.central * f.central + self.pair * f.pair
    }

    /// d/dλ of the functional along the dilation orbit at λ = 1.
    pub fn dilation_derivative(&self, f: &FormValues) -> f64 {
        2.0 * self.kinetic * f.kinetic + self.central * f.central + self.pair * f.pair
    }
}

/// Product-state coefficients of an N-body system's quadratic form, in the
/// family's dimensionless units.
pub fn functional_coeffs(spec: &SystemSpec) -> Result<HartreeFunctionalCoeffs, ModelError> {
    spec.validate()?;
    let n = f64::from(spec.n);
    let half_pairs = 0.5 * n * (n - 1.0);
    let mut coeffs = match spec.kind {
        SystemKind::CoulombAtom => HartreeFunctionalCoeffs::new(0.5 * n, -n * n, half_pairs),
        SystemKind::NewtonFixedGrain => {
            HartreeFunctionalCoeffs::new(0.5 * n, -n, -spec.mass_ratio * half_pairs)
        }
        // Product trials on the translation-invariant operator (whose
        // infimum equals the intrinsic minimum) have no central term.
        SystemKind::NewtonIntrinsic => HartreeFunctionalCoeffs::new(0.5 * n, 0.0, -half_pairs),
    };
    if spec.pair_rescale {
        coeffs.pair /= n - 1.0;
    }
    Ok(coeffs)
}

/// The N → ∞ limiting functional of the Coulomb family: (1/2, −1, +1/2).
pub fn limiting_coulomb_coeffs() -> HartreeFunctionalCoeffs {
    HartreeFunctionalCoeffs::new(0.5, -1.0, 0.5)
}

/// The grain-free limiting functional of the Newton family: (1/2, 0, −1/2).
pub fn limiting_newton_coeffs() -> HartreeFunctionalCoeffs {
    HartreeFunctionalCoeffs::new(0.5, 0.0, -0.5)
}

// ─── Radial eigensolver ──────────────────────────────────────────────

/// Lowest eigenpair of −c_K u'' + V(r) u = ε u on the grid, by Sturm
/// bisection for the eigenvalue and inverse iteration for the vector.
/// The returned vector is normalized to Σw²h = 1 with nonnegative sum.
pub fn lowest_radial_state(
    kinetic_coeff: f64,
    potential: &[f64],
    grid: &RadialGrid,
) -> (f64, Vec<f64>) {
    let n = grid.n;
    assert_eq!(potential.len(), n);
    let h = grid.spacing();
    let off = -kinetic_coeff / (h * h);
    let diag: Vec<f64> = potential
        .iter()
        .map(|v| 2.0 * kinetic_coeff / (h * h) + v)
        .collect();

    // Sturm count: number of eigenvalues below lambda.
    let count_below = |lambda: f64| -> usize {
        let mut count = 0;
        let mut d = diag[0] - lambda;
        if d < 0.0 {
            count += 1;
        }
        let b2 = off * off;
        for item in diag.iter().skip(1) {
            if d == 0.0 {
                d = 1e-300;
            }
            d = item - lambda - b2 / d;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };

    let dmin = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let dmax = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = dmin - 2.0 * off.abs();
    let mut hi = dmax + 2.0 * off.abs();
    let span = (hi - lo).abs().max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * span + 4.0 * f64::EPSILON * hi.abs() {
            break;
        }
    }
    let eps = 0.5 * (lo + hi);

    // Inverse iteration with the Thomas algorithm; tiny pivots are clamped,
    // growth is absorbed by normalization.
    let mut x = vec![1.0; n];
    for _ in 0..3 {
        x = thomas_solve(&diag, off, eps, &x);
        let norm = (x.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
        for v in &mut x {
            *v /= norm;
        }
    }
    if x.iter().sum::<f64>() < 0.0 {
        for v in &mut x {
            *v = -*v;
        }
    }
    (eps, x)
}

/// Solve (T − σ)x = b for a symmetric tridiagonal T with constant
/// off-diagonal.
fn thomas_solve(diag: &[f64], off: f64, sigma: f64, b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    let mut pivot = diag[0] - sigma;
    if pivot.abs() < 1e-300 {
        pivot = 1e-300;
    }
    c_prime[0] = off / pivot;
    d_prime[0] = b[0] / pivot;
    for i in 1..n {
        let mut denom = diag[i] - sigma - off * c_prime[i - 1];
        if denom.abs() < 1e-300 {
            denom = 1e-300;
        }
        c_prime[i] = off / denom;
        d_prime[i] = (b[i] - off * d_prime[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d_prime[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    }
    x
}

/// Lowest eigenvalue of the hydrogenic problem |p|²/(2μ) − γ/r on a grid
/// adapted to the orbital scale κ = μγ; the finite-difference cross-check
/// for the closed form −μγ²/2.
pub fn hydrogenic_eigenvalue_fd(pb: &HydrogenicProblem, n: usize) -> f64 {
    let kappa = pb.effective_mass * pb.attraction;
    let grid = RadialGrid::new(45.0 / kappa, n).expect("adapted grid");
    let potential: Vec<f64> = (0..n).map(|i| -pb.attraction / grid.r(i)).collect();
    let c_k = 0.5 / pb.effective_mass;
    lowest_radial_state(c_k, &potential, &grid).0
}

// ─── Self-consistent field ───────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScfSettings {
    /// Density mixing fraction of the new eigenstate per iteration.
    pub mixing: f64,
    /// Convergence threshold on the energy change between iterates.
    pub tol: f64,
    /// L1 threshold on the unmixed eigen-density residual; together with
    /// `tol` this certifies an actual fixed point, not just a stalled
    /// energy.
    pub density_tol: f64,
    pub max_iter: usize,
}

impl Default for ScfSettings {
    fn default() -> Self {
        ScfSettings {
            mixing: 0.3,
            tol: 1e-9,
            density_tol: 1e-8,
            max_iter: 3000,
        }
    }
}

/// A converged mean-field minimizer.
#[derive(Debug, Clone)]
pub struct ScfSolution {
    /// Functional value at the final orbital, recomputed from the forms.
    pub energy: f64,
    pub orbital: RadialOrbital,
    pub forms: FormValues,
    pub iterations: usize,
    pub energy_trace: Vec<f64>,
    /// |d/dλ E[φ_λ]| at λ = 1, relative to |E|.
    pub virial_residual: f64,
}

/// Minimize the functional by fixed-point iteration of the mean-field
/// eigenproblem with energy-diminishing density mixing.
///
/// The mean-field potential is V = c_C/r + 2c_I·W[ρ] (the pair term enters
/// the potential with the functional-derivative factor 2); the reported
/// energy is always the functional value at the final orbital, which removes
/// the double-counting bookkeeping entirely.
pub fn scf_solve(
    coeffs: &HartreeFunctionalCoeffs,
    grid: &RadialGrid,
    settings: &ScfSettings,
) -> Result<ScfSolution, HartreeError> {
    let n = grid.n;
    let h = grid.spacing();

    let kappa = seed_scale(coeffs);
    let seed = RadialOrbital::exponential_seed(*grid, kappa);
    let mut w = scaled_samples(&seed);
    let mut density: Vec<f64> = w.iter().map(|v| v * v).collect();

    let mut eta = settings.mixing;
    let mut energy_prev = f64::INFINITY;
    let mut trace = Vec::new();

    for iter in 0..settings.max_iter {
        let kernel = pair_potential(&w, grid);
        let potential: Vec<f64> = (0..n)
            .map(|i| coeffs.central / grid.r(i) + 2.0 * coeffs.pair * kernel[i])
            .collect();
        let (_eps, w_new) = lowest_radial_state(coeffs.kinetic, &potential, grid);

        let density_residual: f64 = density
            .iter()
            .zip(&w_new)
            .map(|(d, wn)| (wn * wn - d).abs())
            .sum::<f64>()
            * h;
        for i in 0..n {
            density[i] = (1.0 - eta) * density[i] + eta * w_new[i] * w_new[i];
        }
        let norm: f64 = density.iter().sum::<f64>() * h;
        for d in &mut density {
            *d /= norm;
        }
        w = density.iter().map(|d| d.sqrt()).collect();

        let forms = forms_from_w(&w, grid);
        let energy = coeffs.energy(&forms);
        trace.push(energy);

        if energy > energy_prev + 1e-13 * energy_prev.abs() {
            eta = (eta * 0.5).max(0.01);
        } else {
            eta = (eta * 1.05).min(0.95);
        }
        if (energy - energy_prev).abs() < settings.tol && density_residual < settings.density_tol {
            let orbital = orbital_from_w(&w, grid);
            let virial_residual = coeffs.dilation_derivative(&forms).abs() / energy.abs();
            return Ok(ScfSolution {
                energy,
                orbital,
                forms,
                iterations: iter + 1,
                energy_trace: trace,
                virial_residual,
            });
        }
        energy_prev = energy;
    }

    let tail = trace.iter().rev().take(5).cloned().collect();
    Err(HartreeError::NotConverged {
        iterations: settings.max_iter,
        trace_tail: tail,
    })
}

fn orbital_from_w(w: &[f64], grid: &RadialGrid) -> RadialOrbital {
    let s = 1.0 / (4.0 * PI).sqrt();
    RadialOrbital {
        grid: *grid,
        u: w.iter().map(|v| s * v).collect(),
    }
}

/// Exponent of the hydrogen-type starting orbital: the central attraction
/// plus half of an attractive pair coupling, over twice the kinetic weight.
fn seed_scale(coeffs: &HartreeFunctionalCoeffs) -> f64 {
    let attraction = coeffs.central.abs() + 0.5 * (-coeffs.pair).max(0.0);
    (attraction / (2.0 * coeffs.kinetic)).max(0.5)
}

/// Functional value of a system's product-state form at a given orbital, as
/// a certified upper bound on the bosonic ground-state energy.
pub fn hartree_upper_bound(
    spec: &SystemSpec,
    orb: &RadialOrbital,
) -> Result<EnergyEstimate, HartreeError> {
    let coeffs = functional_coeffs(spec)?;
    let forms = evaluate_forms(orb)?;
    Ok(EnergyEstimate::new(
        coeffs.energy(&forms),
        BoundKind::Upper,
        "hartree",
        &spec.label(),
        spec.n,
    ))
}

/// Mean-field solve for a concrete system, with the orbital pre-scaled so
/// the contracted state stays resolved on the default grid.
///
/// The functional is minimized in dilated coordinates — E[φ; (c_K, c_C, c_I)]
/// = λ²·E[φ̃; (c_K, c_C/λ, c_I/λ)] with φ = φ̃_λ — using λ chosen from the
/// coefficient ratios (λ = N for the Coulomb atom), and mapped back exactly.
pub fn solve_family(
    spec: &SystemSpec,
    grid: &RadialGrid,
    settings: &ScfSettings,
) -> Result<ScfSolution, HartreeError> {
    let coeffs = functional_coeffs(spec)?;
    let prescale = seed_scale(&coeffs).max(1.0);
    let scaled = HartreeFunctionalCoeffs::new(
        coeffs.kinetic,
        coeffs.central / prescale,
        coeffs.pair / prescale,
    );
    let inner = scf_solve(&scaled, grid, settings)?;
    let orbital = rescale(&inner.orbital, prescale);
    let forms = evaluate_forms(&orbital)?;
    let energy = coeffs.energy(&forms);
    let virial_residual = coeffs.dilation_derivative(&forms).abs() / energy.abs();
    Ok(ScfSolution {
        energy,
        orbital,
        forms,
        iterations: inner.iterations,
        energy_trace: inner
            .energy_trace
            .iter()
            .map(|e| e * prescale * prescale)
            .collect(),
        virial_residual,
    })
}
