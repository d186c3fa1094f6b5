//! Gauss-type quadrature over the triangle coordinates of two particles
//! about a fixed center.
//!
//! In the variables s = r₁+r₂, t = r₁−r₂, u = r₁₂ the admissible region
//! {|r₁−r₂| ≤ r₁₂ ≤ r₁+r₂} becomes |t| ≤ u ≤ s < ∞, and for integrands even
//! in t
//!
//! ```text
//! ∫∫∫ e^{−2α(r₁+r₂)} g  dr₁ dr₂ dr₁₂  =  ∫₀^∞ ds ∫₀^s du ∫₀^u dt  e^{−2αs} g .
//! ```
//!
//! Mapping u = s·x and t = u·y (x, y ∈ [0,1]) carries the doubly-triangular
//! region onto a cube with Jacobian s²x, and any polynomial in (s, t, u)
//! becomes a polynomial in s times polynomials in x and y.  A Gauss-Laguerre
//! rule in s tensored with Gauss-Legendre rules in x and y is therefore exact
//! for such integrands up to the orders' polynomial degrees.  Every matrix
//! element of the correlated basis has this form once the volume element
//! r₁ r₂ r₁₂ is folded into the integrand: the potential denominators 1/r₁,
//! 1/r₂, 1/r₁₂ and the kinetic cross factors all cancel against it.

use nalgebra::{DMatrix, SymmetricEigen};

/// One quadrature node with both coordinate systems and its weight.
///
/// The rule satisfies `Σ w·g(node) = ∫∫∫ e^{−2α(r₁+r₂)} g dr₁dr₂dr₁₂` for
/// integrands g even in t; the exponential and the map Jacobian live in the
/// weights, the volume element does not.
#[derive(Debug, Clone, Copy)]
pub struct QuadNode {
    pub r1: f64,
    pub r2: f64,
    pub r12: f64,
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub w: f64,
}

/// Tensor rule over the triangle coordinates with exponential s-weight.
///
/// `order_s` Gauss-Laguerre points in s (exact for s-polynomials of degree
/// ≤ 2·order_s − 3 after the s² Jacobian), `order_inner` Gauss-Legendre
/// points in each of the two mapped inner directions.
pub fn simplex_quadrature(alpha: f64, order_s: usize, order_inner: usize) -> Vec<QuadNode> {
    assert!(alpha > 0.0, "exponential scale must be positive");
    assert!(
        order_s >= 2 && order_inner >= 2,
        "quadrature orders must be >= 2"
    );
    let (s_nodes, s_weights) = gauss_laguerre(order_s);
    let (x_nodes, x_weights) = gauss_legendre_01(order_inner);
    let mut nodes = Vec::with_capacity(order_s * order_inner * order_inner);
    for (&xs, &ws) in s_nodes.iter().zip(&s_weights) {
        let s = xs / (2.0 * alpha);
        let ws = ws / (2.0 * alpha);
        for (&x, &wx) in x_nodes.iter().zip(&x_weights) {
            let u = s * x;
            for (&y, &wy) in x_nodes.iter().zip(&x_weights) {
                let t = u * y;
                // d(u,t) = (s dx)·(u dy): Jacobian s·u = s²x.
                let w = ws * wx * wy * s * u;
                nodes.push(QuadNode {
                    r1: 0.5 * (s + t),
                    r2: 0.5 * (s - t),
                    r12: u,
                    s,
                    t,
                    u,
                    w,
                });
            }
        }
    }
    nodes
}

/// Nodes and weights for ∫₀^∞ e^{−x} f(x) dx, by Golub-Welsch.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Monic Laguerre recurrence: a_k = 2k+1, b_k = k².
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|k| k as f64).collect();
    golub_welsch(&diag, &off, 1.0)
}

/// Nodes and weights for ∫₀^1 f(x) dx.
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Legendre on [−1, 1]: a_k = 0, sqrt(b_k) = k/sqrt(4k²−1), μ₀ = 2.
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (nodes, weights) = golub_welsch(&diag, &off, 2.0);
    (
        nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights.iter().map(|w| 0.5 * w).collect(),
    )
}

/// Eigen-decompose the symmetric Jacobi matrix; eigenvalues are the nodes and
/// μ₀ times the squared first eigenvector components are the weights.
fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut jacobi = DMatrix::zeros(n, n);
    for (i, &d) in diag.iter().enumerate() {
        jacobi[(i, i)] = d;
    }
    for (i, &b) in off.iter().enumerate() {
        jacobi[(i, i + 1)] = b;
        jacobi[(i + 1, i)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let nodes = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let weights = order
        .iter()
        .map(|&i| mu0 * eig.eigenvectors[(0, i)].powi(2))
        .collect();
    (nodes, weights)
}
