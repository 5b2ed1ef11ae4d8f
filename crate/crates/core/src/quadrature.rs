//! Gaussian quadrature rules built by Golub–Welsch: nodes are the
//! eigenvalues of the Jacobi matrix of the orthogonal-polynomial
//! recurrence, weights come from the first eigenvector components.

use crate::error::{CoreError, Result};
use nalgebra::DMatrix;

/// Node/weight pairs for a fixed weight function.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_i f(x_i).
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Eigen-decompose the symmetric tridiagonal Jacobi matrix; `mu0` is the
/// total mass of the weight function.
fn golub_welsch(diag: &[f64], off_diag: &[f64], mu0: f64) -> GaussRule {
    let n = diag.len();
    assert_eq!(off_diag.len(), n - 1);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for (i, &d) in diag.iter().enumerate() {
        jac[(i, i)] = d;
    }
    for (i, &e) in off_diag.iter().enumerate() {
        jac[(i, i + 1)] = e;
        jac[(i + 1, i)] = e;
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let node = eig.eigenvalues[k];
            let v0 = eig.eigenvectors[(0, k)];
            (node, mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Gauss–Hermite, physicists' convention: ∫ f(y) e^{−y²} dy ≈ Σ w_i f(y_i).
pub fn gauss_hermite(n: usize) -> GaussRule {
    assert!(n >= 1);
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n).map(|i| (i as f64 / 2.0).sqrt()).collect();
    golub_welsch(&diag, &off, std::f64::consts::PI.sqrt())
}

/// Gauss–Laguerre: ∫₀^∞ f(t) e^{−t} dt ≈ Σ w_i f(t_i).
pub fn gauss_laguerre(n: usize) -> GaussRule {
    assert!(n >= 1);
    let diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|i| i as f64).collect();
    golub_welsch(&diag, &off, 1.0)
}

/// Gauss–Legendre on [−1, 1]: ∫ f ≈ Σ w_i f(x_i).
pub fn gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1);
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|i| {
            let k = i as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&diag, &off, 2.0)
}

/// Uniform angular nodes φ_j = 2πj/M; the rule (2π/M)Σf(φ_j) integrates
/// Fourier modes e^{ikφ} exactly for all |k| ≤ M−1.
pub fn angular_nodes(m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / m as f64)
        .collect()
}

/// Node/weight sets used by the quantization maps: a half-line radial
/// rule, an angular node count, and a log-Gaussian rule for the weight
/// function's inner integral, with a declared accuracy target.
#[derive(Debug, Clone)]
pub struct QuadratureScheme {
    pub radial: GaussRule,
    pub angular_count: usize,
    pub log_gaussian: GaussRule,
    pub target_accuracy: f64,
}

impl QuadratureScheme {
    pub fn standard() -> Self {
        Self {
            radial: gauss_laguerre(48),
            angular_count: 64,
            log_gaussian: gauss_hermite(64),
            target_accuracy: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for rule in [&self.radial, &self.log_gaussian] {
            if rule.nodes.len() != rule.weights.len() {
                return Err(CoreError::DomainError(
                    "node/weight arrays differ in length".to_string(),
                ));
            }
            if rule.weights.iter().any(|&w| w <= 0.0) {
                return Err(CoreError::DomainError(
                    "quadrature weights must be positive".to_string(),
                ));
            }
        }
        if self.angular_count == 0 || self.target_accuracy <= 0.0 {
            return Err(CoreError::DomainError(
                "angular count and target accuracy must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

impl Default for QuadratureScheme {
    fn default() -> Self {
        Self::standard()
    }
}
