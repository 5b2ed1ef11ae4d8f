//! Coherent-state (anti-Wick) quantization.
//!
//! Classical functions f(ζ, ζ̄) on the relative-motion phase plane map to
//! truncated operators through
//!
//! ```text
//! f ↦ ∫ (d²ζ/π) ϖ_λ(|ζ|²) f(ζ, ζ̄) Ε_λ(|ζ|²) |ζ⟩⟨ζ| ,
//! ```
//!
//! where the weight function ϖ_λ is known through its Laplace-transform
//! representation and solves the moment problem
//! ∫ tⁿ ϖ_λ(t) dt = n! e^{λn(n+1)/2}. Quantizing ζ itself reproduces the
//! squeezed lowering operator Ẑ_λ, and |ζ|² gives diag((n+1)e^{λ(n+1)}).
//! The standard-CS (Gaussian measure) map over (α, β) is also provided;
//! it sends α ↦ â, β ↦ b̂ and the classical phase-space coordinates to
//! the two-mode position/momentum operators.
//!
//! Angular integrals are always done by exact Fourier selection or an
//! exact uniform rule; radial integrals use the analytic moment identity
//! for monomials and quadrature only in pointwise mode, so the quadrature
//! stack is independently validated against the analytic moments.

use crate::cstates::ln_gen_factorial;
use crate::error::{CoreError, Result};
use crate::fock::{Mode, TruncatedOperator};
use crate::params::DerivedParams;
use crate::quadrature::{angular_nodes, gauss_legendre, GaussRule, QuadratureScheme};
use crate::special::ln_factorial;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Refinements disagreeing beyond this relative tolerance raise
/// `QuadratureNonConvergence`.
const REFINE_TOL: f64 = 1e-8;

/// Depth (in e-foldings below the peak) at which integrand tails are cut.
const TAIL_DEPTH: f64 = 48.0;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

// ---------------------------------------------------------------------------
// log-domain quadrature of unimodal integrands
// ---------------------------------------------------------------------------

/// Peak location/value and the tail-cut interval of a log-integrand.
struct IntegrandProfile {
    peak_val: f64,
    left: f64,
    right: f64,
}

/// Expand outward from a known peak until the log-integrand has dropped
/// `TAIL_DEPTH` below it, then bisect onto the crossing.
fn profile_from_peak<F: Fn(f64) -> f64>(
    l_fn: &F,
    center: f64,
    peak_val: f64,
    init_step: f64,
) -> IntegrandProfile {
    let edge = |dir: f64| -> f64 {
        let mut step = init_step;
        let mut outer = center + dir * step;
        while l_fn(outer) > peak_val - TAIL_DEPTH && step < 1e7 {
            step *= 2.0;
            outer = center + dir * step;
        }
        let mut inner = center;
        for _ in 0..50 {
            let mid = 0.5 * (inner + outer);
            if l_fn(mid) > peak_val - TAIL_DEPTH {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        0.5 * (inner + outer)
    };
    IntegrandProfile {
        peak_val,
        left: edge(-1.0),
        right: edge(1.0),
    }
}

/// Composite 16-point Gauss–Legendre over the profiled support; returns
/// ln ∫ e^{L(x)} dx.
fn integrate_profile<F: Fn(f64) -> f64>(l_fn: &F, prof: &IntegrandProfile, panels: usize) -> f64 {
    thread_local! {
        static RULE16: GaussRule = gauss_legendre(16);
    }
    RULE16.with(|rule| {
        let mut total = 0.0_f64;
        let panel_width = (prof.right - prof.left) / panels as f64;
        for p in 0..panels {
            let half = 0.5 * panel_width;
            let mid = prof.left + panel_width * p as f64 + half;
            for (&x, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
                total += w * half * (l_fn(mid + half * x) - prof.peak_val).exp();
            }
        }
        prof.peak_val + total.ln()
    })
}

/// Coarse-scan peak locator for integrands without analytic derivatives;
/// widens the window until the maximum is interior.
fn scan_peak<F: Fn(f64) -> f64>(l_fn: &F, scan_lo: f64, scan_hi: f64) -> Result<(f64, f64)> {
    const SCAN: usize = 81;
    let (mut lo, mut hi) = (scan_lo, scan_hi);
    for _ in 0..8 {
        let mut best_idx = 0;
        let mut best = f64::NEG_INFINITY;
        for i in 0..SCAN {
            let x = lo + (hi - lo) * i as f64 / (SCAN - 1) as f64;
            let v = l_fn(x);
            if v > best {
                best = v;
                best_idx = i;
            }
        }
        if best_idx > 0 && best_idx < SCAN - 1 {
            let x = lo + (hi - lo) * best_idx as f64 / (SCAN - 1) as f64;
            return Ok((x, best));
        }
        let width = hi - lo;
        if best_idx == 0 {
            lo -= width;
        } else {
            hi += width;
        }
    }
    Err(CoreError::DomainError(
        "no interior maximum found for log-domain integrand".to_string(),
    ))
}

// ---------------------------------------------------------------------------
// the weight function
// ---------------------------------------------------------------------------

/// The λ-CS weight function, evaluated from its Laplace-transform
/// representation
///
/// ```text
/// ϖ_λ(t) = (e^{−λ/2}/√(2πλ)) ∫₀^∞ du exp(−e^{−λ/2} t u) e^{−(ln u)²/(2λ)}
/// ```
///
/// via the substitution u = e^v, which turns the integrand into a
/// log-concave profile integrated in the log domain. ϖ_λ(0) = 1 and
/// ϖ₀(t) = e^{−t} (the standard-CS Gaussian measure) as a closed-form
/// branch.
#[derive(Debug, Clone)]
pub struct WeightFunction {
    pub lambda: f64,
    /// Composite-rule panel count for the production pass; the refinement
    /// check doubles it.
    panels: usize,
}

impl WeightFunction {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda < 0.0 {
            return Err(CoreError::DomainError(format!(
                "lambda must be nonnegative, got {lambda}"
            )));
        }
        Ok(Self { lambda, panels: 16 })
    }

    /// Peak of the log-integrand g(v) = −v²/2λ + v − T·eᵛ. g′ is strictly
    /// decreasing, so a bracketed bisection plus Newton polish is exact.
    fn inner_peak(&self, big_t: f64) -> (f64, f64) {
        let lam = self.lambda;
        let g = |v: f64| -v * v / (2.0 * lam) + v - big_t * v.exp();
        if big_t == 0.0 {
            return (lam, g(lam));
        }
        let gp = |v: f64| -v / lam + 1.0 - big_t * v.exp();
        let mut hi = lam; // g'(lam) = -T e^lam <= 0
        let mut step = 1.0;
        let mut lo = lam - step;
        while gp(lo) <= 0.0 {
            step *= 2.0;
            lo = lam - step;
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if gp(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut v = 0.5 * (lo + hi);
        for _ in 0..4 {
            let gpp = -1.0 / lam - big_t * v.exp();
            let next = v - gp(v) / gpp;
            if next.is_finite() && next > lo - 1.0 && next < hi + 1.0 {
                v = next;
            }
        }
        (v, g(v))
    }

    /// ln ϖ_λ(t) from a precomputed profile.
    fn eval_ln_profiled(&self, big_t: f64, prof: &IntegrandProfile, panels: usize) -> f64 {
        let lam = self.lambda;
        let g = |v: f64| -v * v / (2.0 * lam) + v - big_t * v.exp();
        let ln_i = integrate_profile(&g, prof, panels);
        -0.5 * lam - (2.0 * std::f64::consts::PI * lam).sqrt().ln() + ln_i
    }

    fn profile(&self, big_t: f64) -> IntegrandProfile {
        let (v_hat, g_hat) = self.inner_peak(big_t);
        let lam = self.lambda;
        let g = |v: f64| -v * v / (2.0 * lam) + v - big_t * v.exp();
        // local curvature sets the expansion step
        let sigma = 1.0 / (1.0 / lam + big_t * v_hat.exp()).sqrt();
        profile_from_peak(&g, v_hat, g_hat, sigma)
    }

    /// Single-pass ln ϖ_λ(t); used inside outer quadratures whose own
    /// refinement check covers the compounded error.
    fn eval_ln_fast(&self, t: f64) -> f64 {
        let lam = self.lambda;
        if lam == 0.0 {
            return -t;
        }
        let big_t = (-0.5 * lam).exp() * t;
        let prof = self.profile(big_t);
        self.eval_ln_profiled(big_t, &prof, self.panels)
    }

    /// ln ϖ_λ(t), cross-checked between two panel counts.
    pub fn eval_ln(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(CoreError::DomainError(format!(
                "weight argument must be nonnegative, got {t}"
            )));
        }
        let lam = self.lambda;
        if lam == 0.0 {
            return Ok(-t);
        }
        let big_t = (-0.5 * lam).exp() * t;
        let prof = self.profile(big_t);
        let coarse = self.eval_ln_profiled(big_t, &prof, self.panels);
        let fine = self.eval_ln_profiled(big_t, &prof, self.panels * 2);
        let rel = ((coarse - fine).exp() - 1.0).abs();
        if !rel.is_finite() || rel > REFINE_TOL {
            return Err(CoreError::QuadratureNonConvergence {
                coarse,
                fine,
                rel,
                tol: REFINE_TOL,
            });
        }
        Ok(fine)
    }

    /// ϖ_λ(t) itself.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.eval_ln(t)?.exp())
    }
}

/// Analytic moment target n! e^{λn(n+1)/2}.
pub fn moment_target(n: u32, lambda: f64) -> f64 {
    (ln_factorial(n) + 0.5 * lambda * n as f64 * (n as f64 + 1.0)).exp()
}

/// Numerical moment ∫₀^∞ tⁿ ϖ_λ(t) dt computed by radial quadrature of
/// pointwise ϖ values (in the variable τ = ln t), independent of the
/// analytic identity.
pub fn moment(w: &WeightFunction, n: u32) -> Result<f64> {
    let lam = w.lambda;
    if lam == 0.0 {
        // plain half-line quadrature against e^{-t}
        let rule = crate::quadrature::gauss_laguerre(64);
        return Ok(rule.integrate(|t| t.powi(n as i32)));
    }
    let nf = n as f64;
    let l_fn = |tau: f64| -> f64 { (nf + 1.0) * tau + w.eval_ln_fast(tau.exp()) };
    let guess = lam * (nf + 1.0) + (nf + 2.0).ln();
    let spread = 8.0 * lam.sqrt() + 8.0;
    let (peak_x, peak_val) = scan_peak(&l_fn, guess - spread, guess + spread)?;
    let prof = profile_from_peak(&l_fn, peak_x, peak_val, 0.25 * lam.sqrt() + 0.1);
    let coarse = integrate_profile(&l_fn, &prof, 16);
    let fine = integrate_profile(&l_fn, &prof, 32);
    let rel = ((coarse - fine).exp() - 1.0).abs();
    if !rel.is_finite() || rel > REFINE_TOL {
        return Err(CoreError::QuadratureNonConvergence {
            coarse,
            fine,
            rel,
            tol: REFINE_TOL,
        });
    }
    Ok(fine.exp())
}

// ---------------------------------------------------------------------------
// classical observables
// ---------------------------------------------------------------------------

/// Monomial ζ^a ζ̄^b with a complex coefficient.
#[derive(Debug, Clone, Copy)]
pub struct Monomial {
    pub zeta_pow: u32,
    pub conj_pow: u32,
    pub coeff: Complex64,
}

impl Monomial {
    pub fn new(zeta_pow: u32, conj_pow: u32, coeff: Complex64) -> Self {
        Self {
            zeta_pow,
            conj_pow,
            coeff,
        }
    }
}

/// A classical observable on the ζ-plane: a finite monomial sum (radial
/// integrals then use the analytic moments) or an opaque pointwise
/// function (full polar quadrature).
pub enum ClassicalObservable {
    Monomials(Vec<Monomial>),
    Pointwise(Box<dyn Fn(Complex64) -> Complex64 + Send + Sync>),
}

impl ClassicalObservable {
    pub fn constant(value: f64) -> Self {
        Self::Monomials(vec![Monomial::new(0, 0, c(value))])
    }

    /// f(ζ) = ζ.
    pub fn zeta() -> Self {
        Self::Monomials(vec![Monomial::new(1, 0, c(1.0))])
    }

    /// f(ζ) = ζ̄.
    pub fn zeta_conj() -> Self {
        Self::Monomials(vec![Monomial::new(0, 1, c(1.0))])
    }

    /// f(ζ) = |ζ|².
    pub fn abs_squared() -> Self {
        Self::Monomials(vec![Monomial::new(1, 1, c(1.0))])
    }

    pub fn max_degree(&self) -> u32 {
        match self {
            Self::Monomials(ms) => ms
                .iter()
                .map(|m| m.zeta_pow + m.conj_pow)
                .max()
                .unwrap_or(0),
            Self::Pointwise(_) => 0,
        }
    }
}

/// A quantized operator plus the boundary-dominance diagnostic: the ratio
/// of the largest entry touching row/column N to the largest entry
/// overall. Ratios above 1e−3 mean the cutoff row carries weight and the
/// trust band has effectively shrunk.
pub struct Quantized {
    pub op: TruncatedOperator,
    pub boundary_ratio: f64,
}

impl Quantized {
    pub fn truncation_warning(&self) -> bool {
        self.boundary_ratio > 1e-3
    }
}

fn boundary_ratio(mat: &DMatrix<Complex64>) -> f64 {
    let dim = mat.nrows();
    let mut overall = 0.0_f64;
    let mut boundary = 0.0_f64;
    for i in 0..dim {
        for j in 0..dim {
            let v = mat[(i, j)].norm();
            overall = overall.max(v);
            if i == dim - 1 || j == dim - 1 {
                boundary = boundary.max(v);
            }
        }
    }
    if overall == 0.0 {
        0.0
    } else {
        boundary / overall
    }
}

// ---------------------------------------------------------------------------
// lambda-CS quantization
// ---------------------------------------------------------------------------

/// Quantize a classical observable with the λ-CS family (CS units,
/// ℓ = 1). Matrix elements obey the exact angular selection rule
/// ⟨m|f̂|n⟩ = 0 unless m − n = b − a for each monomial ζ^a ζ̄^b, and on the
/// selection set
///
/// ```text
/// ⟨m|f̂|n⟩ = [∫₀^∞ t^{(m+n+a+b)/2} ϖ_λ(t) dt] / √(x_m! x_n!) .
/// ```
pub fn quantize_lambda(
    f: &ClassicalObservable,
    lambda: f64,
    n_max: usize,
    scheme: &QuadratureScheme,
) -> Result<Quantized> {
    if lambda < 0.0 {
        return Err(CoreError::DomainError(
            "lambda must be nonnegative".to_string(),
        ));
    }
    match f {
        ClassicalObservable::Monomials(monos) => {
            let dim = n_max + 1;
            let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
            let mut order = 0usize;
            for mono in monos {
                let (a, b) = (mono.zeta_pow as i64, mono.conj_pow as i64);
                order = order.max((mono.zeta_pow + mono.conj_pow) as usize);
                for n in 0..=n_max as i64 {
                    let m = n + b - a;
                    if m < 0 || m > n_max as i64 {
                        continue;
                    }
                    // radial moment of order K = (m+n+a+b)/2, analytic
                    let k2 = m + n + a + b;
                    debug_assert!(k2 % 2 == 0);
                    let k = (k2 / 2) as u32;
                    let ln_val = ln_factorial(k) + 0.5 * lambda * k as f64 * (k as f64 + 1.0)
                        - 0.5 * (ln_gen_factorial(m as u32, lambda)
                            + ln_gen_factorial(n as u32, lambda));
                    mat[(m as usize, n as usize)] += mono.coeff * c(ln_val.exp());
                }
            }
            let ratio = boundary_ratio(&mat);
            Ok(Quantized {
                op: TruncatedOperator::new(mat, n_max, Mode::A, order),
                boundary_ratio: ratio,
            })
        }
        ClassicalObservable::Pointwise(func) => {
            scheme.validate()?;
            let coarse = quantize_lambda_pointwise(func, lambda, n_max, scheme, false)?;
            let fine = quantize_lambda_pointwise(func, lambda, n_max, scheme, true)?;
            let mut scale = 0.0_f64;
            let mut diff = 0.0_f64;
            for (a, b) in coarse.iter().zip(fine.iter()) {
                scale = scale.max(b.norm());
                diff = diff.max((a - b).norm());
            }
            let rel = if scale == 0.0 { 0.0 } else { diff / scale };
            if rel > REFINE_TOL {
                return Err(CoreError::QuadratureNonConvergence {
                    coarse: 0.0,
                    fine: scale,
                    rel,
                    tol: REFINE_TOL,
                });
            }
            let ratio = boundary_ratio(&fine);
            Ok(Quantized {
                op: TruncatedOperator::new(fine, n_max, Mode::A, 1),
                boundary_ratio: ratio,
            })
        }
    }
}

/// Full polar quadrature for an opaque f: exact uniform angular rule,
/// then the Laplace-transform structure of ϖ_λ reduces each radial
/// integral to an inner half-line rule (in s = T·t) under an outer exact
/// Gaussian rule (in the log-normal variable).
fn quantize_lambda_pointwise(
    f: &(dyn Fn(Complex64) -> Complex64 + Send + Sync),
    lambda: f64,
    n_max: usize,
    scheme: &QuadratureScheme,
    refine: bool,
) -> Result<DMatrix<Complex64>> {
    let dim = n_max + 1;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    let m_ang = if refine {
        scheme.angular_count * 2
    } else {
        scheme.angular_count
    };
    let phis = angular_nodes(m_ang);

    if lambda == 0.0 {
        // Gaussian measure: single half-line rule
        let radial = if refine {
            crate::quadrature::gauss_laguerre(scheme.radial.len() * 2)
        } else {
            scheme.radial.clone()
        };
        for m in 0..=n_max {
            for n in 0..=n_max {
                let delta = m as i64 - n as i64;
                let kk = 0.5 * (m + n) as f64;
                let mut acc = Complex64::new(0.0, 0.0);
                for (&s, &u) in radial.nodes.iter().zip(radial.weights.iter()) {
                    let r = s.sqrt();
                    let mut ang = Complex64::new(0.0, 0.0);
                    for &phi in &phis {
                        ang += f(Complex64::from_polar(r, phi))
                            * Complex64::from_polar(1.0, delta as f64 * phi);
                    }
                    acc += c(u * s.powf(kk)) * ang / c(m_ang as f64);
                }
                let ln_norm = 0.5 * (ln_factorial(m as u32) + ln_factorial(n as u32));
                mat[(m, n)] = acc * c((-ln_norm).exp());
            }
        }
        return Ok(mat);
    }

    let (gl, gh) = if refine {
        (
            crate::quadrature::gauss_laguerre(scheme.radial.len() * 2),
            crate::quadrature::gauss_hermite(scheme.log_gaussian.len() * 2),
        )
    } else {
        (scheme.radial.clone(), scheme.log_gaussian.clone())
    };

    // group entries by K2 = m + n: they share a quadrature grid
    for k2 in 0..=(2 * n_max) {
        let kk = 0.5 * k2 as f64;
        let v_center = -lambda * kk;
        let m_lo = k2.saturating_sub(n_max);
        let m_hi = k2.min(n_max);

        // accumulators per retained row m
        let mut sums = vec![Complex64::new(0.0, 0.0); m_hi - m_lo + 1];
        for (&y, &wy) in gh.nodes.iter().zip(gh.weights.iter()) {
            let v = v_center + (2.0 * lambda).sqrt() * y;
            let big_t = (v - 0.5 * lambda).exp();
            let mut inner = vec![Complex64::new(0.0, 0.0); sums.len()];
            for (&s, &us) in gl.nodes.iter().zip(gl.weights.iter()) {
                let r = (s / big_t).sqrt();
                // all angular modes needed for this K2 from one sweep
                let samples: Vec<Complex64> = phis
                    .iter()
                    .map(|&phi| f(Complex64::from_polar(r, phi)))
                    .collect();
                let radial_factor = c(us * s.powf(kk));
                for (idx, m) in (m_lo..=m_hi).enumerate() {
                    let delta = (2 * m) as i64 - k2 as i64;
                    let mut ang = Complex64::new(0.0, 0.0);
                    for (&phi, &fv) in phis.iter().zip(samples.iter()) {
                        ang += fv * Complex64::from_polar(1.0, delta as f64 * phi);
                    }
                    inner[idx] += radial_factor * ang / c(m_ang as f64);
                }
            }
            for (acc, val) in sums.iter_mut().zip(inner.iter()) {
                *acc += c(wy) * val;
            }
        }
        for (idx, m) in (m_lo..=m_hi).enumerate() {
            let n = k2 - m;
            let ln_pref = -0.5 * lambda + 0.5 * lambda * (kk * kk + kk + 1.0)
                - 0.5 * std::f64::consts::PI.ln()
                - 0.5 * (ln_gen_factorial(m as u32, lambda) + ln_gen_factorial(n as u32, lambda));
            mat[(m, n)] = sums[idx] * c(ln_pref.exp());
        }
    }
    Ok(mat)
}

// ---------------------------------------------------------------------------
// standard-CS quantization
// ---------------------------------------------------------------------------

/// Monomial α^{a₀} ᾱ^{a₁} β^{b₀} β̄^{b₁} on the two-mode phase space ℂ².
#[derive(Debug, Clone, Copy)]
pub struct TwoModeMonomial {
    pub alpha: (u32, u32),
    pub beta: (u32, u32),
    pub coeff: Complex64,
}

/// Single-mode anti-Wick quantization of α^a ᾱ^b against the Gaussian
/// measure e^{−|α|²} d²α/π, radial integral by Gauss–Laguerre:
/// entries ⟨m|·|n⟩ = δ_{m−n, b−a} [Σ_j u_j s_j^{(m+n+a+b)/2}] / √(m! n!).
pub fn quantize_standard_single(
    a: u32,
    b: u32,
    n_max: usize,
    radial: &GaussRule,
    mode: Mode,
) -> TruncatedOperator {
    let dim = n_max + 1;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 0..=n_max as i64 {
        let m = n + b as i64 - a as i64;
        if m < 0 || m > n_max as i64 {
            continue;
        }
        let k2 = m + n + a as i64 + b as i64;
        debug_assert!(k2 % 2 == 0);
        let k = (k2 / 2) as i32;
        let integral = radial.integrate(|t| t.powi(k));
        let ln_norm = 0.5 * (ln_factorial(m as u32) + ln_factorial(n as u32));
        mat[(m as usize, n as usize)] = c(integral * (-ln_norm).exp());
    }
    TruncatedOperator::new(mat, n_max, mode, (a + b) as usize)
}

/// Anti-Wick quantization over ℂ² with the product Gaussian measure; the
/// measure and the states factorize, so each monomial quantizes to a
/// tensor product of single-mode operators.
pub fn quantize_standard(
    monomials: &[TwoModeMonomial],
    n_max: usize,
    scheme: &QuadratureScheme,
) -> Result<Quantized> {
    scheme.validate()?;
    let dim = (n_max + 1) * (n_max + 1);
    let mut total = TruncatedOperator::new(DMatrix::zeros(dim, dim), n_max, Mode::AB, 0);
    for mono in monomials {
        let op_a = quantize_standard_single(mono.alpha.0, mono.alpha.1, n_max, &scheme.radial, Mode::A);
        let op_b = quantize_standard_single(mono.beta.0, mono.beta.1, n_max, &scheme.radial, Mode::B);
        let prod = op_b.to_two_mode().mul(&op_a.to_two_mode()).scale(mono.coeff);
        total = total.add(&prod);
    }
    let ratio = boundary_ratio(total.matrix());
    Ok(Quantized {
        op: total,
        boundary_ratio: ratio,
    })
}

/// The two-mode phase-space operators produced by quantizing the classical
/// coordinate combinations, plus the rebuilt noncommuting positions.
pub struct PhaseSpaceMap {
    pub x: [TruncatedOperator; 2],
    pub p: [TruncatedOperator; 2],
    pub q: [TruncatedOperator; 2],
    /// ‖[q̂¹, q̂²] − iθI‖_max over the trust band 0..N−2.
    pub commutator_defect: f64,
}

/// Quantize x¹, x², p₁, p₂ from their (α, β) expressions and rebuild
/// q̂ᵏ = x̂ᵏ − (θ/2ħ)ε^{kj}p̂_j; the returned defect certifies
/// [q̂¹, q̂²] = iθ on the trust band.
pub fn quantize_phase_space_map(
    d: &DerivedParams,
    n_max: usize,
    scheme: &QuadratureScheme,
) -> Result<PhaseSpaceMap> {
    let mw = d.scale_mw()?;
    let sx = (2.0 * d.params.hbar / mw).sqrt();
    let sp = (mw * d.params.hbar / 2.0).sqrt();
    let i = Complex64::new(0.0, 1.0);

    let combo = |ca: Complex64, cac: Complex64, cb: Complex64, cbc: Complex64| {
        vec![
            TwoModeMonomial {
                alpha: (1, 0),
                beta: (0, 0),
                coeff: ca,
            },
            TwoModeMonomial {
                alpha: (0, 1),
                beta: (0, 0),
                coeff: cac,
            },
            TwoModeMonomial {
                alpha: (0, 0),
                beta: (1, 0),
                coeff: cb,
            },
            TwoModeMonomial {
                alpha: (0, 0),
                beta: (0, 1),
                coeff: cbc,
            },
        ]
    };

    // x1 = Sx(Re a + Re b), x2 = Sx(Im b - Im a)
    // p1 = Sp(Im a + Im b), p2 = Sp(Re a - Re b)
    let half = c(0.5);
    let x1 = quantize_standard(
        &combo(half * sx, half * sx, half * sx, half * sx),
        n_max,
        scheme,
    )?
    .op;
    let x2 = quantize_standard(
        &combo(i * half * sx, -i * half * sx, -i * half * sx, i * half * sx),
        n_max,
        scheme,
    )?
    .op;
    let p1 = quantize_standard(
        &combo(-i * half * sp, i * half * sp, -i * half * sp, i * half * sp),
        n_max,
        scheme,
    )?
    .op;
    let p2 = quantize_standard(
        &combo(half * sp, half * sp, -half * sp, -half * sp),
        n_max,
        scheme,
    )?
    .op;

    let half_theta = d.params.theta / (2.0 * d.params.hbar);
    let q1 = x1.sub(&p2.scale_re(half_theta));
    let q2 = x2.add(&p1.scale_re(half_theta));
    let comm = q1.commutator(&q2);
    let target =
        TruncatedOperator::identity(n_max, Mode::AB).scale(Complex64::new(0.0, d.params.theta));
    let commutator_defect = comm.band_distance(&target, n_max.saturating_sub(2));

    Ok(PhaseSpaceMap {
        x: [x1, x2],
        p: [p1, p2],
        q: [q1, q2],
        commutator_defect,
    })
}

// ---------------------------------------------------------------------------
// identity verification report
// ---------------------------------------------------------------------------

/// One row of the verification report CSV
/// `identity,N,lambda,max_abs_err,trust_band`. The error is normalized by
/// the band magnitude of the target (with floor 1), so identities whose
/// entries grow like e^{λn} report meaningful numbers.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub identity: String,
    pub n_max: usize,
    pub lambda: f64,
    pub max_abs_err: f64,
    pub trust_band: usize,
}

/// Run the quantization identity suite at one (λ, N) point.
pub fn verification_report(
    lambda: f64,
    n_max: usize,
    scheme: &QuadratureScheme,
) -> Result<Vec<IdentityCheck>> {
    let mut rows = Vec::new();
    let mut push = |identity: &str, got: &TruncatedOperator, want: &TruncatedOperator, band: usize| {
        let scale = want.max_abs_on_band(band).max(1.0);
        rows.push(IdentityCheck {
            identity: identity.to_string(),
            n_max,
            lambda,
            max_abs_err: got.band_distance(want, band) / scale,
            trust_band: band,
        });
    };

    // resolution of unity: f = 1 quantizes to the identity
    let unity = quantize_lambda(&ClassicalObservable::constant(1.0), lambda, n_max, scheme)?;
    let id = TruncatedOperator::identity(n_max, Mode::A);
    push("unity", &unity.op, &id, n_max);

    // zeta -> Z_lambda, monomial (analytic-moment) route
    let z_ref = crate::fock::z_lambda(lambda, n_max, 1.0);
    let z_mono = quantize_lambda(&ClassicalObservable::zeta(), lambda, n_max, scheme)?;
    push("zeta_monomial", &z_mono.op, &z_ref, n_max - 1);

    // zeta -> Z_lambda, pointwise (full quadrature) route
    let z_point = quantize_lambda(
        &ClassicalObservable::Pointwise(Box::new(|z| z)),
        lambda,
        n_max,
        scheme,
    )?;
    push("zeta_pointwise", &z_point.op, &z_ref, n_max - 1);

    // |zeta|^2 -> diag((n+1) e^{lambda(n+1)})
    let diag_ref: Vec<f64> = (0..=n_max)
        .map(|n| (n as f64 + 1.0) * (lambda * (n as f64 + 1.0)).exp())
        .collect();
    let absq = quantize_lambda(&ClassicalObservable::abs_squared(), lambda, n_max, scheme)?;
    let target = TruncatedOperator::from_diagonal(&diag_ref, Mode::A);
    push("abs_squared", &absq.op, &target, n_max);

    // standard quantization: alpha -> a
    let n_std = n_max.min(8);
    let a_quant = quantize_standard(
        &[TwoModeMonomial {
            alpha: (1, 0),
            beta: (0, 0),
            coeff: c(1.0),
        }],
        n_std,
        scheme,
    )?;
    let (a_ref, _) = crate::fock::ladder(n_std, Mode::A);
    push(
        "standard_alpha",
        &a_quant.op,
        &a_ref.to_two_mode(),
        n_std - 1,
    );

    // moment problem n <= 10 (already a relative error)
    let w = WeightFunction::new(lambda)?;
    let mut worst = 0.0_f64;
    for n in 0..=10u32 {
        let num = moment(&w, n)?;
        let tgt = moment_target(n, lambda);
        worst = worst.max(((num - tgt) / tgt).abs());
    }
    rows.push(IdentityCheck {
        identity: "moments_n_le_10".to_string(),
        n_max,
        lambda,
        max_abs_err: worst,
        trust_band: 10,
    });

    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock;
    use crate::params::{derive, PhysicalParams};
    use crate::special::factorial;

    fn scheme() -> QuadratureScheme {
        QuadratureScheme::standard()
    }

    /// Adaptive Simpson on a finite interval, test-only oracle.
    fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec<F: Fn(f64) -> f64 + Copy>(
            f: F,
            a: f64,
            b: f64,
            fa: f64,
            fb: f64,
            fm: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1)
                    + rec(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1)
            }
        }
        let fa = f(a);
        let fb = f(b);
        let m = 0.5 * (a + b);
        let fm = f(m);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fb, fm, whole, tol, 40)
    }

    #[test]
    fn weight_lambda0_branch() {
        let w = WeightFunction::new(0.0).unwrap();
        for t in [0.0, 0.5, 3.0] {
            assert!((w.eval(t).unwrap() - (-t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn weight_at_zero_is_one() {
        for lambda in [0.3, 1.0, 4.0] {
            let w = WeightFunction::new(lambda).unwrap();
            assert!(
                (w.eval(0.0).unwrap() - 1.0).abs() < 1e-9,
                "lambda {lambda}: {}",
                w.eval(0.0).unwrap()
            );
        }
    }

    #[test]
    fn weight_matches_adaptive_simpson_oracle() {
        // raw u-integral for lambda = 2, t = 1
        let lambda = 2.0_f64;
        let t = 1.0_f64;
        let pref = (-0.5 * lambda).exp() / (2.0 * std::f64::consts::PI * lambda).sqrt();
        let integrand = |u: f64| {
            if u <= 0.0 {
                0.0
            } else {
                (-((-0.5 * lambda).exp()) * t * u).exp() * (-(u.ln().powi(2)) / (2.0 * lambda)).exp()
            }
        };
        // panelled so the adaptive rule cannot skip the mass near u ~ 1
        let cuts = [1e-10, 0.2, 1.0, 4.0, 20.0, 100.0, 400.0];
        let mut raw = 0.0;
        for pair in cuts.windows(2) {
            raw += simpson(integrand, pair[0], pair[1], 1e-14);
        }
        let oracle = pref * raw;
        let w = WeightFunction::new(lambda).unwrap();
        let got = w.eval(t).unwrap();
        assert!(
            ((got - oracle) / oracle).abs() < 1e-9,
            "{got} vs oracle {oracle}"
        );
    }

    #[test]
    fn weight_accurate_across_declared_domain() {
        // edges of the declared domain t <= 1e3, lambda in [0.1, 8]: the
        // oracle integrates e^{g(v)} by panelled Simpson after scaling by
        // the scanned maximum (at lambda = 0.1, t = 1e3 the weight itself
        // is ~1e-102, so everything must stay in log space)
        for (lambda, t) in [(0.1, 1e3), (8.0, 1e3), (0.5, 100.0), (4.0, 10.0)] {
            let big_t = (-0.5_f64 * lambda).exp() * t;
            let g = |v: f64| -v * v / (2.0 * lambda) + v - big_t * v.exp();
            // coarse scan for the max
            let (mut v_lo, mut v_hi) = (-(big_t.ln().abs()) - 10.0 * lambda - 20.0, lambda + 10.0);
            let mut g_max = f64::NEG_INFINITY;
            for i in 0..=4000 {
                let v = v_lo + (v_hi - v_lo) * i as f64 / 4000.0;
                g_max = g_max.max(g(v));
            }
            // shrink to where the integrand is above e^-60 of the peak
            while g(v_lo) < g_max - 60.0 {
                v_lo += 0.01;
            }
            while g(v_hi) < g_max - 60.0 {
                v_hi -= 0.01;
            }
            let scaled = |v: f64| (g(v) - g_max).exp();
            let mut raw = 0.0;
            let panels = 40;
            for p in 0..panels {
                let a = v_lo + (v_hi - v_lo) * p as f64 / panels as f64;
                let b = v_lo + (v_hi - v_lo) * (p + 1) as f64 / panels as f64;
                raw += simpson(scaled, a, b, 1e-13);
            }
            let oracle_ln = g_max + raw.ln() - 0.5 * lambda
                - (2.0 * std::f64::consts::PI * lambda).sqrt().ln();
            let w = WeightFunction::new(lambda).unwrap();
            let got_ln = w.eval_ln(t).unwrap();
            // agreement of ln-values to 1e-9 means relative agreement of
            // the weight itself to ~1e-9
            assert!(
                (got_ln - oracle_ln).abs() < 1e-9,
                "lambda {lambda} t {t}: {got_ln} vs {oracle_ln}"
            );
        }
    }

    #[test]
    fn weight_normalization_moment_zero() {
        for lambda in [0.5, 2.0] {
            let w = WeightFunction::new(lambda).unwrap();
            let m0 = moment(&w, 0).unwrap();
            assert!((m0 - 1.0).abs() < 1e-9, "lambda {lambda}: {m0}");
        }
    }

    #[test]
    fn moment_problem_reproduced() {
        for lambda in [0.5, 1.0, 2.0, 4.0] {
            let w = WeightFunction::new(lambda).unwrap();
            for n in 0..=10u32 {
                let num = moment(&w, n).unwrap();
                let tgt = moment_target(n, lambda);
                let rel = ((num - tgt) / tgt).abs();
                assert!(rel < 1e-8, "lambda {lambda} n {n}: rel {rel:.3e}");
            }
        }
        // lambda = 0 reduces to plain factorials
        let w0 = WeightFunction::new(0.0).unwrap();
        for n in 0..=10u32 {
            assert!((moment(&w0, n).unwrap() - factorial(n)).abs() < 1e-8 * factorial(n));
        }
    }

    #[test]
    fn unity_quantizes_to_identity() {
        let q = quantize_lambda(&ClassicalObservable::constant(1.0), 2.0, 10, &scheme()).unwrap();
        let id = TruncatedOperator::identity(10, Mode::A);
        assert!(q.op.band_distance(&id, 10) < 1e-12);
    }

    #[test]
    fn zeta_quantizes_to_z_lambda() {
        for lambda in [1.0, 2.0] {
            let q = quantize_lambda(&ClassicalObservable::zeta(), lambda, 10, &scheme()).unwrap();
            let z = fock::z_lambda(lambda, 10, 1.0);
            let err = q.op.band_distance(&z, 9);
            assert!(err < 1e-6, "lambda {lambda}: {err:.3e}");
        }
    }

    #[test]
    fn abs_squared_quantizes_to_diagonal() {
        let lambda = 1.0;
        let q = quantize_lambda(&ClassicalObservable::abs_squared(), lambda, 10, &scheme()).unwrap();
        let diag: Vec<f64> = (0..=10)
            .map(|n| (n as f64 + 1.0) * (lambda * (n as f64 + 1.0)).exp())
            .collect();
        let target = TruncatedOperator::from_diagonal(&diag, Mode::A);
        assert!(q.op.band_distance(&target, 10) < 1e-6);
        // and it is Z Z+ on the band
        let z = fock::z_lambda(lambda, 10, 1.0);
        let zz = z.mul(&z.adjoint());
        assert!(q.op.band_distance(&zz, 9) < 1e-6);
    }

    #[test]
    fn pointwise_lambda0_reduces_to_gaussian_measure() {
        // at lambda = 0 the pointwise route integrates against e^{-t}
        // directly and must reproduce the plain ladder operator
        let n = 8;
        let q = quantize_lambda(
            &ClassicalObservable::Pointwise(Box::new(|z| z)),
            0.0,
            n,
            &scheme(),
        )
        .unwrap();
        let (a, _) = fock::ladder(n, Mode::A);
        assert!(q.op.band_distance(&a, n - 1) < 1e-10);
    }

    #[test]
    fn pointwise_route_agrees_with_operators() {
        let lambda = 2.0;
        let n = 8;
        let q = quantize_lambda(
            &ClassicalObservable::Pointwise(Box::new(|z| z)),
            lambda,
            n,
            &scheme(),
        )
        .unwrap();
        let z = fock::z_lambda(lambda, n, 1.0);
        let scale = z.max_abs_on_band(n - 1);
        let err = q.op.band_distance(&z, n - 1);
        assert!(err / scale < 1e-8, "rel err {:.3e}", err / scale);

        // pointwise |zeta|^2
        let q2 = quantize_lambda(
            &ClassicalObservable::Pointwise(Box::new(|z| Complex64::new(z.norm_sqr(), 0.0))),
            lambda,
            n,
            &scheme(),
        )
        .unwrap();
        let diag: Vec<f64> = (0..=n)
            .map(|k| (k as f64 + 1.0) * (lambda * (k as f64 + 1.0)).exp())
            .collect();
        let target = TruncatedOperator::from_diagonal(&diag, Mode::A);
        let scale2 = target.max_abs_on_band(n - 1);
        assert!(q2.op.band_distance(&target, n - 1) / scale2 < 1e-8);
    }

    #[test]
    fn selection_rule_is_exact() {
        // zeta^2 zeta-bar populates only m - n = -1
        let q = quantize_lambda(
            &ClassicalObservable::Monomials(vec![Monomial::new(2, 1, c(1.0))]),
            1.5,
            8,
            &scheme(),
        )
        .unwrap();
        for m in 0..=8usize {
            for n in 0..=8usize {
                if m as i64 - n as i64 != -1 {
                    assert_eq!(q.op.matrix()[(m, n)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn nonnegative_symbols_give_psd_operators() {
        // |zeta|^2: diagonal, entries must be >= 0
        let q = quantize_lambda(&ClassicalObservable::abs_squared(), 2.0, 10, &scheme()).unwrap();
        for k in 0..=10 {
            assert!(q.op.matrix()[(k, k)].re >= -1e-10);
        }
        // (Re zeta)^2 = (zeta^2 + 2|zeta|^2 + conj(zeta)^2)/4: nonnegative,
        // quantizes to a non-diagonal matrix that must stay psd on the band
        let f = ClassicalObservable::Monomials(vec![
            Monomial::new(2, 0, c(0.25)),
            Monomial::new(1, 1, c(0.5)),
            Monomial::new(0, 2, c(0.25)),
        ]);
        let lambda = 1.0;
        let band = 8usize;
        let qp = quantize_lambda(&f, lambda, 10, &scheme()).unwrap();
        // entries are real here; restrict to the band and diagonalize
        let mut block = DMatrix::<f64>::zeros(band + 1, band + 1);
        let mut scale = 0.0f64;
        for i in 0..=band {
            for j in 0..=band {
                block[(i, j)] = qp.op.matrix()[(i, j)].re;
                scale = scale.max(block[(i, j)].abs());
            }
        }
        let eig = block.symmetric_eigen();
        for ev in eig.eigenvalues.iter() {
            assert!(*ev >= -1e-10 * scale, "eigenvalue {ev}");
        }
    }

    #[test]
    fn super_gaussian_symbol_refuses_instead_of_lying() {
        // exp(-|zeta|^2) decays faster than the half-line rule's weight:
        // the refinement cross-check must reject the result
        let res = quantize_lambda(
            &ClassicalObservable::Pointwise(Box::new(|z| c((-z.norm_sqr()).exp()))),
            1.0,
            6,
            &scheme(),
        );
        assert!(matches!(
            res,
            Err(CoreError::QuadratureNonConvergence { .. })
        ));
    }

    #[test]
    fn boundary_warning_for_growing_symbols() {
        // Z_lambda entries grow like e^{lambda n/2}: the cutoff row dominates
        let q = quantize_lambda(&ClassicalObservable::zeta(), 2.0, 10, &scheme()).unwrap();
        assert!(q.truncation_warning());
    }

    #[test]
    fn standard_quantization_ladder_results() {
        let n = 8;
        let sch = scheme();
        // alpha -> a
        let qa = quantize_standard(
            &[TwoModeMonomial {
                alpha: (1, 0),
                beta: (0, 0),
                coeff: c(1.0),
            }],
            n,
            &sch,
        )
        .unwrap();
        let (a, a_dag) = fock::ladder(n, Mode::A);
        assert!(qa.op.band_distance(&a.to_two_mode(), n - 1) < 1e-10);
        // alpha-bar -> a+
        let qad = quantize_standard(
            &[TwoModeMonomial {
                alpha: (0, 1),
                beta: (0, 0),
                coeff: c(1.0),
            }],
            n,
            &sch,
        )
        .unwrap();
        assert!(qad.op.band_distance(&a_dag.to_two_mode(), n - 1) < 1e-10);
        // beta -> b
        let qb = quantize_standard(
            &[TwoModeMonomial {
                alpha: (0, 0),
                beta: (1, 0),
                coeff: c(1.0),
            }],
            n,
            &sch,
        )
        .unwrap();
        let (b, _) = fock::ladder(n, Mode::B);
        assert!(qb.op.band_distance(&b.to_two_mode(), n - 1) < 1e-10);
        // unity
        let q1 = quantize_standard(
            &[TwoModeMonomial {
                alpha: (0, 0),
                beta: (0, 0),
                coeff: c(1.0),
            }],
            n,
            &sch,
        )
        .unwrap();
        let id = TruncatedOperator::identity(n, Mode::AB);
        assert!(q1.op.band_distance(&id, n) < 1e-10);
        // |alpha|^2 -> diag(n + 1)
        let qn = quantize_standard(
            &[TwoModeMonomial {
                alpha: (1, 1),
                beta: (0, 0),
                coeff: c(1.0),
            }],
            n,
            &sch,
        )
        .unwrap();
        let diag: Vec<f64> = (0..=n).map(|k| k as f64 + 1.0).collect();
        let target = TruncatedOperator::from_diagonal(&diag, Mode::A).to_two_mode();
        assert!(qn.op.band_distance(&target, n - 1) < 1e-10);
    }

    #[test]
    fn phase_space_map_reproduces_theta() {
        let sch = scheme();
        // theta = 0: commuting positions
        let d0 = derive(PhysicalParams::natural_units(1.0, 0.0)).unwrap();
        let map0 = quantize_phase_space_map(&d0, 8, &sch).unwrap();
        assert!(map0.commutator_defect < 1e-10);

        // theta = 1: [q1, q2] = i theta on the band
        let d = derive(PhysicalParams::natural_units(1.0, 1.0)).unwrap();
        let map = quantize_phase_space_map(&d, 8, &sch).unwrap();
        assert!(map.commutator_defect < 1e-8, "{}", map.commutator_defect);

        // canonical pairs
        let band = 6;
        let xp = map.x[0].commutator(&map.p[0]);
        let target = TruncatedOperator::identity(8, Mode::AB)
            .scale(Complex64::new(0.0, d.params.hbar));
        assert!(xp.band_distance(&target, band) < 1e-10);

        // agreement with the direct ladder construction
        let (x_ref, p_ref) = fock::position_momentum_two_mode(&d, 8).unwrap();
        assert!(map.x[0].band_distance(&x_ref[0], 8) < 1e-10);
        assert!(map.x[1].band_distance(&x_ref[1], 8) < 1e-10);
        assert!(map.p[0].band_distance(&p_ref[0], 8) < 1e-10);
        assert!(map.p[1].band_distance(&p_ref[1], 8) < 1e-10);

        // the full-size case: theta = 1 at N = 14
        let map14 = quantize_phase_space_map(&d, 14, &sch).unwrap();
        assert!(map14.commutator_defect < 1e-8, "{}", map14.commutator_defect);
    }

    #[test]
    fn report_rows_are_small() {
        let rows = verification_report(2.0, 10, &scheme()).unwrap();
        assert!(rows.len() >= 5);
        for row in &rows {
            assert!(
                row.max_abs_err < 1e-6,
                "{}: {:.3e}",
                row.identity,
                row.max_abs_err
            );
        }
    }
}
