//! Coherent-state families for the charge on the noncommutative plane.
//!
//! Two families are implemented:
//! * the standard two-mode (Malkin–Man'ko) coherent states |α, β⟩ with
//!   their mean trajectories, dispersions and time evolution, and
//! * the squeezed circular λ-CS |z₀, ζ⟩, joint eigenvectors of r̂₀₊ and
//!   Ẑ_λ, whose Fock coefficients are ζⁿ e^{−λn(n+1)/4}/√(n!) up to the
//!   normalization 1/√(Ε_λ(|ζ|²)).
//!
//! All λ-CS operations assume the units ħ = m̃ω̃/2 = 1 (the ζ label is
//! then already dimensionless).

use crate::error::{CoreError, Result};
use crate::fock::FockStateVector;
use crate::params::DerivedParams;
use crate::special::ln_factorial;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::RwLock;

/// Series terms stop once below this fraction of the partial sum.
pub const SERIES_REL_TOL: f64 = 1e-16;
/// Hard cap on series length.
pub const SERIES_MAX_TERMS: usize = 10_000;

/// Generalized factorial x_n! = n! e^{λn(n+1)/2} with x_n = n e^{nλ}.
pub fn gen_factorial(n: u32, lambda: f64) -> f64 {
    assert!(lambda >= 0.0);
    ln_gen_factorial(n, lambda).exp()
}

/// ln(x_n!) = ln(n!) + λn(n+1)/2, safe for any n.
pub fn ln_gen_factorial(n: u32, lambda: f64) -> f64 {
    let nf = n as f64;
    ln_factorial(n) + 0.5 * lambda * nf * (nf + 1.0)
}

/// Value of the generalized exponential together with the number of series
/// terms that were needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenExpValue {
    pub value: f64,
    pub terms: usize,
}

/// Ε_λ(t) = Σ_n e^{−λn(n+1)/2} tⁿ/n!, the λ-CS normalization function.
/// Ε_0(t) = e^t; Ε_λ(0) = 1; strictly increasing in t ≥ 0.
pub fn gen_exponential(lambda: f64, t: f64) -> GenExpValue {
    assert!(lambda >= 0.0, "lambda must be nonnegative");
    assert!(t >= 0.0, "argument must be nonnegative");
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut n = 0usize;
    while n < SERIES_MAX_TERMS {
        term *= t * (-(lambda) * (n as f64 + 1.0)).exp() / (n as f64 + 1.0);
        sum += term;
        n += 1;
        if term < SERIES_REL_TOL * sum {
            break;
        }
    }
    GenExpValue {
        value: sum,
        terms: n + 1,
    }
}

/// Ε_λ with a shared evaluation cache keyed on the argument bits.
#[derive(Debug)]
pub struct GenExp {
    pub lambda: f64,
    cache: RwLock<HashMap<u64, GenExpValue>>,
}

impl GenExp {
    pub fn new(lambda: f64) -> Self {
        assert!(lambda >= 0.0);
        Self {
            lambda,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn eval(&self, t: f64) -> GenExpValue {
        let key = t.to_bits();
        if let Some(v) = self.cache.read().expect("cache lock").get(&key) {
            return *v;
        }
        let v = gen_exponential(self.lambda, t);
        self.cache.write().expect("cache lock").insert(key, v);
        v
    }
}

/// ⟨Ĵ⟩ in the λ-CS |ζ⟩, units ħ = 1:
/// (1/Ε_λ(|ζ|²)) Σ_n |ζ|^{2n} (2n+1) e^{−λn(n+1)/2}/n!.
/// For λ = 0 this is exactly 2|ζ|² + 1.
pub fn j_expectation(zeta_abs: f64, lambda: f64) -> f64 {
    assert!(lambda >= 0.0 && zeta_abs >= 0.0);
    let t = zeta_abs * zeta_abs;
    let mut term = 1.0_f64;
    let mut norm = 1.0_f64;
    let mut num = 1.0_f64;
    let mut n = 0usize;
    while n < SERIES_MAX_TERMS {
        term *= t * (-(lambda) * (n as f64 + 1.0)).exp() / (n as f64 + 1.0);
        n += 1;
        norm += term;
        num += term * (2.0 * n as f64 + 1.0);
        if term * (2.0 * n as f64 + 3.0) < SERIES_REL_TOL * num {
            break;
        }
    }
    num / norm
}

/// Invert |ζ|² = (l/2) e^{λl/2} for the classical angular momentum l ≥ 0.
/// The left side is strictly increasing in l, so the root is unique;
/// bisection brackets it and Newton polishes to 1e−12.
pub fn classical_l_from_zeta(zeta_abs: f64, lambda: f64) -> f64 {
    assert!(zeta_abs >= 0.0 && lambda >= 0.0);
    if zeta_abs == 0.0 {
        return 0.0;
    }
    let target = zeta_abs * zeta_abs;
    let f = |l: f64| 0.5 * l * (0.5 * lambda * l).exp() - target;
    let fprime = |l: f64| 0.5 * (0.5 * lambda * l).exp() * (1.0 + 0.5 * lambda * l);

    let mut lo = 0.0_f64;
    let mut hi = (2.0 * target).max(1.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut l = 0.5 * (lo + hi);
    for _ in 0..8 {
        let step = f(l) / fprime(l);
        l -= step;
        if step.abs() < 1e-14 * l.abs().max(1.0) {
            break;
        }
    }
    l.max(0.0)
}

/// Relative error e(λ, l) = |⟨Ĵ⟩_ζ − l| / l with |ζ|² = (l/2)e^{λl/2}.
/// For λ = 0, e = 1/l exactly.
pub fn error_function(lambda: f64, l: f64) -> Result<f64> {
    if l <= 0.0 {
        return Err(CoreError::DomainError(format!(
            "error function needs l > 0, got {l}"
        )));
    }
    let zeta_abs = (0.5 * l * (0.5 * lambda * l).exp()).sqrt();
    Ok((j_expectation(zeta_abs, lambda) - l).abs() / l)
}

/// Which level sequence x_n drives the phase gaps of the lower-symbol
/// evolution. `Exponential` (x_n = n e^{nλ}) is the generalized-factorial
/// sequence and produces the annular trajectories; `Uniform` (x_n = n e^λ)
/// makes every gap equal, collapsing the trajectory to a circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectralGaps {
    #[default]
    Exponential,
    Uniform,
}

/// Precomputed lower-symbol evolution
/// ζ̌(t) = (ζ/Ε_λ(|ζ|²)) Σ_n (|ζ|^{2n}/x_n!) e^{−i(x_{n+2}−x_{n+1})t}.
#[derive(Debug, Clone)]
pub struct ZetaEvolution {
    zeta: Complex64,
    norm: f64,
    /// (weight |ζ|^{2n}/x_n!, phase gap x_{n+2}−x_{n+1}) per retained term.
    terms: Vec<(f64, f64)>,
}

impl ZetaEvolution {
    pub fn new(zeta: Complex64, lambda: f64, gaps: SpectralGaps) -> Self {
        assert!(lambda >= 0.0);
        let t = zeta.norm_sqr();
        let x = |k: f64| match gaps {
            SpectralGaps::Exponential => k * (k * lambda).exp(),
            SpectralGaps::Uniform => k * lambda.exp(),
        };
        let mut weight = 1.0_f64;
        let mut sum = 0.0_f64;
        let mut terms = Vec::new();
        for n in 0..SERIES_MAX_TERMS {
            let nf = n as f64;
            if n > 0 {
                // weight_n = weight_{n-1} * t / x_n
                weight *= t / x(nf);
            }
            sum += weight;
            terms.push((weight, x(nf + 2.0) - x(nf + 1.0)));
            if n > 0 && weight < SERIES_REL_TOL * sum {
                break;
            }
        }
        Self {
            zeta,
            norm: sum,
            terms,
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(w, gap) in &self.terms {
            acc += Complex64::from_polar(w, -gap * t);
        }
        self.zeta * acc / self.norm
    }
}

/// One-shot lower-symbol evolution with the default level sequence.
pub fn zeta_evolution(zeta: Complex64, lambda: f64, t: f64) -> Complex64 {
    ZetaEvolution::new(zeta, lambda, SpectralGaps::Exponential).eval(t)
}

pub fn zeta_evolution_with(zeta: Complex64, lambda: f64, t: f64, gaps: SpectralGaps) -> Complex64 {
    ZetaEvolution::new(zeta, lambda, gaps).eval(t)
}

/// Min and max of |ζ̌(t)| over a uniform grid on [0, t_max].
pub fn internal_radius(zeta: Complex64, lambda: f64, t_max: f64, n_samples: usize) -> (f64, f64) {
    assert!(t_max > 0.0);
    assert!(n_samples >= 1_000, "need at least 1e3 samples");
    let ev = ZetaEvolution::new(zeta, lambda, SpectralGaps::Exponential);
    let mut r_int = f64::INFINITY;
    let mut r_ext = 0.0_f64;
    for i in 0..n_samples {
        let t = t_max * i as f64 / (n_samples - 1) as f64;
        let r = ev.eval(t).norm();
        r_int = r_int.min(r);
        r_ext = r_ext.max(r);
    }
    (r_int, r_ext)
}

/// Default grid of the radius scans: t ∈ [0, 8π], 2·10⁴ samples.
pub fn internal_radius_default(zeta: Complex64, lambda: f64) -> (f64, f64) {
    internal_radius(zeta, lambda, 8.0 * std::f64::consts::PI, 20_000)
}

/// Truncation level N such that the coherent-state tail
/// Σ_{n>N} |α|^{2n}/n! is below `tol`.
pub fn truncation_for(amplitude: f64, tol: f64) -> usize {
    let t = amplitude * amplitude;
    let mut term = 1.0_f64;
    let mut n = 0usize;
    loop {
        n += 1;
        term *= t / n as f64;
        // geometric bound on the remaining tail once the ratio is < 1/2
        let ratio = t / (n as f64 + 1.0);
        if ratio < 0.5 && term * ratio / (1.0 - ratio) < tol {
            return n;
        }
        assert!(n < SERIES_MAX_TERMS, "tail bound did not converge");
    }
}

/// Truncated standard coherent state c_n = e^{−|α|²/2} αⁿ/√(n!).
pub fn coherent_vector(alpha: Complex64, n_max: usize) -> FockStateVector {
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    coeffs.push(c);
    for n in 1..=n_max {
        c *= alpha / Complex64::new((n as f64).sqrt(), 0.0);
        coeffs.push(c);
    }
    FockStateVector::from_slice(&coeffs)
}

/// Label of the orbit-center factor of a Malkin–Man'ko state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CenterLabel {
    /// Standard CS |β⟩ on the center mode (symmetric gauge).
    Beta(Complex64),
    /// Landau-gauge semi-coherent states: the plane-wave quantum number
    /// k₂ enters observables only as a real offset parameter.
    LandauK2(f64),
}

/// Two-mode standard coherent state |α, β⟩ (or the Landau semi-coherent
/// |α, k₂⟩, whose center factor is not Fock-representable).
#[derive(Debug, Clone)]
pub struct MMCoherentState {
    pub alpha: Complex64,
    pub center: CenterLabel,
    pub n_max: usize,
}

impl MMCoherentState {
    pub fn new(alpha: Complex64, center: CenterLabel, n_max: usize) -> Self {
        Self {
            alpha,
            center,
            n_max,
        }
    }

    /// Coefficients of the relative-motion factor |α⟩.
    pub fn relative_vector(&self) -> FockStateVector {
        coherent_vector(self.alpha, self.n_max)
    }

    /// Coefficients of the center factor, when it lives in Fock space.
    pub fn center_vector(&self) -> Option<FockStateVector> {
        match self.center {
            CenterLabel::Beta(beta) => Some(coherent_vector(beta, self.n_max)),
            CenterLabel::LandauK2(_) => None,
        }
    }

    /// Flattened tensor c_{mn} = ⟨m,n | β⟩⊗|α⟩ when representable.
    pub fn two_mode_vector(&self) -> Option<FockStateVector> {
        self.center_vector()
            .map(|b| b.tensor(&self.relative_vector()))
    }
}

/// λ-coherent state |z₀, ζ⟩ in CS units: the relative factor has
/// coefficients ζⁿ e^{−λn(n+1)/4} / √(n!) / √(Ε_λ(|ζ|²)) and the center
/// factor is the standard CS |z₀⟩ (z̃₀ = z₀ here).
#[derive(Debug, Clone)]
pub struct LambdaCS {
    pub zeta: Complex64,
    pub z0: Complex64,
    pub lambda: f64,
    pub n_max: usize,
    relative: FockStateVector,
}

impl LambdaCS {
    pub fn new(zeta: Complex64, z0: Complex64, lambda: f64, n_max: usize) -> Self {
        assert!(lambda >= 0.0);
        let norm = gen_exponential(lambda, zeta.norm_sqr()).value.sqrt();
        let mut coeffs = Vec::with_capacity(n_max + 1);
        let mut raw = Complex64::new(1.0, 0.0);
        coeffs.push(raw / norm);
        for n in 1..=n_max {
            let nf = n as f64;
            raw *= zeta * Complex64::new((-0.5 * lambda * nf).exp() / nf.sqrt(), 0.0);
            coeffs.push(raw / norm);
        }
        Self {
            zeta,
            z0,
            lambda,
            n_max,
            relative: FockStateVector::from_slice(&coeffs),
        }
    }

    /// Relative-motion factor |ζ⟩ only (z₀ = 0).
    pub fn relative(zeta: Complex64, lambda: f64, n_max: usize) -> Self {
        Self::new(zeta, Complex64::new(0.0, 0.0), lambda, n_max)
    }

    pub fn relative_vector(&self) -> &FockStateVector {
        &self.relative
    }

    pub fn center_vector(&self) -> FockStateVector {
        coherent_vector(self.z0, self.n_max)
    }

    pub fn two_mode_vector(&self) -> FockStateVector {
        self.center_vector().tensor(&self.relative)
    }
}

/// Mean relative-motion trajectory of |α, β; t⟩ with α = ħ^{−1/2}R e^{−iφ}:
/// ⟨x̂ⁱ − x̂₀ⁱ⟩ = √(2/m̃ω̃) R (cos, sin)(ω̃t + φ).
pub fn mm_mean_trajectory(d: &DerivedParams, r_amp: f64, phi: f64, t: f64) -> Result<[f64; 2]> {
    let mw = d.scale_mw()?;
    let pref = (2.0 / mw).sqrt() * r_amp;
    let ph = d.omega_tilde * t + phi;
    Ok([pref * ph.cos(), pref * ph.sin()])
}

/// Landau-gauge semi-coherent mean position
/// ⟨x̂¹⟩(t) = sgn(B)·√(2/mω) R cos(ωt+φ) − μ_L k₂/(m Ω), Ω = eB/(mc).
pub fn mm_landau_mean_x1(d: &DerivedParams, r_amp: f64, phi: f64, k2: f64, t: f64) -> Result<f64> {
    if d.omega == 0.0 {
        return Err(CoreError::DomainError(
            "semi-coherent states need B != 0".to_string(),
        ));
    }
    let m = d.params.mass;
    let sign = d.params.b_field.signum();
    let amp = sign * (2.0 / (m * d.omega)).sqrt() * r_amp;
    let offset = -d.mu_l * k2 / (m * d.omega_signed());
    Ok(amp * (d.omega * t + phi).cos() + offset)
}

/// Coherent-state dispersions of the relative coordinate and the kinematic
/// momentum (a canonically conjugate pair): Δx = √(μ_S cħ/(2B e)),
/// Δp = √(ħB e/(2c μ_S)), saturating Δx·Δp = ħ/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersions {
    pub dx: f64,
    pub dp: f64,
    pub product: f64,
}

pub fn mm_dispersions(d: &DerivedParams) -> Result<Dispersions> {
    let p = &d.params;
    if d.mu_s.abs() < crate::params::CRITICAL_EPS {
        return Err(CoreError::CriticalRegime {
            context: "coherent-state dispersions",
            parameter: "mu_s",
            value: d.mu_s,
        });
    }
    let arg = d.mu_s * p.c * p.hbar / (2.0 * p.b_field * p.charge);
    if arg < 0.0 {
        return Err(CoreError::NegativeArgument {
            context: "dispersion width (mu_s/B < 0)",
            value: arg,
        });
    }
    let dx = arg.sqrt();
    let dp = (p.hbar * p.b_field * p.charge / (2.0 * p.c * d.mu_s)).sqrt();
    Ok(Dispersions {
        dx,
        dp,
        product: 0.5 * p.hbar,
    })
}

/// Time-evolved label: |α, β; t⟩ = e^{−iω̃t/2} |α e^{−iω̃t}, β⟩.
pub fn mm_evolved_label(alpha: Complex64, omega_tilde: f64, t: f64) -> (Complex64, f64) {
    (
        alpha * Complex64::from_polar(1.0, -omega_tilde * t),
        -0.5 * omega_tilde * t,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{self, Mode};
    use crate::params::{derive, PhysicalParams};
    use std::f64::consts::{E, PI};

    fn cs_units() -> DerivedParams {
        derive(PhysicalParams::lambda_cs_units()).unwrap()
    }

    #[test]
    fn gen_factorial_values() {
        assert_eq!(gen_factorial(0, 3.0), 1.0);
        for n in 0..8u32 {
            let plain = crate::special::factorial(n);
            assert!((gen_factorial(n, 0.0) - plain).abs() < 1e-12 * plain);
        }
        // lambda = 2, n = 2: x_1 x_2 = e^2 * 2 e^4 = 2 e^6
        let want = 2.0 * (6.0_f64).exp();
        assert!((gen_factorial(2, 2.0) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn gen_exponential_values() {
        assert_eq!(gen_exponential(3.0, 0.0).value, 1.0);
        let e0 = gen_exponential(0.0, 1.0);
        assert!((e0.value - E).abs() < 1e-14);

        // independent term-by-term oracle for E_2(1)
        let mut oracle = 0.0;
        for n in 0..60u32 {
            let nf = n as f64;
            oracle += (-nf * (nf + 1.0)).exp() / crate::special::factorial(n);
        }
        let got = gen_exponential(2.0, 1.0).value;
        assert!((got - oracle).abs() < 1e-14);
        assert!((got - 1.1365756834462).abs() < 1e-12);
    }

    #[test]
    fn gen_exp_cache_consistent() {
        let g = GenExp::new(1.5);
        let a = g.eval(2.0);
        let b = g.eval(2.0);
        assert_eq!(a, b);
        assert_eq!(a.value, gen_exponential(1.5, 2.0).value);
        assert!(a.terms >= 2);
    }

    #[test]
    fn j_expectation_ground_and_closed_form() {
        assert!((j_expectation(0.0, 2.0) - 1.0).abs() < 1e-15);
        for z in [0.3, 1.0, 2.5] {
            let want = 2.0 * z * z + 1.0;
            assert!((j_expectation(z, 0.0) - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn j_expectation_matches_matrix_oracle() {
        let n = 40;
        let j = fock::angular_momentum(1.0, n);
        for (lambda, z) in [(2.0, 1.0), (0.5, 1.5), (4.0, 2.0)] {
            let state = LambdaCS::relative(Complex64::new(z, 0.0), lambda, n);
            let mat = j.expectation(state.relative_vector()).re;
            let series = j_expectation(z, lambda);
            assert!(
                (mat - series).abs() < 1e-12 * series.max(1.0),
                "lambda {lambda} z {z}: {mat} vs {series}"
            );
        }
    }

    #[test]
    fn l_inversion() {
        assert_eq!(classical_l_from_zeta(0.0, 2.0), 0.0);
        for z in [0.2, 1.0, 3.0] {
            assert!((classical_l_from_zeta(z, 0.0) - 2.0 * z * z).abs() < 1e-12);
        }
        // lambda = 2, |zeta| = 1: l solves (l/2)e^l = 1, i.e. l = W(2)
        let l = classical_l_from_zeta(1.0, 2.0);
        assert!((0.5 * l * l.exp() - 1.0).abs() < 1e-12);
        assert!((l - 0.852605502013725).abs() < 1e-12);
    }

    #[test]
    fn error_function_closed_forms() {
        for l in [0.5, 1.0, 2.0, 7.0] {
            assert!((error_function(0.0, l).unwrap() - 1.0 / l).abs() < 1e-12);
        }
        // raising lambda helps at l = 2
        assert!(error_function(2.0, 2.0).unwrap() < error_function(0.0, 2.0).unwrap());
        assert!(error_function(2.0, -1.0).is_err());
        assert!(error_function(2.0, 0.0).is_err());
    }

    #[test]
    fn zeta_evolution_lambda0_is_circle() {
        let zeta = Complex64::new(1.0, 0.0);
        for t in [0.0, 0.4, 2.0, 11.0] {
            let got = zeta_evolution(zeta, 0.0, t);
            let want = zeta * Complex64::from_polar(1.0, -t);
            assert!((got - want).norm() < 1e-12, "t={t}");
        }
        // t = 0 returns zeta exactly for any lambda
        for lambda in [0.0, 0.7, 3.0] {
            let z = Complex64::new(0.3, -0.6);
            assert!((zeta_evolution(z, lambda, 0.0) - z).norm() < 1e-14);
        }
    }

    #[test]
    fn uniform_gaps_stay_circular() {
        let zeta = Complex64::new(1.0, 0.0);
        for t in [0.3, 1.7, 9.0] {
            let got = zeta_evolution_with(zeta, 2.0, t, SpectralGaps::Uniform);
            assert!((got.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zeta_evolution_annulus_and_matrix_oracle() {
        let zeta = Complex64::new(1.0, 0.0);
        let lambda = 2.0;
        // annulus bounds for lambda = 2
        let (r_int, r_ext) = internal_radius(zeta, lambda, 8.0 * PI, 2_000);
        assert!(r_ext <= 1.0 + 1e-12);
        assert!(r_int > 0.7 && r_int < 0.85, "r_int {r_int}");

        // Heisenberg-picture matrix oracle: <zeta| e^{iHt} Z e^{-iHt} |zeta>
        // with H = diag((n+1) e^{lambda(n+1)})
        let n = 30;
        let z_op = fock::z_lambda(lambda, n, 1.0);
        let state = LambdaCS::relative(zeta, lambda, n);
        for t in [0.2, 1.3, 5.0] {
            let mut evolved = state.relative_vector().clone();
            for (k, c) in evolved.coeffs.iter_mut().enumerate() {
                let energy = (k as f64 + 1.0) * (lambda * (k as f64 + 1.0)).exp();
                *c *= Complex64::from_polar(1.0, -energy * t);
            }
            let mat = z_op.expectation(&evolved);
            let series = zeta_evolution(zeta, lambda, t);
            assert!((mat - series).norm() < 1e-10, "t={t}: {mat} vs {series}");
        }
    }

    #[test]
    fn internal_radius_limits() {
        let zeta = Complex64::new(1.0, 0.0);
        let (ri, re) = internal_radius(zeta, 0.0, 8.0 * PI, 1_000);
        assert!((ri - 1.0).abs() < 1e-12 && (re - 1.0).abs() < 1e-12);
        // lambda = 7: nearly circular again
        let (ri7, re7) = internal_radius(zeta, 7.0, 8.0 * PI, 2_000);
        assert!(re7 - ri7 < 0.05, "width {}", re7 - ri7);
    }

    #[test]
    fn lambda_cs_normalized() {
        for lambda in [0.0, 0.5, 2.0, 4.0, 6.0] {
            for z in [0.25, 1.0, 3.0] {
                let n = truncation_for(z, 1e-16).max(24);
                let st = LambdaCS::relative(Complex64::from_polar(z, 0.4), lambda, n);
                assert!(
                    (st.relative_vector().norm() - 1.0).abs() < 1e-12,
                    "lambda {lambda} z {z}"
                );
            }
        }
    }

    #[test]
    fn lambda_cs_is_z_lambda_eigenvector() {
        let lambda = 2.0;
        let zeta = Complex64::new(0.9, 0.5);
        let n = 32;
        let st = LambdaCS::relative(zeta, lambda, n);
        let z_op = fock::z_lambda(lambda, n, 1.0);
        let lhs = z_op.apply(st.relative_vector());
        let mut resid = 0.0_f64;
        for k in 0..=n - 1 {
            resid += (lhs.coeffs[k] - zeta * st.relative_vector().coeffs[k]).norm_sqr();
        }
        assert!(resid.sqrt() < 1e-10, "residual {}", resid.sqrt());
    }

    #[test]
    fn lambda0_reduces_to_standard_cs() {
        let zeta = Complex64::new(0.8, -0.4);
        let n = 24;
        let st = LambdaCS::relative(zeta, 0.0, n);
        let std_cs = coherent_vector(zeta, n);
        for k in 0..=n {
            assert!(
                (st.relative_vector().coeffs[k] - std_cs.coeffs[k]).norm() < 1e-14,
                "coefficient {k}"
            );
        }
    }

    #[test]
    fn mm_mean_matches_fock_expectation() {
        let d = cs_units();
        let mw = d.mw_tilde.unwrap();
        let r_amp = 0.9;
        let phi = 0.3;
        // t = 0, phi = 0 sanity
        let p0 = mm_mean_trajectory(&d, r_amp, 0.0, 0.0).unwrap();
        assert!((p0[0] - (2.0 / mw).sqrt() * r_amp).abs() < 1e-14 && p0[1].abs() < 1e-14);

        // matrix oracle: x - x0 = sqrt(hbar/(2 mw)) (a + a+), and the
        // second component via i(a - a+)
        let n = truncation_for(r_amp / d.params.hbar.sqrt(), 1e-14).max(30);
        let (a, a_dag) = fock::ladder(n, Mode::A);
        let sx = (d.params.hbar / (2.0 * mw)).sqrt();
        let op1 = a.add(&a_dag).scale_re(sx);
        let op2 = a.sub(&a_dag).scale(Complex64::new(0.0, sx));
        let alpha0 = Complex64::from_polar(r_amp / d.params.hbar.sqrt(), -phi);
        for t in [0.0, 0.7, 2.9] {
            let (alpha_t, _) = mm_evolved_label(alpha0, d.omega_tilde, t);
            let v = coherent_vector(alpha_t, n);
            let got = [op1.expectation(&v).re, op2.expectation(&v).re];
            let want = mm_mean_trajectory(&d, r_amp, phi, t).unwrap();
            assert!((got[0] - want[0]).abs() < 1e-10, "t={t} x1");
            assert!((got[1] - want[1]).abs() < 1e-10, "t={t} x2");
        }
    }

    #[test]
    fn landau_mean_x1_with_offset() {
        let d = derive(PhysicalParams::natural_units(1.0, 0.6)).unwrap();
        let r_amp = 0.8;
        let phi = 0.2;
        let k2 = 1.3;
        // frequency is omega (not omega-tilde) and the offset is constant
        let at0 = mm_landau_mean_x1(&d, r_amp, phi, k2, 0.0).unwrap();
        let at_period = mm_landau_mean_x1(&d, r_amp, phi, k2, 2.0 * PI / d.omega).unwrap();
        assert!((at0 - at_period).abs() < 1e-12);
        let offset = -d.mu_l * k2 / d.omega_signed();
        let with_zero_r = mm_landau_mean_x1(&d, 0.0, phi, k2, 0.4).unwrap();
        assert!((with_zero_r - offset).abs() < 1e-14);

        // matrix oracle in the Landau ladder basis:
        // x1 = sqrt(hbar/(2 m omega)) (a + a+) - mu_l k2/(m Omega)
        let n = 40;
        let (a, a_dag) = fock::ladder(n, Mode::A);
        let sx = (d.params.hbar / (2.0 * d.params.mass * d.omega)).sqrt();
        let x1_op = a.add(&a_dag).scale_re(sx);
        let alpha0 = Complex64::from_polar(r_amp / d.params.hbar.sqrt(), -phi);
        for t in [0.0, 0.9, 3.3] {
            let alpha_t = alpha0 * Complex64::from_polar(1.0, -d.omega * t);
            let v = coherent_vector(alpha_t, n);
            let got = x1_op.expectation(&v).re + offset;
            let want = mm_landau_mean_x1(&d, r_amp, phi, k2, t).unwrap();
            assert!((got - want).abs() < 1e-10, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn dispersions_saturate() {
        let d = derive(PhysicalParams::natural_units(1.0, 0.8)).unwrap();
        let disp = mm_dispersions(&d).unwrap();
        assert!((disp.dx * disp.dp - 0.5 * d.params.hbar).abs() < 1e-15);
        assert!((disp.product - 0.5 * d.params.hbar).abs() < 1e-16);
        // commutative limit: Landau-level width sqrt(c hbar / (2 B e))
        let d0 = derive(PhysicalParams::natural_units(1.0, 0.0)).unwrap();
        let disp0 = mm_dispersions(&d0).unwrap();
        assert!((disp0.dx - (0.5_f64).sqrt()).abs() < 1e-15);

        // matrix oracle: relative coordinate and kinematic momentum in a
        // coherent state
        let n = 60;
        let ops = fock::center_and_relative(&d, n).unwrap();
        let alpha = Complex64::new(0.7, -0.2);
        let v = coherent_vector(alpha, n);
        let var = |op: &fock::TruncatedOperator| {
            let mean = op.expectation(&v).re;
            let m2 = op.mul(op).expectation(&v).re;
            (m2 - mean * mean).sqrt()
        };
        assert!((var(&ops.r[0]) - disp.dx).abs() < 1e-10);
        assert!((var(&ops.p_kin[0]) - disp.dp).abs() < 1e-10);

        // negative argument regime
        let dneg = derive(PhysicalParams::natural_units(-1.0, 0.8)).unwrap();
        assert!(matches!(
            mm_dispersions(&dneg),
            Err(CoreError::NegativeArgument { .. })
        ));
    }

    #[test]
    fn evolution_covariance_overlap() {
        let d = cs_units();
        let alpha = Complex64::new(0.9, 0.4);
        let n = truncation_for(alpha.norm(), 1e-16).max(40);
        let v0 = coherent_vector(alpha, n);
        for t in [0.3, 1.1, 4.0] {
            // exact evolution: phases e^{-i omega-tilde (n + 1/2) t}
            let mut evolved = v0.clone();
            for (k, c) in evolved.coeffs.iter_mut().enumerate() {
                *c *= Complex64::from_polar(1.0, -d.omega_tilde * (k as f64 + 0.5) * t);
            }
            let (alpha_t, phase) = mm_evolved_label(alpha, d.omega_tilde, t);
            let target = coherent_vector(alpha_t, n);
            let overlap = target.coeffs.dotc(&evolved.coeffs);
            assert!((overlap.norm() - 1.0).abs() < 1e-12, "t={t}");
            // the global phase is exactly -omega-tilde t/2
            assert!((overlap.arg() - phase).rem_euclid(2.0 * PI).min(
                (2.0 * PI - (overlap.arg() - phase).rem_euclid(2.0 * PI)).abs()
            ) < 1e-10);
        }
    }

    #[test]
    fn truncation_bound_is_sound() {
        for amp in [0.5, 1.0, 2.0] {
            let n = truncation_for(amp, 1e-12);
            let t = amp * amp;
            // brute-force tail
            let mut term = 1.0_f64;
            for k in 1..=n {
                term *= t / k as f64;
            }
            let mut tail = 0.0;
            let mut tk = term;
            for k in (n + 1)..(n + 200) {
                tk *= t / k as f64;
                tail += tk;
            }
            assert!(tail < 1e-12, "amp {amp}: tail {tail}");
        }
    }
}
