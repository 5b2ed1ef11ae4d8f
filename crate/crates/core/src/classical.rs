//! Classical trajectories of a charge on the noncommutative plane.
//!
//! The equations of motion derived from the θ-modified action are
//!
//! ```text
//! ṗ_i = −∂H/∂qⁱ ,   q̇ⁱ = ∂H/∂p_i + (θ^{ij}/ħ) ∂H/∂q^j ,
//! ```
//!
//! with H(q, p) = (1/2m)[p + (e/c)A(q)]² and θ^{ij} = θ ε^{ij}. In the
//! Landau gauge the orbit is an ellipse at the cyclotron frequency ω whose
//! q²/q¹ amplitude ratio is [`landau_axis_ratio`]; in the symmetric gauge
//! it is a circle at the shifted frequency ω̃ = ω|μ_S|. Closed forms and a
//! fixed-step RK4 integrator (the independent oracle) are both provided.

use crate::error::{CoreError, Result};
use crate::params::{DerivedParams, CRITICAL_EPS};
use std::f64::consts::TAU;

/// Vector-potential choice. `LandauSwapped` is A = −B(q², 0), which
/// interchanges the ellipse axes relative to `Landau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    Landau,
    Symmetric,
    LandauSwapped,
}

/// A gauge together with the field intensity: the map q ↦ A(q).
///
/// All three gauges are linear in q, so the Jacobian ∂A_i/∂q_j is a
/// constant matrix and ∂₁A₂ − ∂₂A₁ = B exactly.
#[derive(Debug, Clone, Copy)]
pub struct GaugeField {
    pub gauge: Gauge,
    pub b_field: f64,
}

impl GaugeField {
    pub fn new(gauge: Gauge, b_field: f64) -> Self {
        Self { gauge, b_field }
    }

    pub fn vector_potential(&self, q: [f64; 2]) -> [f64; 2] {
        let b = self.b_field;
        match self.gauge {
            Gauge::Landau => [0.0, b * q[0]],
            Gauge::Symmetric => [-0.5 * b * q[1], 0.5 * b * q[0]],
            Gauge::LandauSwapped => [-b * q[1], 0.0],
        }
    }

    /// Constant Jacobian J[i][j] = ∂A_i/∂q_j.
    pub fn jacobian(&self) -> [[f64; 2]; 2] {
        let b = self.b_field;
        match self.gauge {
            Gauge::Landau => [[0.0, 0.0], [b, 0.0]],
            Gauge::Symmetric => [[0.0, -0.5 * b], [0.5 * b, 0.0]],
            Gauge::LandauSwapped => [[0.0, -b], [0.0, 0.0]],
        }
    }

    /// ∂₁A₂ − ∂₂A₁, which must equal B for every gauge.
    pub fn curl(&self) -> f64 {
        let j = self.jacobian();
        j[1][0] - j[0][1]
    }

    /// The gauge function relating Landau and symmetric gauges,
    /// A_L = A_S + ∇f with f = ½ B q¹q². Metadata only.
    pub fn landau_symmetric_gauge_function(&self, q: [f64; 2]) -> f64 {
        0.5 * self.b_field * q[0] * q[1]
    }
}

/// Axis ratio (q² amplitude)/(q¹ amplitude) of the Landau-gauge orbit
/// traced by the equations of motion: 1 − eBθ/(ħc) = 2 − eps.
pub fn landau_axis_ratio(d: &DerivedParams) -> f64 {
    2.0 - d.eps
}

/// Geometric data of a closed-form orbit.
#[derive(Debug, Clone, Copy)]
pub struct OrbitSpec {
    /// q¹ amplitude (circle radius in the symmetric gauge). >= 0.
    pub radius: f64,
    /// Phase angle, stored reduced to [0, 2π).
    pub phase: f64,
    /// Orbit center (q₀¹, q₀²).
    pub center: [f64; 2],
    pub gauge: Gauge,
}

impl OrbitSpec {
    pub fn new(radius: f64, phase: f64, center: [f64; 2], gauge: Gauge) -> Self {
        assert!(radius >= 0.0, "orbit radius must be nonnegative");
        Self {
            radius,
            phase: phase.rem_euclid(TAU),
            center,
            gauge,
        }
    }
}

/// One time sample. `q` are the noncommutative coordinates, `x` the
/// commuting ones; they always satisfy qᵏ = xᵏ − (θ/2ħ) ε^{kj} p_j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub q: [f64; 2],
    pub x: [f64; 2],
    pub p: [f64; 2],
}

fn x_from_q(d: &DerivedParams, q: [f64; 2], p: [f64; 2]) -> [f64; 2] {
    let half = d.params.theta / (2.0 * d.params.hbar);
    [q[0] + half * p[1], q[1] - half * p[0]]
}

fn q_from_x(d: &DerivedParams, x: [f64; 2], p: [f64; 2]) -> [f64; 2] {
    let half = d.params.theta / (2.0 * d.params.hbar);
    [x[0] - half * p[1], x[1] + half * p[0]]
}

/// Landau-gauge closed form:
/// q¹ = q₀¹ + R cos(Ωt+φ), q² = q₀² + εR sin(Ωt+φ) with Ω = eB/(mc)
/// signed and ε = [`landau_axis_ratio`]. p₂ is the constant −mΩq₀¹.
pub fn closed_form_landau(d: &DerivedParams, o: &OrbitSpec, t: f64) -> TrajectorySample {
    debug_assert_eq!(o.gauge, Gauge::Landau);
    let m = d.params.mass;
    let big_omega = d.omega_signed();
    let eps = landau_axis_ratio(d);
    let ph = big_omega * t + o.phase;
    let q = [
        o.center[0] + o.radius * ph.cos(),
        o.center[1] + eps * o.radius * ph.sin(),
    ];
    let p = [
        -m * o.radius * big_omega * ph.sin(),
        -m * big_omega * o.center[0],
    ];
    TrajectorySample {
        t,
        q,
        x: x_from_q(d, q, p),
        p,
    }
}

/// Swapped Landau gauge A = −B(q², 0): same orbit with the ellipse axes
/// interchanged, q¹ carrying the ε factor.
pub fn closed_form_landau_swapped(d: &DerivedParams, o: &OrbitSpec, t: f64) -> TrajectorySample {
    debug_assert_eq!(o.gauge, Gauge::LandauSwapped);
    let m = d.params.mass;
    let big_omega = d.omega_signed();
    let eps = landau_axis_ratio(d);
    let ph = big_omega * t + o.phase;
    let q = [
        o.center[0] + eps * o.radius * ph.cos(),
        o.center[1] + o.radius * ph.sin(),
    ];
    let p = [
        m * big_omega * o.center[1],
        m * o.radius * big_omega * ph.cos(),
    ];
    TrajectorySample {
        t,
        q,
        x: x_from_q(d, q, p),
        p,
    }
}

/// Position part of the symmetric-gauge circle, valid for every θ:
/// q = q₀ + R(cos(Ω_S t+φ), sin(Ω_S t+φ)) with Ω_S = (eB/mc)μ_S signed.
pub fn symmetric_orbit_position(d: &DerivedParams, o: &OrbitSpec, t: f64) -> [f64; 2] {
    let ph = d.omega_sym_signed() * t + o.phase;
    [
        o.center[0] + o.radius * ph.cos(),
        o.center[1] + o.radius * ph.sin(),
    ]
}

/// Symmetric-gauge closed form: a circle of radius R at the signed
/// frequency Ω_S = (eB/mc)μ_S, |Ω_S| = ω̃. Freezes when μ_S = 0.
///
/// Errors with `CriticalRegime` when μ_L ≈ 0 and R > 0: at θ = 2cħ/eB the
/// q-coordinates freeze for every finite momentum, so no circular orbit of
/// positive radius exists and the momentum inversion diverges. Use
/// [`symmetric_orbit_position`] for the momentum-free formula.
pub fn closed_form_symmetric(d: &DerivedParams, o: &OrbitSpec, t: f64) -> Result<TrajectorySample> {
    debug_assert_eq!(o.gauge, Gauge::Symmetric);
    let m = d.params.mass;
    let omega_s = d.omega_sym_signed();
    let k = 0.5 * m * d.omega_signed();
    let ph = omega_s * t + o.phase;
    let q = symmetric_orbit_position(d, o, t);
    // kinematic momentum from q-dot = (mu_L/m) P
    let big_p = if o.radius == 0.0 {
        [0.0, 0.0]
    } else {
        if d.mu_l.abs() < CRITICAL_EPS {
            return Err(CoreError::CriticalRegime {
                context: "symmetric-gauge orbit momenta",
                parameter: "mu_l",
                value: d.mu_l,
            });
        }
        let amp = m * o.radius * omega_s / d.mu_l;
        [-amp * ph.sin(), amp * ph.cos()]
    };
    let p = [big_p[0] + k * q[1], big_p[1] - k * q[0]];
    Ok(TrajectorySample {
        t,
        q,
        x: x_from_q(d, q, p),
        p,
    })
}

/// Canonical initial data (q(0), p(0)) reproducing a closed-form orbit,
/// obtained by differentiating q(t) and inverting q̇(p).
pub fn initial_state(d: &DerivedParams, o: &OrbitSpec) -> Result<PhasePoint> {
    let s = match o.gauge {
        Gauge::Landau => closed_form_landau(d, o, 0.0),
        Gauge::LandauSwapped => closed_form_landau_swapped(d, o, 0.0),
        Gauge::Symmetric => closed_form_symmetric(d, o, 0.0)?,
    };
    Ok(PhasePoint { pos: s.q, mom: s.p })
}

/// Which phase-space chart the ODE system runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinateSet {
    /// (q, p) with the θ-modified velocity equation.
    Noncommutative,
    /// (x, p) with plain Hamilton equations for H_θ(x,p) = H(q(x,p), p).
    Commuting,
}

#[derive(Debug, Clone, Copy)]
pub struct PhasePoint {
    pub pos: [f64; 2],
    pub mom: [f64; 2],
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    /// Target for the Richardson global-error estimate, relative to the
    /// orbit scale.
    pub rel_tol: f64,
    /// Hard cap on RK4 steps across all refinement passes.
    pub max_steps: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            max_steps: 1 << 20,
        }
    }
}

/// Energy H(q,p) = Π²/2m with Π = p + (e/c)A(q).
pub fn hamiltonian_value(d: &DerivedParams, field: &GaugeField, q: [f64; 2], p: [f64; 2]) -> f64 {
    let a = field.vector_potential(q);
    let ec = d.params.charge / d.params.c;
    let pi = [p[0] + ec * a[0], p[1] + ec * a[1]];
    (pi[0] * pi[0] + pi[1] * pi[1]) / (2.0 * d.params.mass)
}

/// H_θ(x, p) = H(q(x,p), p); numerically the same conserved value.
pub fn hamiltonian_theta_value(
    d: &DerivedParams,
    field: &GaugeField,
    x: [f64; 2],
    p: [f64; 2],
) -> f64 {
    hamiltonian_value(d, field, q_from_x(d, x, p), p)
}

struct Rhs<'a> {
    d: &'a DerivedParams,
    field: &'a GaugeField,
    coords: CoordinateSet,
}

impl Rhs<'_> {
    /// Gradient of H in the q-slot and the kinematic velocity, at (q, p).
    fn grad_and_velocity(&self, q: [f64; 2], p: [f64; 2]) -> ([f64; 2], [f64; 2]) {
        let par = &self.d.params;
        let ec = par.charge / par.c;
        let a = self.field.vector_potential(q);
        let jac = self.field.jacobian();
        let v = [(p[0] + ec * a[0]) / par.mass, (p[1] + ec * a[1]) / par.mass];
        // dH/dq_j = (e/c) sum_i v_i dA_i/dq_j
        let g = [
            ec * (v[0] * jac[0][0] + v[1] * jac[1][0]),
            ec * (v[0] * jac[0][1] + v[1] * jac[1][1]),
        ];
        (g, v)
    }

    fn eval(&self, y: [f64; 4]) -> [f64; 4] {
        let par = &self.d.params;
        let pos = [y[0], y[1]];
        let p = [y[2], y[3]];
        match self.coords {
            CoordinateSet::Noncommutative => {
                let (g, v) = self.grad_and_velocity(pos, p);
                let th = par.theta / par.hbar;
                [v[0] + th * g[1], v[1] - th * g[0], -g[0], -g[1]]
            }
            CoordinateSet::Commuting => {
                let q = q_from_x(self.d, pos, p);
                let (g, v) = self.grad_and_velocity(q, p);
                let half = par.theta / (2.0 * par.hbar);
                [v[0] + half * g[1], v[1] - half * g[0], -g[0], -g[1]]
            }
        }
    }
}

fn rk4_step(rhs: &Rhs, y: [f64; 4], h: f64) -> [f64; 4] {
    let add = |a: [f64; 4], b: [f64; 4], s: f64| {
        [
            a[0] + s * b[0],
            a[1] + s * b[1],
            a[2] + s * b[2],
            a[3] + s * b[3],
        ]
    };
    let k1 = rhs.eval(y);
    let k2 = rhs.eval(add(y, k1, 0.5 * h));
    let k3 = rhs.eval(add(y, k2, 0.5 * h));
    let k4 = rhs.eval(add(y, k3, h));
    let mut out = y;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrate one pass, landing exactly on each grid time. `h_nominal`
/// bounds the step; each interval is split into equal substeps.
fn run_pass(rhs: &Rhs, init: [f64; 4], t_grid: &[f64], h_nominal: f64) -> (Vec<[f64; 4]>, usize) {
    let mut states = Vec::with_capacity(t_grid.len());
    let mut y = init;
    let mut steps = 0;
    states.push(y);
    for w in t_grid.windows(2) {
        let dt = w[1] - w[0];
        let m = (dt / h_nominal).ceil().max(1.0) as usize;
        let h = dt / m as f64;
        for _ in 0..m {
            y = rk4_step(rhs, y, h);
        }
        steps += m;
        states.push(y);
    }
    (states, steps)
}

/// Classical RK4 with Richardson step halving: the step is halved until
/// the estimated global position error is below `rel_tol` times the orbit
/// scale (the largest excursion of the computed positions from their mean).
pub fn integrate_eom(
    d: &DerivedParams,
    field: &GaugeField,
    coords: CoordinateSet,
    init: PhasePoint,
    t_grid: &[f64],
    opts: &IntegrationOptions,
) -> Result<Vec<TrajectorySample>> {
    if t_grid.len() < 2 {
        return Err(CoreError::DomainError(
            "time grid needs at least two points".to_string(),
        ));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CoreError::DomainError(
            "time grid must be strictly increasing".to_string(),
        ));
    }
    let rhs = Rhs { d, field, coords };
    let y0 = [init.pos[0], init.pos[1], init.mom[0], init.mom[1]];
    let span = t_grid[t_grid.len() - 1] - t_grid[0];

    let mut h = span / (t_grid.len().max(64) as f64 * 4.0);
    let (mut coarse, mut used) = run_pass(&rhs, y0, t_grid, h);
    loop {
        let (fine, fine_steps) = run_pass(&rhs, y0, t_grid, h / 2.0);
        used += fine_steps;

        // orbit scale from the fine pass
        let n = fine.len() as f64;
        let mean = fine.iter().fold([0.0, 0.0], |m, s| [m[0] + s[0] / n, m[1] + s[1] / n]);
        let mut scale = 0.0_f64;
        for s in &fine {
            scale = scale.max((s[0] - mean[0]).abs()).max((s[1] - mean[1]).abs());
        }
        let scale = scale
            .max(init.pos[0].abs())
            .max(init.pos[1].abs())
            .max(f64::MIN_POSITIVE.sqrt());

        // RK4 Richardson estimate for the halved-step solution
        let mut est = 0.0_f64;
        for (a, b) in coarse.iter().zip(fine.iter()) {
            est = est.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
        }
        est /= 15.0;

        if est <= opts.rel_tol * scale {
            let samples = t_grid
                .iter()
                .zip(fine.iter())
                .map(|(&t, s)| {
                    let pos = [s[0], s[1]];
                    let p = [s[2], s[3]];
                    let (q, x) = match coords {
                        CoordinateSet::Noncommutative => (pos, x_from_q(d, pos, p)),
                        CoordinateSet::Commuting => (q_from_x(d, pos, p), pos),
                    };
                    TrajectorySample { t, q, x, p }
                })
                .collect();
            return Ok(samples);
        }
        if used > opts.max_steps {
            return Err(CoreError::StepFailure {
                budget: opts.max_steps,
                target: opts.rel_tol,
            });
        }
        h /= 2.0;
        coarse = fine;
    }
}

/// Which squared-radius the energy relation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusKind {
    /// R from E/R² = mω²/2 (noncommutative coordinates).
    QCoords,
    /// R̃ from E/R̃² = m(μ_S ω)²/2 (commuting coordinates).
    XCoords,
}

/// Energy-radius relations. Pure substitution formulas.
pub fn energy_radius(d: &DerivedParams, which: RadiusKind, energy: f64) -> Result<f64> {
    if energy < 0.0 {
        return Err(CoreError::DomainError(format!(
            "energy must be nonnegative, got {energy}"
        )));
    }
    if d.omega == 0.0 {
        return Err(CoreError::DomainError(
            "energy-radius relation needs B != 0".to_string(),
        ));
    }
    let m = d.params.mass;
    match which {
        RadiusKind::QCoords => Ok((2.0 * energy / (m * d.omega * d.omega)).sqrt()),
        RadiusKind::XCoords => {
            if d.mu_s.abs() < CRITICAL_EPS {
                return Err(CoreError::CriticalRegime {
                    context: "x-coordinate energy-radius relation",
                    parameter: "mu_s",
                    value: d.mu_s,
                });
            }
            let w = d.mu_s * d.omega;
            Ok((2.0 * energy / (m * w * w)).sqrt())
        }
    }
}
