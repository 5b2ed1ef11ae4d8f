//! Physical constants and every θ-dependent quantity derived from them.
//!
//! Two unit conventions are built in:
//! * natural units ħ = c = m = e = 1 (general-purpose default), and
//! * "CS units" ħ = m̃ω̃/2 = 1, the convention all λ-coherent-state
//!   formulas assume (realised here as natural units with B = 2, θ = 0).

use crate::error::{CoreError, Result};

/// Relative tolerance below which |μ| is treated as exactly critical.
pub const CRITICAL_EPS: f64 = 1e-12;

/// |μ| below this (but above [`CRITICAL_EPS`]) flags the near-critical regime.
pub const NEAR_CRITICAL_EPS: f64 = 1e-6;

/// Input constants. B and θ carry algebraic signs; the rest are positive.
///
/// The particle is an electron of charge −e with e > 0, so the minimal
/// coupling reads p + (e/c)A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    /// e > 0; the particle's charge is −e.
    pub charge: f64,
    pub c: f64,
    /// Magnetic field intensity, sign allowed.
    pub b_field: f64,
    /// Noncommutativity parameter (area units), sign allowed.
    pub theta: f64,
}

impl PhysicalParams {
    /// ħ = c = m = e = 1 with the given field and θ.
    pub fn natural_units(b_field: f64, theta: f64) -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            charge: 1.0,
            c: 1.0,
            b_field,
            theta,
        }
    }

    /// The convention ħ = m̃ω̃/2 = 1 used by all λ-CS numerics
    /// (natural units with B = 2, θ = 0, so m̃ω̃ = mω/|μ_S| = 2 exactly).
    pub fn lambda_cs_units() -> Self {
        Self::natural_units(2.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("charge", self.charge),
            ("c", self.c),
        ] {
            if value <= 0.0 || !value.is_finite() {
                return Err(CoreError::NonPositiveConstant { name, value });
            }
        }
        if !self.b_field.is_finite() || !self.theta.is_finite() {
            return Err(CoreError::DomainError(
                "B and theta must be finite".to_string(),
            ));
        }
        Ok(())
    }
}

/// Which gauge a critical θ belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalGauge {
    Symmetric,
    Landau,
}

/// Classification of the (B, θ) point with respect to the critical values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    Regular,
    /// μ_S = 0 (θ = 4cħ/eB): symmetric-gauge dynamics freeze.
    CriticalSym,
    /// μ_L = 0 (θ = 2cħ/eB): Landau-gauge effective mass diverges.
    CriticalLandau,
    /// |μ| small but nonzero; `distance` is the offending |μ|.
    NearCritical {
        gauge: CriticalGauge,
        distance: f64,
    },
}

/// Everything downstream modules need, derived once from [`PhysicalParams`].
///
/// Quantities that involve 1/μ are `None` when the corresponding μ is
/// critical, so no infinity can leak into a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub params: PhysicalParams,
    /// Cyclotron frequency e|B|/(cm) >= 0.
    pub omega: f64,
    /// μ_S = 1 − eBθ/(4cħ).
    pub mu_s: f64,
    /// μ_L = 1 − eBθ/(2cħ). Identically μ_S evaluated at 2θ.
    pub mu_l: f64,
    /// Elliptic-deformation parameter 1 + Beθ/(ħc) of the Landau-gauge
    /// orbit. Note the equations of motion integrated in `classical` trace
    /// the axis ratio 2 − eps = 1 − Beθ/(ħc); see
    /// `classical::landau_axis_ratio`.
    pub eps: f64,
    /// ω̃ = ω|μ_S|, the symmetric-gauge orbital frequency.
    pub omega_tilde: f64,
    /// m̃ = m/μ_S²; `None` at the symmetric critical point.
    pub m_tilde: Option<f64>,
    /// B̃_S = B/μ_S; `None` at the symmetric critical point.
    pub b_tilde_s: Option<f64>,
    /// B̃_L = B/μ_L; `None` at the Landau critical point.
    pub b_tilde_l: Option<f64>,
    /// θ_c^S = 4cħ/(eB); `None` when B = 0.
    pub theta_crit_s: Option<f64>,
    /// θ_c^L = 2cħ/(eB); `None` when B = 0.
    pub theta_crit_l: Option<f64>,
    /// m̃ω̃ = mω/|μ_S|, the composite scale in every CS formula.
    /// `None` at the symmetric critical point.
    pub mw_tilde: Option<f64>,
    pub regime: Regime,
}

impl DerivedParams {
    /// m̃ω̃, refusing at the symmetric critical point.
    pub fn scale_mw(&self) -> Result<f64> {
        self.mw_tilde.ok_or(CoreError::CriticalRegime {
            context: "m-tilde omega-tilde scale",
            parameter: "mu_s",
            value: self.mu_s,
        })
    }

    /// Signed cyclotron frequency eB/(cm).
    pub fn omega_signed(&self) -> f64 {
        let p = &self.params;
        p.charge * p.b_field / (p.c * p.mass)
    }

    /// Signed symmetric-gauge rotation frequency eBμ_S/(cm); its magnitude
    /// is ω̃.
    pub fn omega_sym_signed(&self) -> f64 {
        self.omega_signed() * self.mu_s
    }
}

/// Populate every derived quantity and classify the regime.
pub fn derive(p: PhysicalParams) -> Result<DerivedParams> {
    p.validate()?;
    let omega = p.charge * p.b_field.abs() / (p.c * p.mass);
    let ebt = p.charge * p.b_field * p.theta / (p.c * p.hbar);
    let mu_s = 1.0 - ebt / 4.0;
    let mu_l = 1.0 - ebt / 2.0;
    let eps = 1.0 + ebt;
    let omega_tilde = omega * mu_s.abs();

    let s_critical = mu_s.abs() < CRITICAL_EPS;
    let l_critical = mu_l.abs() < CRITICAL_EPS;
    let regime = if s_critical {
        Regime::CriticalSym
    } else if l_critical {
        Regime::CriticalLandau
    } else if mu_s.abs() < NEAR_CRITICAL_EPS {
        Regime::NearCritical {
            gauge: CriticalGauge::Symmetric,
            distance: mu_s.abs(),
        }
    } else if mu_l.abs() < NEAR_CRITICAL_EPS {
        Regime::NearCritical {
            gauge: CriticalGauge::Landau,
            distance: mu_l.abs(),
        }
    } else {
        Regime::Regular
    };

    let (m_tilde, b_tilde_s, mw_tilde) = if s_critical {
        (None, None, None)
    } else {
        (
            Some(p.mass / (mu_s * mu_s)),
            Some(p.b_field / mu_s),
            Some(p.mass * omega / mu_s.abs()),
        )
    };
    let b_tilde_l = if l_critical {
        None
    } else {
        Some(p.b_field / mu_l)
    };
    let (theta_crit_s, theta_crit_l) = if p.b_field == 0.0 {
        (None, None)
    } else {
        let base = p.c * p.hbar / (p.charge * p.b_field);
        (Some(4.0 * base), Some(2.0 * base))
    };

    Ok(DerivedParams {
        params: p,
        omega,
        mu_s,
        mu_l,
        eps,
        omega_tilde,
        m_tilde,
        b_tilde_s,
        b_tilde_l,
        theta_crit_s,
        theta_crit_l,
        mw_tilde,
        regime,
    })
}

/// The coherent-state length scale ℓ = √(2ħ/(m̃ω̃)) and its conjugate
/// momentum scale √(m̃ω̃ħ/2); their product is ħ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSet {
    pub length: f64,
    pub momentum: f64,
}

pub fn lengths_and_scales(d: &DerivedParams) -> Result<ScaleSet> {
    let mw = d.scale_mw()?;
    let length = (2.0 * d.params.hbar / mw).sqrt();
    let momentum = (mw * d.params.hbar / 2.0).sqrt();
    Ok(ScaleSet { length, momentum })
}
