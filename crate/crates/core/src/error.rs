//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// ħ, m, e or c was zero or negative.
    #[error("constant `{name}` must be strictly positive, got {value}")]
    NonPositiveConstant { name: &'static str, value: f64 },

    /// An operation that needs 1/μ was called at (or within 1e-12 of) a
    /// critical θ where the effective mass parameter diverges.
    #[error("critical regime: {context} requires |{parameter}| > 1e-12, got {value:.3e}")]
    CriticalRegime {
        context: &'static str,
        parameter: &'static str,
        value: f64,
    },

    /// The integrator could not reach its error target within the step budget.
    #[error("step budget exhausted: needed more than {budget} steps for target {target:.3e}")]
    StepFailure { budget: usize, target: f64 },

    /// Two quadrature refinements disagree beyond the allowed tolerance.
    #[error("quadrature refinements disagree: |{coarse:.12e} - {fine:.12e}| relative {rel:.3e} > {tol:.1e}")]
    QuadratureNonConvergence {
        coarse: f64,
        fine: f64,
        rel: f64,
        tol: f64,
    },

    /// An argument was outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    DomainError(String),

    /// A closed-form expression would take the square root of a negative number.
    #[error("negative argument in {context}: {value:.6e}")]
    NegativeArgument { context: &'static str, value: f64 },

    /// A required input file or column is missing.
    #[error("missing input: {0}")]
    MissingInput(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
