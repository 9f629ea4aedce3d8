//! Error type shared by every module of the crate.

use num_complex::Complex64;
use thiserror::Error;

use crate::transport::FlowState;

/// Why a flow integration stopped before reaching its final time.
#[derive(Debug, Clone, PartialEq)]
pub enum AbortReason {
    /// The trajectory came within `epsilon` of a singular point.
    NearSingularity { distance: f64, epsilon: f64 },
    /// |f(x_k) - f(x_0) - t_k e^{i theta}| exceeded the budget.
    HeightDrift { drift: f64, budget: f64 },
    /// Characteristic polynomial coefficients left the orbit budget.
    OrbitDrift { drift: f64, budget: f64 },
    /// The transport field could not be evaluated.
    FieldUndefined,
}

impl std::fmt::Display for AbortReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AbortReason::NearSingularity { distance, epsilon } => write!(
                f,
                "trajectory left the safe region: distance {distance:.3e} to a singularity is below epsilon {epsilon:.3e}"
            ),
            AbortReason::HeightDrift { drift, budget } => {
                write!(f, "height drift {drift:.3e} exceeds budget {budget:.3e}")
            }
            AbortReason::OrbitDrift { drift, budget } => write!(
                f,
                "characteristic polynomial drift {drift:.3e} exceeds budget {budget:.3e}"
            ),
            AbortReason::FieldUndefined => write!(f, "transport field undefined at the current point"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("sl(n) requires n >= 2, got n = {0}")]
    InvalidDimension(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("element is not traceless (trace = {trace})")]
    NotTraceless { trace: Complex64 },

    #[error("form constant must be positive and finite, got {0}")]
    InvalidFormConstant(f64),

    #[error("H is not regular: entries {i} and {j} coincide within {tol:e}")]
    NotRegular { i: usize, j: usize, tol: f64 },

    #[error("H must be real (an element of h_R); entry {index} has imaginary part {imag}")]
    NotReal { index: usize, imag: f64 },

    #[error("exhaustive Weyl enumeration is capped at n = 8, got n = {0}")]
    OrbitTooLarge(usize),

    #[error("vector is not tangent to the orbit (relative residual {residual:.3e})")]
    NotTangent { residual: f64 },

    #[error("point is singular for f_H: |[x,H]| = {norm:.3e}")]
    SingularPoint { norm: f64 },

    #[error("point is not critical for f_H: |[x,H]| = {norm:.3e}")]
    NotCritical { norm: f64 },

    #[error("matrix exponential argument too large: |A| = {norm:.3e} > 20")]
    ExponentialOverflow { norm: f64 },

    #[error("point is not in the adjoint orbit (characteristic polynomial drift {drift:.3e})")]
    NotInOrbit { drift: f64 },

    #[error("{0} is not a point of the Weyl orbit")]
    NotInWeylOrbit(String),

    #[error("flow aborted after {} accepted steps: {reason}", partial.len().saturating_sub(1))]
    FlowAborted {
        reason: AbortReason,
        partial: Vec<FlowState>,
    },

    #[error("segment from {from} to {to} passes within {distance:.3e} of critical value {critical_value} (margin {margin:.3e})")]
    SegmentNearCritical {
        from: Complex64,
        to: Complex64,
        critical_value: Complex64,
        distance: f64,
        margin: f64,
    },

    #[error("no general-position H found after {0} attempts")]
    GeneralPositionSearchFailed(usize),

    #[error("a Morse function on the circle has an even number of critical points, got {0}")]
    OddMorseCount(usize),

    #[error("fibre parameter b must be nonzero")]
    ZeroFibreParameter,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
