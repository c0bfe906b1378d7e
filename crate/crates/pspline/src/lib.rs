//! Robust P-spline regression: M-type penalized spline estimators with
//! discrete difference penalties.
//!
//! The estimator minimizes
//!
//! ```text
//! (1/n) Σ ρ( (Y_i − Σ_j β_j B_j(x_i)) / σ̂ ) + λ Σ_k (Δ^q β_k)²
//! ```
//!
//! over spline coefficients β, where the B_j form a rich equidistant-knot
//! B-spline basis, Δ^q is the q-th backward difference operator and ρ is a
//! member of a catalog of loss functions (least squares, Huber, Tukey
//! biweight, Hampel, check, expectile, L_q, absolute, log-cosh). Robust
//! members are standardized by a preliminary M-scale σ̂ computed from
//! consecutive response differences. Fits are computed by iteratively
//! reweighted penalized least squares on a banded system; the smoothing
//! parameter λ is selected by a weighted GCV criterion.
//!
//! Modules:
//! * [`basis`] — equidistant-knot B-spline bases, design matrices, spline
//!   derivatives.
//! * [`penalty`] — difference penalty matrices and the difference/derivative
//!   penalty bracket checks.
//! * [`loss`] — the loss catalog with scores ψ and IRLS weights ψ(r)/r.
//! * [`scale`] — the preliminary M-scale from consecutive differences.
//! * [`solver`] — penalized weighted least squares, IRLS, GCV and λ selection.
//! * [`sim`] — Monte-Carlo study engine (test functions, error laws, MSE
//!   summaries).
//! * [`linalg`] — symmetric banded Cholesky and small numerical utilities.

pub mod basis;
pub mod linalg;
pub mod loss;
pub mod penalty;
pub mod scale;
pub mod sim;
pub mod solver;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point {0} outside the basis domain [0, 1]")]
    Domain(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("degenerate scale: too many tied consecutive responses, no positive root of the M-scale equation")]
    DegenerateScale,
    #[error("singular system: penalized normal equations could not be factored or solved accurately")]
    SingularSystem,
    #[error("saturated fit: effective degrees of freedom reached the sample size")]
    SaturatedFit,
}

pub type Result<T> = std::result::Result<T, Error>;

pub use basis::{BSplineBasis, DesignMatrix, KnotVector};
pub use loss::Loss;
pub use penalty::DifferencePenalty;
pub use scale::{m_scale, ScaleEstimate};
pub use sim::{run_study, ErrorDist, Estimator, Scenario, SimulationReport, StudyConfig, TestFunction};
pub use solver::{
    fit, irls_fit, select_lambda, FitConfig, FitProblem, FitResult, GcvGrid, LambdaChoice,
    LambdaTrace, ScaleMode,
};
