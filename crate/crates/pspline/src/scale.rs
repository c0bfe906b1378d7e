//! Preliminary M-scale estimator from consecutive response differences.
//!
//! σ̂ solves
//!
//! ```text
//! (1/(n−1)) Σ ρ_c( (Y_{i+1} − Y_i) / (√2 σ̂) ) = 3/4
//! ```
//!
//! with ρ_c the bounded Tukey bisquare and c = 0.704; the constants √2 and
//! 3/4 give Fisher consistency at the Gaussian and maximal breakdown value.
//! The left-hand side is nonincreasing in σ̂, so once a bracket is found
//! bisection converges to the unique root. The trend contribution to the
//! differences is not corrected; for smooth trends it is O(1/n) and ignored,
//! matching the estimator's intended use.

use crate::loss::Loss;
use crate::{Error, Result};

/// Default bisquare tuning constant of the scale equation.
pub const SCALE_TUNING: f64 = 0.704;
/// Default right-hand side of the scale equation.
pub const SCALE_TARGET: f64 = 0.75;

const ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct ScaleEstimate {
    /// Estimated scale in response units.
    pub sigma: f64,
    /// Number of consecutive differences entering the equation (n − 1).
    pub n_used: usize,
    /// True when the root was located to |LHS − target| < 1e-10.
    pub converged: bool,
}

/// M-scale with the default tuning (c = 0.704, target 3/4).
pub fn m_scale(y: &[f64]) -> Result<ScaleEstimate> {
    m_scale_with(y, SCALE_TUNING, SCALE_TARGET)
}

/// M-scale with explicit tuning constant and target.
pub fn m_scale_with(y: &[f64], c: f64, target: f64) -> Result<ScaleEstimate> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter("scale tuning c must be positive".into()));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter("scale target must lie in (0, 1)".into()));
    }
    if y.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: y.len(),
        });
    }
    let diffs: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let n_used = diffs.len();
    let zeros = diffs.iter().filter(|d| **d == 0.0).count();
    // LHS(σ → 0⁺) = (nonzero fraction); no root when that is below the target
    if (zeros as f64) / (n_used as f64) > 1.0 - target {
        return Err(Error::DegenerateScale);
    }
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidParameter("responses contain non-finite values".into()));
    }

    let rho = Loss::Tukey { c };
    let sqrt2 = std::f64::consts::SQRT_2;
    let lhs = |sigma: f64| -> f64 {
        diffs.iter().map(|d| rho.rho(d / (sqrt2 * sigma))).sum::<f64>() / n_used as f64
    };

    // MAD-style seed from the nonzero differences
    let mut abs_nonzero: Vec<f64> = diffs.iter().map(|d| d.abs()).filter(|a| *a > 0.0).collect();
    abs_nonzero.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let med = abs_nonzero[abs_nonzero.len() / 2];
    let mut lo = med / 0.6745 / sqrt2;
    if !(lo > 0.0) || !lo.is_finite() {
        lo = 1.0;
    }
    let mut hi = lo;
    // expand geometrically until LHS(lo) >= target >= LHS(hi)
    let mut f_lo = lhs(lo);
    let mut f_hi = f_lo;
    for _ in 0..1100 {
        if f_lo >= target {
            break;
        }
        lo *= 0.5;
        f_lo = lhs(lo);
    }
    for _ in 0..1100 {
        if f_hi <= target {
            break;
        }
        hi *= 2.0;
        f_hi = lhs(hi);
    }
    if f_lo < target || f_hi > target {
        return Err(Error::DegenerateScale);
    }

    let mut sigma = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..200 {
        sigma = 0.5 * (lo + hi);
        let f = lhs(sigma);
        if (f - target).abs() < ROOT_TOL {
            converged = true;
            break;
        }
        if f > target {
            lo = sigma;
        } else {
            hi = sigma;
        }
        if (hi - lo) <= f64::EPSILON * hi {
            converged = (lhs(sigma) - target).abs() < 1e-6;
            break;
        }
    }
    Ok(ScaleEstimate {
        sigma,
        n_used,
        converged,
    })
}
