//! Loss catalog: ρ, score ψ = ρ′ and IRLS weight w(r) = ψ(r)/r.
//!
//! Members cover least squares, log-cosh as the smooth-loss representative,
//! check (quantile) and absolute loss, Huber, L_q with exponent in (1, 2),
//! expectile, the three-point Hampel loss and the bounded Tukey bisquare.
//! The Tukey member uses the bounded normalization ρ_c(x) = 1 − (1−(x/c)²)³
//! capped at 1, which is the form the M-scale equation requires; constant
//! rescalings of ρ only reparametrize λ.
//!
//! Weights follow the ψ(r)/r path everywhere. Below `WEIGHT_EPS` the analytic
//! limit is used when ψ′(0) exists; members with unbounded weight at zero
//! (check, absolute, L_q) are capped at ψ(ε)/ε.

use crate::{Error, Result};

/// Residual magnitude below which weights switch to their capped/limit form.
pub const WEIGHT_EPS: f64 = 1e-8;

/// Default Huber tuning constant for 95% Gaussian location efficiency.
pub const HUBER_K_95: f64 = 1.345;
/// Default Tukey tuning constant for 95% Gaussian location efficiency.
pub const TUKEY_C_95: f64 = 4.685;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Loss {
    /// ρ(x) = x², ψ(x) = 2x.
    LeastSquares,
    /// ρ(x) = x²/2 inside [−k, k], k|x| − k²/2 outside.
    Huber { k: f64 },
    /// Bounded bisquare: ρ(x) = 1 − (1−(x/c)²)³ for |x| ≤ c, 1 beyond.
    Tukey { c: f64 },
    /// Three-point redescending loss with corners a ≤ b < c.
    Hampel { a: f64, b: f64, c: f64 },
    /// Quantile loss ρ_α(x) = x(α − 1{x<0}).
    Check { alpha: f64 },
    /// Asymmetric least squares ρ_α(x) = |α − 1{x≤0}| x²/2.
    Expectile { alpha: f64 },
    /// ρ(x) = |x|^e with e in (1, 2).
    Lq { exponent: f64 },
    /// ρ(x) = |x|.
    Absolute,
    /// ρ(x) = log cosh x.
    LogCosh,
}

impl Loss {
    pub fn huber_default() -> Self {
        Loss::Huber { k: HUBER_K_95 }
    }

    pub fn tukey_default() -> Self {
        Loss::Tukey { c: TUKEY_C_95 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        match *self {
            Loss::Huber { k } if !(k > 0.0 && k.is_finite()) => bad("huber k must be positive"),
            Loss::Tukey { c } if !(c > 0.0 && c.is_finite()) => bad("tukey c must be positive"),
            Loss::Hampel { a, b, c }
                if !(a > 0.0 && a <= b && b < c && c.is_finite()) =>
            {
                bad("hampel constants must satisfy 0 < a <= b < c")
            }
            Loss::Check { alpha } | Loss::Expectile { alpha }
                if !(alpha > 0.0 && alpha < 1.0) =>
            {
                bad("alpha must lie in (0, 1)")
            }
            Loss::Lq { exponent } if !(exponent > 1.0 && exponent < 2.0) => {
                bad("lq exponent must lie in (1, 2)")
            }
            _ => Ok(()),
        }
    }

    /// Redescending members need the warm-start chain in the solver.
    pub fn is_convex(&self) -> bool {
        !matches!(self, Loss::Tukey { .. } | Loss::Hampel { .. })
    }

    /// sup |ψ| when it is finite.
    pub fn psi_bound(&self) -> Option<f64> {
        match *self {
            Loss::Huber { k } => Some(k),
            // max of (6/c²) x (1-(x/c)²)² at x = c/√5
            Loss::Tukey { c } => Some(96.0 / (25.0 * 5f64.sqrt() * c)),
            Loss::Hampel { a, .. } => Some(a),
            Loss::Absolute => Some(1.0),
            Loss::Check { alpha } => Some(alpha.max(1.0 - alpha)),
            Loss::LogCosh => Some(1.0),
            Loss::LeastSquares | Loss::Expectile { .. } | Loss::Lq { .. } => None,
        }
    }

    pub fn rho(&self, x: f64) -> f64 {
        match *self {
            Loss::LeastSquares => x * x,
            Loss::Huber { k } => {
                if x.abs() <= k {
                    0.5 * x * x
                } else {
                    k * x.abs() - 0.5 * k * k
                }
            }
            Loss::Tukey { c } => {
                if x.abs() >= c {
                    1.0
                } else {
                    let v = 1.0 - (x / c) * (x / c);
                    1.0 - v * v * v
                }
            }
            Loss::Hampel { a, b, c } => {
                let t = x.abs();
                if t <= a {
                    0.5 * t * t
                } else if t < b {
                    a * (t - 0.5 * a)
                } else if t < c {
                    a * (t - c) * (t - c) / (2.0 * (b - c)) + 0.5 * a * (b + c - a)
                } else {
                    0.5 * a * (b + c - a)
                }
            }
            Loss::Check { alpha } => x * (alpha - if x < 0.0 { 1.0 } else { 0.0 }),
            Loss::Expectile { alpha } => {
                let w = if x > 0.0 { alpha } else { 1.0 - alpha };
                0.5 * w * x * x
            }
            Loss::Lq { exponent } => x.abs().powf(exponent),
            Loss::Absolute => x.abs(),
            // |x| + log((1 + e^{-2|x|})/2), stable for large |x|
            Loss::LogCosh => x.abs() + (-2.0 * x.abs()).exp().ln_1p() - std::f64::consts::LN_2,
        }
    }

    pub fn psi(&self, x: f64) -> f64 {
        match *self {
            Loss::LeastSquares => 2.0 * x,
            Loss::Huber { k } => x.clamp(-k, k),
            Loss::Tukey { .. } | Loss::Hampel { .. } | Loss::Expectile { .. } => {
                x * self.weight_core(x)
            }
            Loss::Check { alpha } => {
                if x > 0.0 {
                    alpha
                } else if x < 0.0 {
                    alpha - 1.0
                } else {
                    alpha - 0.5
                }
            }
            Loss::Lq { exponent } => {
                if x == 0.0 {
                    0.0
                } else {
                    exponent * x.abs().powf(exponent - 2.0) * x
                }
            }
            Loss::Absolute => {
                if x == 0.0 {
                    0.0
                } else {
                    x.signum()
                }
            }
            Loss::LogCosh => x.tanh(),
        }
    }

    /// IRLS weight ψ(r)/r with the near-zero handling described above.
    pub fn weight(&self, r: f64) -> f64 {
        match *self {
            Loss::LeastSquares => 2.0,
            Loss::Tukey { .. } | Loss::Hampel { .. } | Loss::Expectile { .. } => {
                self.weight_core(r)
            }
            Loss::Huber { k } => {
                if r.abs() <= k {
                    1.0
                } else {
                    k / r.abs()
                }
            }
            Loss::LogCosh => {
                if r.abs() > WEIGHT_EPS {
                    r.tanh() / r
                } else {
                    1.0
                }
            }
            Loss::Check { alpha } => {
                if r.abs() > WEIGHT_EPS {
                    self.psi(r) / r
                } else if r < 0.0 {
                    (1.0 - alpha) / WEIGHT_EPS
                } else {
                    alpha / WEIGHT_EPS
                }
            }
            Loss::Absolute => {
                if r.abs() > WEIGHT_EPS {
                    1.0 / r.abs()
                } else {
                    1.0 / WEIGHT_EPS
                }
            }
            Loss::Lq { exponent } => {
                if r.abs() > WEIGHT_EPS {
                    exponent * r.abs().powf(exponent - 2.0)
                } else {
                    exponent * WEIGHT_EPS.powf(exponent - 2.0)
                }
            }
        }
    }

    /// Weight formulas with analytic value at zero, shared by psi and weight
    /// so that weight(r)·r = ψ(r) holds exactly.
    fn weight_core(&self, x: f64) -> f64 {
        match *self {
            Loss::Tukey { c } => {
                if x.abs() >= c {
                    0.0
                } else {
                    let v = 1.0 - (x / c) * (x / c);
                    6.0 / (c * c) * v * v
                }
            }
            Loss::Hampel { a, b, c } => {
                let t = x.abs();
                if t <= a {
                    1.0
                } else if t < b {
                    a / t
                } else if t < c {
                    a * (c - t) / ((c - b) * t)
                } else {
                    0.0
                }
            }
            Loss::Expectile { alpha } => {
                if x > 0.0 {
                    alpha
                } else {
                    1.0 - alpha
                }
            }
            _ => unreachable!("weight_core only backs tukey/hampel/expectile"),
        }
    }
}
