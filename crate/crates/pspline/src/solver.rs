//! M-type P-spline fitting: penalized weighted least squares, IRLS and
//! weighted-GCV smoothing selection.
//!
//! Differentiating the objective (1/n) Σ ρ((y_i − B_iᵀβ)/σ̂) + λ βᵀPᵀPβ and
//! writing ψ(u) = w(u)·u turns the estimating equations into the fixed point
//!
//! ```text
//! β = (BᵀWB + 2nσ̂²λ PᵀP)⁻¹ BᵀWy,   W_i = w(r_i/σ̂),
//! ```
//!
//! so the effective penalty of the inner weighted least-squares step is
//! λ_eff = 2nσ̂²λ. This factor convention is normative: the reported λ is
//! the one multiplying Σ(Δ^q β)² in the objective.
//!
//! λ selection follows the two-step search used in practice: a log-spaced
//! GCV grid with warm starts carried from point to point, then a
//! golden-section refinement of log λ around the grid argmin. Redescending
//! losses are always warm-started through the chain least squares → Huber →
//! target loss.

use ndarray::{Array1, Array2};

use crate::basis::{BSplineBasis, DesignMatrix};
use crate::linalg::SymBanded;
use crate::loss::Loss;
use crate::penalty::DifferencePenalty;
use crate::scale::m_scale;
use crate::{Error, Result};

/// How the loss is standardized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleMode {
    /// σ̂ = 1 (scale absorbed in the loss, or not needed).
    None,
    /// Preliminary M-scale from consecutive response differences.
    MScale,
    /// User-supplied positive scale.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaChoice {
    Fixed(f64),
    SelectGcv,
}

/// Search grid for the GCV criterion.
#[derive(Debug, Clone, Copy)]
pub struct GcvGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for GcvGrid {
    fn default() -> Self {
        GcvGrid {
            lo: 1e-8,
            hi: 1e4,
            points: 50,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub loss: Loss,
    /// Spline order p.
    pub order: usize,
    /// Interior knot count K.
    pub interior_knots: usize,
    /// Difference penalty order q.
    pub penalty_order: usize,
    pub lambda: LambdaChoice,
    pub scale_mode: ScaleMode,
    pub max_iter: usize,
    /// Relative coefficient-change tolerance.
    pub tol: f64,
    pub grid: GcvGrid,
}

impl FitConfig {
    /// Defaults of the reference setup: cubic splines (p = 4), K = 40,
    /// q = 2, GCV-selected λ, M-scale for every loss except least squares.
    pub fn new(loss: Loss) -> Self {
        let scale_mode = if matches!(loss, Loss::LeastSquares) {
            ScaleMode::None
        } else {
            ScaleMode::MScale
        };
        FitConfig {
            loss,
            order: 4,
            interior_knots: 40,
            penalty_order: 2,
            lambda: LambdaChoice::SelectGcv,
            scale_mode,
            max_iter: 100,
            tol: 1e-8,
            grid: GcvGrid::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.loss.validate()?;
        if self.penalty_order >= self.order {
            return Err(Error::InvalidParameter(format!(
                "penalty order q = {} must be < spline order p = {}",
                self.penalty_order, self.order
            )));
        }
        if self.interior_knots < self.penalty_order {
            return Err(Error::InvalidParameter(
                "interior knot count K must be >= penalty order q".into(),
            ));
        }
        if let LambdaChoice::Fixed(l) = self.lambda {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::InvalidParameter("lambda must be >= 0".into()));
            }
        }
        if let ScaleMode::Fixed(s) = self.scale_mode {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter("fixed scale must be positive".into()));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        if !(self.grid.lo > 0.0 && self.grid.hi > self.grid.lo && self.grid.points >= 2) {
            return Err(Error::InvalidParameter("invalid GCV grid".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    /// Spline coefficients, length K + p.
    pub beta: Array1<f64>,
    /// Penalty parameter of the objective (fixed or GCV-selected).
    pub lambda: f64,
    /// Scale used to standardize residuals (1 when no scale).
    pub sigma: f64,
    /// y − Bβ̂.
    pub residuals: Array1<f64>,
    /// IRLS weights at β̂.
    pub weights: Array1<f64>,
    /// Effective degrees of freedom tr H(λ).
    pub edf: f64,
    /// Weighted GCV value at β̂.
    pub gcv: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Sup-norm of the standardized estimating equations at β̂.
    pub estimating_eq_norm: f64,
}

/// One penalized weighted least-squares solve:
/// argmin Σ W_i (y_i − B_iᵀβ)² + λ_eff ‖Pβ‖².
pub fn pwls_solve(
    design: &DesignMatrix,
    w: &[f64],
    y: &[f64],
    lambda_eff: f64,
    penalty: &DifferencePenalty,
) -> Result<Array1<f64>> {
    if penalty.dim() != design.ncols() {
        return Err(Error::DimensionMismatch {
            expected: design.ncols(),
            got: penalty.dim(),
        });
    }
    if w.len() != design.nrows() || y.len() != design.nrows() {
        return Err(Error::DimensionMismatch {
            expected: design.nrows(),
            got: w.len().min(y.len()),
        });
    }
    let a = assemble_normal_matrix(design, w, lambda_eff, penalty);
    let b = design.xtwy(w, y);
    let chol = a.cholesky()?;
    let mut x = chol.solve(&b);
    // Iterative refinement against the unmixed operator (the stored sum
    // BᵀWB + λPᵀP loses the data term to rounding once λ_eff is extreme),
    // alternated with an exact correction along the penalty null space: P
    // annihilates polynomial index sequences exactly, so the penalty cannot
    // pin those q directions and they are fixed by the q×q projected
    // least-squares problem instead.
    let null_basis = penalty_null_basis(design.ncols(), penalty.order());
    for _ in 0..6 {
        let r = normal_residual(design, w, lambda_eff, penalty, &x, &b);
        let dx = chol.solve(&r);
        let mut progress = inf_norm(&dx);
        x += &dx;
        progress += null_space_correction(design, w, y, &null_basis, &mut x);
        if progress <= 1e-15 * (1.0 + inf_norm(&x)) {
            break;
        }
    }
    let resid = normal_residual(design, w, lambda_eff, penalty, &x, &b);
    let scale = inf_norm(&b) + matrix_scale(&a) * inf_norm(&x);
    if inf_norm(&resid) > 1e-8 * (scale + f64::MIN_POSITIVE) {
        return Err(Error::SingularSystem);
    }
    Ok(x)
}

/// Orthonormalized polynomial index sequences spanning the null space of Δ^q.
fn penalty_null_basis(dim: usize, q: usize) -> Vec<Array1<f64>> {
    let mut basis: Vec<Array1<f64>> = Vec::with_capacity(q);
    let center = (dim as f64 - 1.0) / 2.0;
    for d in 0..q {
        let mut v = Array1::from_iter((0..dim).map(|j| (j as f64 - center).powi(d as i32)));
        for u in &basis {
            let c = v.dot(u);
            v = v - u.mapv(|t| t * c);
        }
        let n = v.dot(&v).sqrt();
        if n > 0.0 {
            basis.push(v.mapv(|t| t / n));
        }
    }
    basis
}

/// Minimize the weighted data misfit over x + span(null basis); the penalty
/// is constant along these directions. Returns the sup-norm of the applied
/// shift.
fn null_space_correction(
    design: &DesignMatrix,
    w: &[f64],
    y: &[f64],
    null_basis: &[Array1<f64>],
    x: &mut Array1<f64>,
) -> f64 {
    let q = null_basis.len();
    if q == 0 {
        return 0.0;
    }
    let cols: Vec<Array1<f64>> = null_basis.iter().map(|v| design.fitted(v)).collect();
    let fitted = design.fitted(x);
    let mut gram = Array2::zeros((q, q));
    let mut rhs = Array1::zeros(q);
    for a in 0..q {
        for bq in a..q {
            let mut s = 0.0;
            for i in 0..y.len() {
                s += w[i] * cols[a][i] * cols[bq][i];
            }
            gram[[a, bq]] = s;
            gram[[bq, a]] = s;
        }
        let mut s = 0.0;
        for i in 0..y.len() {
            s += w[i] * cols[a][i] * (y[i] - fitted[i]);
        }
        rhs[a] = s;
    }
    match crate::linalg::solve_dense(&gram, &rhs) {
        Ok(c) => {
            let mut shift = Array1::zeros(x.len());
            for (coef, v) in c.iter().zip(null_basis) {
                shift = shift + v.mapv(|t| t * coef);
            }
            *x += &shift;
            inf_norm(&shift)
        }
        // all-zero weights (fully redescended) leave the directions unpinned
        Err(_) => 0.0,
    }
}

/// b − BᵀW(Bx) − λ_eff PᵀPx with the two operator parts applied separately.
fn normal_residual(
    design: &DesignMatrix,
    w: &[f64],
    lambda_eff: f64,
    penalty: &DifferencePenalty,
    x: &Array1<f64>,
    b: &Array1<f64>,
) -> Array1<f64> {
    let bx = design.fitted(x);
    let wbx: Vec<f64> = w.iter().zip(bx.iter()).map(|(&wi, &v)| wi * v).collect();
    let data_part = design.xt_dot(&wbx);
    let penalty_part = penalty.ptp().matvec(x) * lambda_eff;
    b - &data_part - &penalty_part
}

fn assemble_normal_matrix(
    design: &DesignMatrix,
    w: &[f64],
    lambda_eff: f64,
    penalty: &DifferencePenalty,
) -> SymBanded {
    let bw = (design.ncols().min(4).max(1) - 1)
        .max(penalty.order())
        .max(design_half_bw(design));
    let mut a = SymBanded::zeros(design.ncols(), bw);
    design.accumulate_xtwx(w, &mut a);
    a.add_scaled(penalty.ptp(), lambda_eff);
    a
}

fn design_half_bw(design: &DesignMatrix) -> usize {
    // rows carry `width` contiguous values
    if design.nrows() == 0 {
        0
    } else {
        design.row(0).1.len().saturating_sub(1)
    }
}

fn inf_norm(v: &Array1<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn matrix_scale(a: &SymBanded) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.dim() {
        m = m.max(a.get(j, j).abs());
    }
    m
}

/// Effective degrees of freedom tr H(λ) and the weighted GCV value, both
/// from the banded factorization (H is never formed densely).
pub fn edf_and_gcv(
    design: &DesignMatrix,
    w: &[f64],
    residuals: &Array1<f64>,
    lambda_eff: f64,
    penalty: &DifferencePenalty,
) -> Result<(f64, f64)> {
    let n = design.nrows();
    let a = assemble_normal_matrix(design, w, lambda_eff, penalty);
    let chol = a.cholesky()?;
    let mut rhs = Array1::zeros(design.ncols());
    let mut tr = 0.0;
    for i in 0..n {
        let (off, vals) = design.row(i);
        rhs.fill(0.0);
        for (k, v) in vals.iter().enumerate() {
            rhs[off + k] = *v;
        }
        chol.solve_in_place(&mut rhs);
        let mut dot = 0.0;
        for (k, v) in vals.iter().enumerate() {
            dot += v * rhs[off + k];
        }
        tr += w[i] * dot;
    }
    let nf = n as f64;
    if tr / nf >= 1.0 - 1e-8 {
        return Err(Error::SaturatedFit);
    }
    let num: f64 = w
        .iter()
        .zip(residuals.iter())
        .map(|(&wi, &ri)| wi * ri * ri)
        .sum::<f64>()
        / nf;
    let den = (1.0 - tr / nf) * (1.0 - tr / nf);
    Ok((tr, num / den))
}

/// The weighted GCV criterion n⁻¹ Σ W_i r_i² / (1 − n⁻¹ tr H)².
pub fn gcv_score(
    design: &DesignMatrix,
    w: &[f64],
    residuals: &Array1<f64>,
    lambda_eff: f64,
    penalty: &DifferencePenalty,
) -> Result<f64> {
    edf_and_gcv(design, w, residuals, lambda_eff, penalty).map(|(_, g)| g)
}

/// Per-grid-point coefficient trajectory of a GCV search, used to warm-start
/// redescending refits along the same grid.
#[derive(Debug, Clone)]
pub struct LambdaTrace {
    pub lambdas: Vec<f64>,
    pub betas: Vec<Option<Array1<f64>>>,
}

/// A prepared fitting problem: basis, design matrix, penalty and scale are
/// built once and reused across λ values.
#[derive(Debug, Clone)]
pub struct FitProblem {
    basis: BSplineBasis,
    design: DesignMatrix,
    penalty: DifferencePenalty,
    y: Vec<f64>,
    sigma: f64,
    config: FitConfig,
}

impl FitProblem {
    pub fn new(xs: &[f64], y: &[f64], config: FitConfig) -> Result<Self> {
        config.validate()?;
        if xs.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                got: y.len(),
            });
        }
        let needed = config.penalty_order.max(1);
        if y.len() < needed {
            return Err(Error::InsufficientData {
                needed,
                got: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("responses contain non-finite values".into()));
        }
        let sigma = match config.scale_mode {
            ScaleMode::None => 1.0,
            ScaleMode::Fixed(s) => s,
            ScaleMode::MScale => m_scale(y)?.sigma,
        };
        let basis = BSplineBasis::new(config.order, config.interior_knots)?;
        let design = basis.design_matrix(xs)?;
        let penalty = DifferencePenalty::new(config.penalty_order, basis.dim())?;
        Ok(FitProblem {
            basis,
            design,
            penalty,
            y: y.to_vec(),
            sigma,
            config,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn basis(&self) -> &BSplineBasis {
        &self.basis
    }

    pub fn design(&self) -> &DesignMatrix {
        &self.design
    }

    pub fn config(&self) -> &FitConfig {
        &self.config
    }

    fn lambda_eff(&self, lambda: f64) -> f64 {
        2.0 * self.y.len() as f64 * self.sigma * self.sigma * lambda
    }

    fn weights_at(&self, loss: Loss, beta: &Array1<f64>) -> (Array1<f64>, Vec<f64>) {
        let fitted = self.design.fitted(beta);
        let mut w = vec![0.0; self.y.len()];
        let mut residuals = Array1::zeros(self.y.len());
        for i in 0..self.y.len() {
            let r = self.y[i] - fitted[i];
            residuals[i] = r;
            w[i] = loss.weight(r / self.sigma);
        }
        (residuals, w)
    }

    /// IRLS at fixed λ. `init` overrides the warm-start chain; without it,
    /// convex losses start from the least-squares solve at the same λ and
    /// redescending losses from a Huber fit seeded by least squares.
    pub fn irls(&self, lambda: f64, init: Option<&Array1<f64>>) -> Result<FitResult> {
        self.irls_traced(lambda, init, None)
    }

    fn irls_traced(
        &self,
        lambda: f64,
        init: Option<&Array1<f64>>,
        mut objective_trace: Option<&mut Vec<f64>>,
    ) -> Result<FitResult> {
        let loss = self.config.loss;
        let lambda_eff = self.lambda_eff(lambda);
        let ls_weights = vec![2.0; self.y.len()];
        let mut beta = match init {
            Some(b) => b.clone(),
            None => {
                let ls = pwls_solve(&self.design, &ls_weights, &self.y, lambda_eff, &self.penalty)?;
                if loss.is_convex() {
                    ls
                } else {
                    // least squares seeds Huber, Huber seeds the redescender
                    self.irls_core(Loss::huber_default(), lambda, lambda_eff, ls, &mut None)?
                        .0
                }
            }
        };
        if matches!(loss, Loss::LeastSquares) {
            // constant weights: the first solve is the closed-form fit
            beta = pwls_solve(&self.design, &ls_weights, &self.y, lambda_eff, &self.penalty)?;
            return self.finalize(loss, lambda, lambda_eff, beta, 1, true);
        }
        let (beta, iterations, converged) =
            self.irls_core(loss, lambda, lambda_eff, beta, &mut objective_trace)?;
        self.finalize(loss, lambda, lambda_eff, beta, iterations, converged)
    }

    fn irls_core(
        &self,
        loss: Loss,
        lambda: f64,
        lambda_eff: f64,
        mut beta: Array1<f64>,
        objective_trace: &mut Option<&mut Vec<f64>>,
    ) -> Result<(Array1<f64>, usize, bool)> {
        let mut iterations = 0;
        let mut converged = false;
        if let Some(tr) = objective_trace.as_deref_mut() {
            tr.push(self.objective(loss, lambda, &beta));
        }
        for it in 1..=self.config.max_iter {
            let (_, w) = self.weights_at(loss, &beta);
            let beta_new = pwls_solve(&self.design, &w, &self.y, lambda_eff, &self.penalty)?;
            let denom = 1.0 + inf_norm(&beta);
            let delta = inf_norm(&(&beta_new - &beta)) / denom;
            beta = beta_new;
            iterations = it;
            if let Some(tr) = objective_trace.as_deref_mut() {
                tr.push(self.objective(loss, lambda, &beta));
            }
            if delta < self.config.tol {
                converged = true;
                break;
            }
        }
        Ok((beta, iterations, converged))
    }

    /// Objective value (1/n) Σ ρ(r_i/σ̂) + λ Σ(Δ^q β)².
    pub fn objective(&self, loss: Loss, lambda: f64, beta: &Array1<f64>) -> f64 {
        let fitted = self.design.fitted(beta);
        let data: f64 = self
            .y
            .iter()
            .zip(fitted.iter())
            .map(|(&yi, &fi)| loss.rho((yi - fi) / self.sigma))
            .sum::<f64>()
            / self.y.len() as f64;
        data + lambda * self.penalty.value(beta).expect("beta has basis dimension")
    }

    fn finalize(
        &self,
        loss: Loss,
        lambda: f64,
        lambda_eff: f64,
        beta: Array1<f64>,
        iterations: usize,
        converged: bool,
    ) -> Result<FitResult> {
        let (residuals, w) = self.weights_at(loss, &beta);
        let n = self.y.len() as f64;
        // estimating equations −(1/(nσ)) Σ ψ(r_i/σ) B(x_i) + 2λ PᵀP β
        let psi: Vec<f64> = residuals
            .iter()
            .map(|&r| loss.psi(r / self.sigma))
            .collect();
        let mut g = self.design.xt_dot(&psi) * (-1.0 / (n * self.sigma));
        g += &(self.penalty.ptp_apply(&beta)? * (2.0 * lambda));
        let estimating_eq_norm = inf_norm(&g);
        let (edf, gcv) = edf_and_gcv(&self.design, &w, &residuals, lambda_eff, &self.penalty)?;
        Ok(FitResult {
            beta,
            lambda,
            sigma: self.sigma,
            residuals,
            weights: Array1::from(w),
            edf,
            gcv,
            iterations,
            converged,
        estimating_eq_norm,
        })
    }

    /// GCV grid values λ_0 < ... < λ_{m−1}, log-spaced.
    pub fn grid_lambdas(&self) -> Vec<f64> {
        let g = self.config.grid;
        let m = g.points;
        (0..m)
            .map(|i| g.lo * (g.hi / g.lo).powf(i as f64 / (m as f64 - 1.0)))
            .collect()
    }

    /// Two-step λ selection: GCV on the grid with warm starts, then
    /// golden-section refinement of log λ around the grid argmin. Ties are
    /// broken toward larger λ. `warm` supplies per-grid-point starting values
    /// (the Huber trajectory, for redescending refits).
    pub fn select_traced(&self, warm: Option<&LambdaTrace>) -> Result<(FitResult, LambdaTrace)> {
        let lambdas = self.grid_lambdas();
        if let Some(t) = warm {
            if t.lambdas.len() != lambdas.len() {
                return Err(Error::DimensionMismatch {
                    expected: lambdas.len(),
                    got: t.lambdas.len(),
                });
            }
        }
        let mut betas: Vec<Option<Array1<f64>>> = vec![None; lambdas.len()];
        let mut best: Option<(usize, FitResult)> = None;
        let mut prev_beta: Option<Array1<f64>> = None;
        let mut last_err = None;
        for (i, &lambda) in lambdas.iter().enumerate() {
            let init = warm
                .and_then(|t| t.betas[i].as_ref())
                .or(prev_beta.as_ref());
            match self.irls(lambda, init) {
                Ok(res) => {
                    prev_beta = Some(res.beta.clone());
                    betas[i] = Some(res.beta.clone());
                    let better = match &best {
                        None => true,
                        Some((_, b)) => res.gcv <= b.gcv, // ties toward larger λ
                    };
                    if better {
                        best = Some((i, res));
                    }
                }
                Err(e) => {
                    last_err = Some(e);
                }
            }
        }
        let (argmin, mut best_fit) = match best {
            Some(b) => b,
            None => return Err(last_err.unwrap_or(Error::SingularSystem)),
        };

        // golden-section refinement on log λ in the bracket around the argmin
        let lo = lambdas[argmin.saturating_sub(1)].ln();
        let hi = lambdas[(argmin + 1).min(lambdas.len() - 1)].ln();
        if hi > lo {
            let inv_phi = 0.618_033_988_749_894_9_f64;
            let mut a = lo;
            let mut b = hi;
            let mut c = b - inv_phi * (b - a);
            let mut d = a + inv_phi * (b - a);
            let eval = |loglam: f64, seed: &Array1<f64>| -> Option<FitResult> {
                self.irls(loglam.exp(), Some(seed)).ok()
            };
            let seed = best_fit.beta.clone();
            let mut fc = eval(c, &seed);
            let mut fd = eval(d, &seed);
            for _ in 0..40 {
                let gc = fc.as_ref().map_or(f64::INFINITY, |r| r.gcv);
                let gd = fd.as_ref().map_or(f64::INFINITY, |r| r.gcv);
                if gc < gd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - inv_phi * (b - a);
                    fc = eval(c, &seed);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + inv_phi * (b - a);
                    fd = eval(d, &seed);
                }
                if (b - a).abs() < 1e-6 {
                    break;
                }
                for cand in [&fc, &fd] {
                    if let Some(r) = cand {
                        if r.gcv < best_fit.gcv
                            || (r.gcv == best_fit.gcv && r.lambda > best_fit.lambda)
                        {
                            best_fit = r.clone();
                        }
                    }
                }
            }
            for cand in [fc, fd] {
                if let Some(r) = cand {
                    if r.gcv < best_fit.gcv
                        || (r.gcv == best_fit.gcv && r.lambda > best_fit.lambda)
                    {
                        best_fit = r;
                    }
                }
            }
        }
        Ok((
            best_fit,
            LambdaTrace {
                lambdas,
                betas,
            },
        ))
    }

    /// λ selection. Convex losses search the whole grid with their own GCV.
    /// Redescending losses inherit the λ selected on a Huber companion run
    /// (same data, scale and penalty) and refit at it, seeded by the Huber
    /// coefficients: their own weights vanish on structural lack-of-fit, so
    /// an unrestricted weighted-GCV search develops a spurious
    /// heavy-smoothing minimum.
    pub fn select(&self) -> Result<FitResult> {
        if self.config.loss.is_convex() {
            return self.select_traced(None).map(|(r, _)| r);
        }
        let mut huber_cfg = self.config.clone();
        huber_cfg.loss = Loss::huber_default();
        huber_cfg.scale_mode = ScaleMode::Fixed(self.sigma);
        let huber = FitProblem {
            basis: self.basis.clone(),
            design: self.design.clone(),
            penalty: self.penalty.clone(),
            y: self.y.clone(),
            sigma: self.sigma,
            config: huber_cfg,
        };
        let huber_fit = huber.select()?;
        let lambda = transfer_lambda(Loss::huber_default(), self.config.loss, huber_fit.lambda);
        self.irls(lambda, Some(&huber_fit.beta))
    }
}

/// Map a λ selected under one loss to the equivalent λ under another:
/// rescaling ρ by a constant rescales the data term of the objective, so the
/// balance point moves by the ratio of the curvatures ψ′(0) = w(0).
pub fn transfer_lambda(from: Loss, to: Loss, lambda: f64) -> f64 {
    lambda * to.weight(0.0) / from.weight(0.0)
}

/// Fit with the λ policy recorded in the configuration.
pub fn fit(xs: &[f64], y: &[f64], config: &FitConfig) -> Result<FitResult> {
    let problem = FitProblem::new(xs, y, config.clone())?;
    match config.lambda {
        LambdaChoice::Fixed(l) => problem.irls(l, None),
        LambdaChoice::SelectGcv => problem.select(),
    }
}

/// IRLS fit at a fixed λ (warm-start chain applied internally).
pub fn irls_fit(xs: &[f64], y: &[f64], config: &FitConfig, lambda: f64) -> Result<FitResult> {
    FitProblem::new(xs, y, config.clone())?.irls(lambda, None)
}

/// Weighted-GCV λ selection (grid plus golden-section refinement).
pub fn select_lambda(xs: &[f64], y: &[f64], config: &FitConfig) -> Result<FitResult> {
    FitProblem::new(xs, y, config.clone())?.select()
}
