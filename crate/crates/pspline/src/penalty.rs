//! Difference penalty matrices Δ^q and the numerical bracket relating the
//! difference penalty to the integrated squared derivative.
//!
//! The penalty on coefficients β is λ‖Pβ‖² where P is the (dim−q)×dim matrix
//! of the q-th backward difference operator. The roughness-energy routines
//! implement both sides of the squared differentiation formula
//!
//! ```text
//! ∫₀¹ |f^(q)(x)|² dx = K^{2q} (Δ^q β)ᵀ G (Δ^q β),   G_ij = ∫ B_{i,p−q} B_{j,p−q}
//! ```
//!
//! (Gram quadratic form on one side, direct quadrature of the squared
//! difference-coefficient spline on the other) and the ratio brackets
//! c₁ ≤ K^{1−2q} ∫|f^(q)|² / Σ(Δ^q β)² ≤ c₂ whose K-stability ties the
//! difference penalty to the derivative penalty.

use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::basis::BSplineBasis;
use crate::linalg::{gauss_legendre, SymBanded};
use crate::{Error, Result};

/// The q-th order difference operator on coefficient vectors of length `dim`,
/// with PᵀP cached in banded form for the solver.
#[derive(Debug, Clone)]
pub struct DifferencePenalty {
    order: usize,
    dim: usize,
    stencil: Vec<f64>,
    ptp: SymBanded,
}

impl DifferencePenalty {
    pub fn new(order: usize, dim: usize) -> Result<Self> {
        if order < 1 || order >= dim {
            return Err(Error::InvalidParameter(format!(
                "penalty order q = {order} must satisfy 1 <= q < dim = {dim}"
            )));
        }
        // stencil[j] = (-1)^(q-j) C(q, j), so (Pβ)_r = Σ_j stencil[j] β_{r+j} = Δ^q β_{r+q}
        let mut stencil = vec![0.0; order + 1];
        let mut c = 1.0f64;
        for (j, s) in stencil.iter_mut().enumerate() {
            *s = if (order - j) % 2 == 0 { c } else { -c };
            c = c * (order as f64 - j as f64) / (j as f64 + 1.0);
        }
        let mut ptp = SymBanded::zeros(dim, order);
        for r in 0..dim - order {
            for a in 0..=order {
                for b in a..=order {
                    ptp.add(r + b, r + a, stencil[a] * stencil[b]);
                }
            }
        }
        Ok(DifferencePenalty {
            order,
            dim,
            stencil,
            ptp,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.dim - self.order
    }

    /// PᵀP in symmetric banded storage (half-bandwidth q).
    pub fn ptp(&self) -> &SymBanded {
        &self.ptp
    }

    fn check_len(&self, beta: &Array1<f64>) -> Result<()> {
        if beta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: beta.len(),
            });
        }
        Ok(())
    }

    /// Pβ, the vector of q-th differences.
    pub fn apply(&self, beta: &Array1<f64>) -> Result<Array1<f64>> {
        self.check_len(beta)?;
        let mut out = Array1::zeros(self.rows());
        for r in 0..self.rows() {
            let mut s = 0.0;
            for (j, c) in self.stencil.iter().enumerate() {
                s += c * beta[r + j];
            }
            out[r] = s;
        }
        Ok(out)
    }

    /// ‖Pβ‖² = Σ (Δ^q β)².
    pub fn value(&self, beta: &Array1<f64>) -> Result<f64> {
        Ok(self.apply(beta)?.iter().map(|v| v * v).sum())
    }

    /// PᵀPβ.
    pub fn ptp_apply(&self, beta: &Array1<f64>) -> Result<Array1<f64>> {
        self.check_len(beta)?;
        Ok(self.ptp.matvec(beta))
    }

    /// The explicit (dim−q) × dim matrix.
    pub fn to_matrix(&self) -> Array2<f64> {
        let mut p = Array2::zeros((self.rows(), self.dim));
        for r in 0..self.rows() {
            for (j, c) in self.stencil.iter().enumerate() {
                p[[r, r + j]] = *c;
            }
        }
        p
    }
}

fn formula_coeffs(
    basis: &BSplineBasis,
    beta: &Array1<f64>,
    q: usize,
) -> Result<(BSplineBasis, Array1<f64>)> {
    let p = basis.order();
    if q >= p {
        return Err(Error::InvalidParameter(format!(
            "penalty order q = {q} must be < spline order p = {p}"
        )));
    }
    let penalty = DifferencePenalty::new(q, basis.dim())?;
    let k = basis.interior_count() as f64;
    let diffs = penalty.apply(beta)? * k.powi(q as i32);
    let reduced = BSplineBasis::new(p - q, basis.interior_count())?;
    Ok((reduced, diffs))
}

/// K^{2q} (Δ^q β)ᵀ G (Δ^q β) with G the exact Gram matrix of the
/// order-(p−q) basis: the quadratic-form route of the squared
/// differentiation formula.
pub fn roughness_energy_gram(basis: &BSplineBasis, beta: &Array1<f64>, q: usize) -> Result<f64> {
    let (reduced, coeffs) = formula_coeffs(basis, beta, q)?;
    let g = reduced.gram_matrix();
    let gc = g.dot(&coeffs);
    Ok(coeffs.dot(&gc))
}

/// ∫₀¹ (Σ_j K^q Δ^q β_j B_{j,p−q}(x))² dx by direct Gauss–Legendre
/// quadrature: the integral route of the squared differentiation formula.
pub fn roughness_energy_quadrature(
    basis: &BSplineBasis,
    beta: &Array1<f64>,
    q: usize,
) -> Result<f64> {
    let (reduced, coeffs) = formula_coeffs(basis, beta, q)?;
    let m = reduced.order();
    let kk = reduced.interior_count();
    let h = reduced.knot_vector().spacing();
    let (nodes, weights) = gauss_legendre(m + 1);
    let mut total = 0.0;
    for cell in 0..=kk {
        let lo = cell as f64 * h;
        let half = 0.5 * h;
        let mid = lo + half;
        for (&u, &w) in nodes.iter().zip(&weights) {
            let x = (mid + half * u).clamp(0.0, 1.0);
            let v = reduced.value(&coeffs, x)?;
            total += w * half * v * v;
        }
    }
    Ok(total)
}

/// Empirical Proposition-1 bracket: for `trials` random standard-normal
/// coefficient vectors, the ratio
/// r = K^{1−2q} ∫|f^(q)|² / Σ(Δ^q β)² (integral via the Gram form) is
/// accumulated and its (min, max) returned. Vectors dominated by the penalty
/// null space are recentred to avoid 0/0.
pub fn verify_proposition1(
    p: usize,
    q: usize,
    interior: usize,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if q >= p {
        return Err(Error::InvalidParameter(format!(
            "penalty order q = {q} must be < spline order p = {p}"
        )));
    }
    if trials < 1 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let basis = BSplineBasis::new(p, interior)?;
    let dim = basis.dim();
    let penalty = DifferencePenalty::new(q, dim)?;
    let g = BSplineBasis::new(p - q, interior)?.gram_matrix();
    let kf = interior as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let mut used = 0usize;
    while used < trials {
        let mut beta =
            Array1::from_iter((0..dim).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)));
        strip_null_component(&mut beta, q);
        let diffs = penalty.apply(&beta)?;
        let dnorm2: f64 = diffs.iter().map(|v| v * v).sum();
        if dnorm2 == 0.0 {
            continue; // fully in the null space, ratio undefined
        }
        // r = K^{1-2q} * K^{2q} diffsᵀ G diffs / dnorm2 = K * diffsᵀ G diffs / dnorm2
        let quad = diffs.dot(&g.dot(&diffs));
        let r = kf * quad / dnorm2;
        lo = lo.min(r);
        hi = hi.max(r);
        used += 1;
    }
    Ok((lo, hi))
}

/// Remove the projection onto the penalty null space (index polynomials of
/// degree < q) when it dominates the vector.
fn strip_null_component(beta: &mut Array1<f64>, q: usize) {
    let dim = beta.len();
    // Gram-Schmidt basis of {1, j, ..., j^{q-1}} sequences
    let mut basis: Vec<Array1<f64>> = Vec::new();
    for d in 0..q {
        let mut v = Array1::from_iter((0..dim).map(|j| (j as f64).powi(d as i32)));
        for u in &basis {
            let c = v.dot(u);
            v = v - u.mapv(|x| x * c);
        }
        let n = v.dot(&v).sqrt();
        if n > 0.0 {
            basis.push(v.mapv(|x| x / n));
        }
    }
    let mut proj = Array1::<f64>::zeros(dim);
    for u in &basis {
        let c = beta.dot(u);
        proj = proj + u.mapv(|x| x * c);
    }
    let pn = proj.dot(&proj).sqrt();
    let bn = beta.dot(beta).sqrt();
    if pn > 0.99 * bn {
        *beta -= &proj;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn stencils_match_spec_examples() {
        let p2 = DifferencePenalty::new(2, 5).unwrap();
        let m = p2.to_matrix();
        assert_eq!(m.nrows(), 3);
        let row0: Vec<f64> = m.row(0).to_vec();
        assert_eq!(row0, vec![1.0, -2.0, 1.0, 0.0, 0.0]);
        let row1: Vec<f64> = m.row(1).to_vec();
        assert_eq!(row1, vec![0.0, 1.0, -2.0, 1.0, 0.0]);

        let p1 = DifferencePenalty::new(1, 3).unwrap();
        let m = p1.to_matrix();
        assert_eq!(m.row(0).to_vec(), vec![-1.0, 1.0, 0.0]);
        assert_eq!(m.row(1).to_vec(), vec![0.0, -1.0, 1.0]);

        let p3 = DifferencePenalty::new(3, 6).unwrap();
        let m = p3.to_matrix();
        assert_eq!(m.row(0).to_vec(), vec![-1.0, 3.0, -3.0, 1.0, 0.0, 0.0]);

        assert!(DifferencePenalty::new(5, 5).is_err());
        assert!(DifferencePenalty::new(0, 5).is_err());
    }

    #[test]
    fn third_difference_composes_first_and_second() {
        // Δ³ as matrix product Δ¹ (on length dim-2) times Δ² (on length dim)
        let dim = 6;
        let p3 = DifferencePenalty::new(3, dim).unwrap().to_matrix();
        let p2 = DifferencePenalty::new(2, dim).unwrap().to_matrix();
        let p1 = DifferencePenalty::new(1, dim - 2).unwrap().to_matrix();
        let composed = p1.dot(&p2);
        for i in 0..composed.nrows() {
            for j in 0..composed.ncols() {
                assert_relative_eq!(composed[[i, j]], p3[[i, j]], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn annihilates_index_polynomials() {
        for q in 1..=3usize {
            let dim = 9;
            let p = DifferencePenalty::new(q, dim).unwrap();
            for d in 0..q {
                let beta = Array1::from_iter((0..dim).map(|j| (j as f64).powi(d as i32)));
                let v = p.value(&beta).unwrap();
                assert!(v < 1e-18, "q={q} degree={d}: {v}");
            }
            // degree q is not annihilated
            let beta = Array1::from_iter((0..dim).map(|j| (j as f64).powi(q as i32)));
            assert!(p.value(&beta).unwrap() > 1.0);
        }
    }

    #[test]
    fn penalty_value_examples_and_differencing_oracle() {
        let p = DifferencePenalty::new(2, 5).unwrap();
        let constant = Array1::from_elem(5, 4.2);
        assert_eq!(p.value(&constant).unwrap(), 0.0);

        let spike = Array1::from(vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_relative_eq!(p.value(&spike).unwrap(), 6.0, epsilon = 1e-14);

        // loop-based repeated differencing oracle on random vectors
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for q in 1..=4usize {
            let dim = 12;
            let p = DifferencePenalty::new(q, dim).unwrap();
            let beta = Array1::from_iter((0..dim).map(|_| rng.gen_range(-2.0..2.0)));
            let mut d: Vec<f64> = beta.to_vec();
            for _ in 0..q {
                d = d.windows(2).map(|w| w[1] - w[0]).collect();
            }
            let oracle: f64 = d.iter().map(|v| v * v).sum();
            assert_relative_eq!(p.value(&beta).unwrap(), oracle, max_relative = 1e-12);
        }

        let wrong = Array1::zeros(4);
        assert!(matches!(
            p.value(&wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ptp_banded_matches_explicit_product() {
        for &(q, dim) in &[(1usize, 5usize), (2, 8), (3, 9)] {
            let p = DifferencePenalty::new(q, dim).unwrap();
            let m = p.to_matrix();
            let explicit = m.t().dot(&m);
            let banded = p.ptp().to_dense();
            for i in 0..dim {
                for j in 0..dim {
                    assert_relative_eq!(banded[[i, j]], explicit[[i, j]], epsilon = 1e-13);
                    if i.abs_diff(j) > q {
                        assert_eq!(explicit[[i, j]], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn ptp_null_space_has_dimension_q() {
        for q in 1..=3usize {
            let dim = 10;
            let p = DifferencePenalty::new(q, dim).unwrap();
            let eig = crate::linalg::sym_eigenvalues(&p.ptp().to_dense());
            let zero = eig.iter().filter(|v| v.abs() < 1e-9).count();
            assert_eq!(zero, q);
            assert!(eig[q] > 1e-6);
            // rank of P itself is dim - q
            assert_eq!(matrix_rank(&p.to_matrix()), dim - q);
        }
    }

    fn matrix_rank(m: &Array2<f64>) -> usize {
        let mut a = m.clone();
        let (rows, cols) = (a.nrows(), a.ncols());
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            let mut piv = row;
            let mut best = 0.0;
            for r in row..rows {
                if a[[r, col]].abs() > best {
                    best = a[[r, col]].abs();
                    piv = r;
                }
            }
            if best < 1e-10 {
                continue;
            }
            for c in 0..cols {
                a.swap([row, c], [piv, c]);
            }
            for r in 0..rows {
                if r != row && a[[r, col]] != 0.0 {
                    let f = a[[r, col]] / a[[row, col]];
                    for c in 0..cols {
                        a[[r, c]] -= f * a[[row, c]];
                    }
                }
            }
            rank += 1;
            row += 1;
            if row == rows {
                break;
            }
        }
        rank
    }

    #[test]
    fn energy_routes_agree_to_rounding() {
        // Eq.-(6) machinery: Gram quadratic form vs direct quadrature
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let basis = BSplineBasis::new(4, 20).unwrap();
        for _ in 0..20 {
            let beta =
                Array1::from_iter((0..basis.dim()).map(|_| rng.gen_range(-1.0..1.0)));
            for q in 1..=3usize {
                let a = roughness_energy_gram(&basis, &beta, q).unwrap();
                let b = roughness_energy_quadrature(&basis, &beta, q).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn single_spike_ratio_cross_checked_by_quadrature() {
        let p = 4;
        let q = 2;
        let k = 10;
        let basis = BSplineBasis::new(p, k).unwrap();
        let penalty = DifferencePenalty::new(q, basis.dim()).unwrap();
        let mut beta = Array1::zeros(basis.dim());
        beta[basis.dim() / 2] = 1.0;
        let dnorm2 = penalty.value(&beta).unwrap();
        assert_relative_eq!(dnorm2, 6.0, epsilon = 1e-13);
        let gram = roughness_energy_gram(&basis, &beta, q).unwrap();
        let quad = roughness_energy_quadrature(&basis, &beta, q).unwrap();
        assert_relative_eq!(gram, quad, max_relative = 1e-10);
        let ratio = (k as f64).powi(1 - 2 * q as i32) * gram / dnorm2;
        assert!(ratio > 0.0 && ratio.is_finite());
    }

    #[test]
    fn null_space_vector_is_skipped_not_crashed() {
        // affine beta with q=2 has zero penalty and zero formula-energy
        let basis = BSplineBasis::new(4, 8).unwrap();
        let beta = Array1::from_iter((0..basis.dim()).map(|j| 1.0 + 2.0 * j as f64));
        let penalty = DifferencePenalty::new(2, basis.dim()).unwrap();
        assert!(penalty.value(&beta).unwrap() < 1e-20);
        assert!(roughness_energy_gram(&basis, &beta, 2).unwrap() < 1e-16);
    }

    #[test]
    fn proposition1_brackets_stable_across_knot_counts() {
        let mut brackets = Vec::new();
        for &k in &[10usize, 20, 40, 80] {
            let (lo, hi) = verify_proposition1(4, 2, k, 200, 42).unwrap();
            assert!(lo > 0.0 && hi >= lo);
            brackets.push((lo, hi));
        }
        let lo_min = brackets.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
        let lo_max = brackets.iter().map(|b| b.0).fold(0.0f64, f64::max);
        let hi_min = brackets.iter().map(|b| b.1).fold(f64::INFINITY, f64::min);
        let hi_max = brackets.iter().map(|b| b.1).fold(0.0f64, f64::max);
        assert!((lo_max - lo_min) / lo_min < 0.5, "{brackets:?}");
        assert!((hi_max - hi_min) / hi_min < 0.5, "{brackets:?}");

        assert!(verify_proposition1(2, 2, 10, 10, 1).is_err());
        assert!(verify_proposition1(4, 2, 10, 0, 1).is_err());
    }

    #[test]
    fn first_difference_brackets_also_positive() {
        let (lo, hi) = verify_proposition1(4, 1, 10, 100, 7).unwrap();
        assert!(lo > 0.0 && hi >= lo && hi.is_finite());
    }
}
