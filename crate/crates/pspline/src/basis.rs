//! Equidistant-knot B-spline bases on [0, 1]: construction, evaluation,
//! design matrices and exact spline differentiation.
//!
//! The basis of order `p` (degree p−1) with `K` interior knots lives on the
//! uniform lattice t_i = (i − p)/(K + 1), i = 1..K+2p, so the interior knots
//! are 1/(K+1), ..., K/(K+1) and the lattice extends p−1 knots beyond each
//! end of [0, 1]. The K+p B-splines whose support meets (0, 1) form the
//! basis; on this lattice they satisfy partition of unity on the closed
//! interval, every Greville site sequence is arithmetic (so polynomial
//! sequences of coefficients reproduce polynomials in x), and the spline
//! derivative has exactly the difference-coefficient expansion used by the
//! penalty machinery.
//!
//! Evaluation uses the Cox–de Boor recursion; the divided-difference
//! definition is kept as a brute-force oracle in the tests.

use ndarray::{Array1, Array2};

use crate::linalg::{gauss_legendre, SymBanded};
use crate::{Error, Result};

/// Uniform knot lattice for a basis of order `p` with `K` interior knots.
#[derive(Debug, Clone)]
pub struct KnotVector {
    order: usize,
    interior: usize,
    knots: Vec<f64>,
}

impl KnotVector {
    pub fn new(order: usize, interior: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidParameter("spline order p must be >= 1".into()));
        }
        if interior < 1 {
            return Err(Error::InvalidParameter(
                "interior knot count K must be >= 1".into(),
            ));
        }
        let h = 1.0 / (interior as f64 + 1.0);
        // 0-based: t[i] = (i - (p-1)) * h, so t[p-1] = 0 and t[K+p] = 1.
        let knots = (0..interior + 2 * order)
            .map(|i| (i as f64 - (order as f64 - 1.0)) * h)
            .collect();
        Ok(KnotVector {
            order,
            interior,
            knots,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn interior_count(&self) -> usize {
        self.interior
    }

    /// Knot spacing 1/(K+1).
    pub fn spacing(&self) -> f64 {
        1.0 / (self.interior as f64 + 1.0)
    }

    /// Full lattice, length K + 2p.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// The K knots strictly inside (0, 1).
    pub fn interior_knots(&self) -> &[f64] {
        &self.knots[self.order..self.order + self.interior]
    }
}

/// B-spline basis of dimension K + p on the knot lattice.
#[derive(Debug, Clone)]
pub struct BSplineBasis {
    knots: KnotVector,
    dim: usize,
}

impl BSplineBasis {
    pub fn new(order: usize, interior: usize) -> Result<Self> {
        let knots = KnotVector::new(order, interior)?;
        let dim = interior + order;
        Ok(BSplineBasis { knots, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.knots.order
    }

    pub fn interior_count(&self) -> usize {
        self.knots.interior
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.knots
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) || x.is_nan() {
            return Err(Error::Domain(x));
        }
        Ok(())
    }

    /// Index mu of the knot interval containing x, with x = 1 assigned to the
    /// last interval inside [0, 1] so that the final interval is right-closed.
    fn interval(&self, x: f64) -> usize {
        let p = self.knots.order;
        let k = self.knots.interior;
        let cell = (x * (k as f64 + 1.0)).floor() as usize;
        (p - 1) + cell.min(k)
    }

    /// Values of the p B-splines that are nonzero at x, together with the
    /// index of the first one.
    pub fn eval_local(&self, x: f64) -> Result<(usize, Vec<f64>)> {
        self.check_domain(x)?;
        let p = self.knots.order;
        let t = &self.knots.knots;
        let mu = self.interval(x);
        let mut values = vec![0.0; p];
        values[0] = 1.0;
        let mut left = vec![0.0; p];
        let mut right = vec![0.0; p];
        for j in 1..p {
            left[j] = x - t[mu + 1 - j];
            right[j] = t[mu + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                let den = right[r + 1] + left[j - r];
                let tmp = values[r] / den;
                values[r] = saved + right[r + 1] * tmp;
                saved = left[j - r] * tmp;
            }
            values[j] = saved;
        }
        Ok((mu + 1 - p, values))
    }

    /// Dense vector of all K + p basis values at x.
    pub fn eval(&self, x: f64) -> Result<Array1<f64>> {
        let (offset, vals) = self.eval_local(x)?;
        let mut out = Array1::zeros(self.dim);
        for (k, v) in vals.iter().enumerate() {
            out[offset + k] = *v;
        }
        Ok(out)
    }

    /// Spline value Σ β_j B_j(x).
    pub fn value(&self, beta: &Array1<f64>, x: f64) -> Result<f64> {
        if beta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: beta.len(),
            });
        }
        let (offset, vals) = self.eval_local(x)?;
        Ok(vals
            .iter()
            .enumerate()
            .map(|(k, v)| v * beta[offset + k])
            .sum())
    }

    /// Design matrix with row i = basis values at xs[i], stored by nonzero
    /// block (each row has at most p nonzeros).
    pub fn design_matrix(&self, xs: &[f64]) -> Result<DesignMatrix> {
        let p = self.knots.order;
        let n = xs.len();
        let mut offsets = Vec::with_capacity(n);
        let mut values = Array2::zeros((n, p));
        for (i, &x) in xs.iter().enumerate() {
            let (off, vals) = self.eval_local(x)?;
            offsets.push(off);
            for (k, v) in vals.iter().enumerate() {
                values[[i, k]] = *v;
            }
        }
        Ok(DesignMatrix {
            n,
            dim: self.dim,
            width: p,
            offsets,
            values,
        })
    }

    /// Exact coefficients of the q-th derivative on the order-(p−q) basis
    /// with the same interior knots: (K+1)^q · Δ^q β.
    pub fn derivative_coeffs(&self, beta: &Array1<f64>, q: usize) -> Result<Array1<f64>> {
        if beta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: beta.len(),
            });
        }
        if q < 1 || q >= self.knots.order {
            return Err(Error::InvalidParameter(format!(
                "derivative order q = {} must satisfy 1 <= q < p = {}",
                q, self.knots.order
            )));
        }
        let scale = self.knots.interior as f64 + 1.0;
        let mut c: Vec<f64> = beta.iter().copied().collect();
        for _ in 0..q {
            c = c.windows(2).map(|w| scale * (w[1] - w[0])).collect();
        }
        Ok(Array1::from(c))
    }

    /// Gram matrix G_ij = ∫₀¹ B_i(x) B_j(x) dx, computed by Gauss–Legendre
    /// quadrature with order+1 nodes per knot interval (exact for the
    /// piecewise-polynomial integrand).
    pub fn gram_matrix(&self) -> Array2<f64> {
        let p = self.knots.order;
        let k = self.knots.interior;
        let t = &self.knots.knots;
        let (nodes, weights) = gauss_legendre(p + 1);
        let mut g = Array2::zeros((self.dim, self.dim));
        for cell in 0..=k {
            let lo = t[p - 1 + cell];
            let hi = t[p + cell];
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (&u, &w) in nodes.iter().zip(&weights) {
                let x = (mid + half * u).clamp(0.0, 1.0);
                let (off, vals) = self.eval_local(x).expect("quadrature node in [0,1]");
                for a in 0..vals.len() {
                    for b in 0..vals.len() {
                        g[[off + a, off + b]] += w * half * vals[a] * vals[b];
                    }
                }
            }
        }
        g
    }
}

/// Design matrix in banded row storage: row i holds `width` contiguous
/// values starting at column `offsets[i]`.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    n: usize,
    dim: usize,
    width: usize,
    offsets: Vec<usize>,
    values: Array2<f64>,
}

impl DesignMatrix {
    /// Assemble from precomputed banded rows (row i holds `width` values
    /// starting at column `offsets[i]`). Used by tests and experiments that
    /// evaluate alternative bases.
    pub fn from_rows(dim: usize, width: usize, offsets: Vec<usize>, values: Array2<f64>) -> Self {
        let n = offsets.len();
        assert_eq!(values.nrows(), n);
        assert_eq!(values.ncols(), width);
        for &off in &offsets {
            assert!(off + width <= dim);
        }
        DesignMatrix {
            n,
            dim,
            width,
            offsets,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.dim
    }

    /// Nonzero block of row i: (first column, values).
    pub fn row(&self, i: usize) -> (usize, &[f64]) {
        (self.offsets[i], self.values.row(i).to_slice().unwrap())
    }

    /// Fitted values B β.
    pub fn fitted(&self, beta: &Array1<f64>) -> Array1<f64> {
        assert_eq!(beta.len(), self.dim);
        let mut out = Array1::zeros(self.n);
        for i in 0..self.n {
            let off = self.offsets[i];
            let mut s = 0.0;
            for k in 0..self.width {
                s += self.values[[i, k]] * beta[off + k];
            }
            out[i] = s;
        }
        out
    }

    /// BᵀWB as a symmetric banded matrix with half-bandwidth width−1.
    pub fn xtwx(&self, w: &[f64]) -> SymBanded {
        let mut a = SymBanded::zeros(self.dim, self.width.saturating_sub(1));
        self.accumulate_xtwx(w, &mut a);
        a
    }

    /// Accumulate BᵀWB into an existing banded matrix (whose bandwidth may
    /// exceed width−1 to make room for a penalty term).
    pub fn accumulate_xtwx(&self, w: &[f64], a: &mut SymBanded) {
        assert_eq!(w.len(), self.n);
        for i in 0..self.n {
            let off = self.offsets[i];
            let wi = w[i];
            for aa in 0..self.width {
                let va = self.values[[i, aa]];
                if va == 0.0 {
                    continue;
                }
                for bb in aa..self.width {
                    a.add(off + bb, off + aa, wi * va * self.values[[i, bb]]);
                }
            }
        }
    }

    /// Bᵀ v for a length-n vector v.
    pub fn xt_dot(&self, v: &[f64]) -> Array1<f64> {
        assert_eq!(v.len(), self.n);
        let mut out = Array1::zeros(self.dim);
        for i in 0..self.n {
            let off = self.offsets[i];
            for k in 0..self.width {
                out[off + k] += self.values[[i, k]] * v[i];
            }
        }
        out
    }

    /// BᵀW y.
    pub fn xtwy(&self, w: &[f64], y: &[f64]) -> Array1<f64> {
        assert_eq!(w.len(), self.n);
        assert_eq!(y.len(), self.n);
        let mut out = Array1::zeros(self.dim);
        for i in 0..self.n {
            let off = self.offsets[i];
            let wy = w[i] * y[i];
            for k in 0..self.width {
                out[off + k] += self.values[[i, k]] * wy;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut b = Array2::zeros((self.n, self.dim));
        for i in 0..self.n {
            let off = self.offsets[i];
            for k in 0..self.width {
                b[[i, off + k]] = self.values[[i, k]];
            }
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Brute-force evaluation of B_{k,p}(x) via the truncated-polynomial
    /// divided-difference definition (all lattice knots are distinct, so
    /// ordinary divided differences apply).
    fn divided_difference_bspline(basis: &BSplineBasis, k: usize, x: f64) -> f64 {
        let p = basis.order();
        let t = basis.knot_vector().knots();
        let g = |tt: f64| -> f64 {
            let d = tt - x;
            if d < 0.0 {
                0.0
            } else if p == 1 {
                1.0
            } else {
                d.powi(p as i32 - 1)
            }
        };
        // Newton divided-difference table over t[k..=k+p]
        let mut dd: Vec<f64> = (0..=p).map(|j| g(t[k + j])).collect();
        for level in 1..=p {
            for j in 0..=(p - level) {
                dd[j] = (dd[j + 1] - dd[j]) / (t[k + j + level] - t[k + j]);
            }
        }
        (t[k + p] - t[k]) * dd[0]
    }

    #[test]
    fn make_basis_examples() {
        let b = BSplineBasis::new(4, 40).unwrap();
        assert_eq!(b.dim(), 44);
        for (i, &k) in b.knot_vector().interior_knots().iter().enumerate() {
            assert_relative_eq!(k, (i as f64 + 1.0) / 41.0, epsilon = 1e-15);
        }

        let b = BSplineBasis::new(1, 1).unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(b.knot_vector().knots(), &[0.0, 0.5, 1.0]);

        let b = BSplineBasis::new(2, 3).unwrap();
        assert_eq!(b.dim(), 5);
        assert_eq!(b.knot_vector().interior_knots(), &[0.25, 0.5, 0.75]);

        assert!(BSplineBasis::new(0, 5).is_err());
        assert!(BSplineBasis::new(3, 0).is_err());
    }

    #[test]
    fn knots_are_nondecreasing_with_stated_interior() {
        for &(p, k) in &[(1usize, 1usize), (2, 3), (3, 7), (4, 40)] {
            let kv = KnotVector::new(p, k).unwrap();
            assert_eq!(kv.knots().len(), k + 2 * p);
            for w in kv.knots().windows(2) {
                assert!(w[1] > w[0]);
            }
            for (i, &t) in kv.interior_knots().iter().enumerate() {
                assert_relative_eq!(t, (i as f64 + 1.0) / (k as f64 + 1.0), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn order_one_is_interval_indicator() {
        let b = BSplineBasis::new(1, 1).unwrap();
        let v = b.eval(0.25).unwrap();
        assert_eq!(v.as_slice().unwrap(), &[1.0, 0.0]);
        let v = b.eval(0.75).unwrap();
        assert_eq!(v.as_slice().unwrap(), &[0.0, 1.0]);
        // right-closed final interval
        let v = b.eval(1.0).unwrap();
        assert_eq!(v.as_slice().unwrap(), &[0.0, 1.0]);
    }

    #[test]
    fn order_two_hat_at_its_knot() {
        let b = BSplineBasis::new(2, 3).unwrap();
        let v = b.eval(0.25).unwrap();
        let expect = [0.0, 1.0, 0.0, 0.0, 0.0];
        for i in 0..5 {
            assert_relative_eq!(v[i], expect[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_out_of_domain() {
        let b = BSplineBasis::new(4, 10).unwrap();
        assert!(matches!(b.eval(-1e-9), Err(Error::Domain(_))));
        assert!(matches!(b.eval(1.0 + 1e-9), Err(Error::Domain(_))));
        assert!(b.eval(f64::NAN).is_err());
    }

    #[test]
    fn matches_divided_difference_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(p, k) in &[(1usize, 3usize), (2, 3), (3, 5), (4, 7), (5, 4)] {
            let b = BSplineBasis::new(p, k).unwrap();
            for _ in 0..40 {
                // keep away from knots so (t-x)_+^0 ambiguity cannot bite for p=1
                let x = rng.gen_range(0.001..0.999);
                let v = b.eval(x).unwrap();
                for j in 0..b.dim() {
                    let oracle = divided_difference_bspline(&b, j, x);
                    assert_relative_eq!(v[j], oracle, epsilon = 1e-10, max_relative = 1e-10);
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_bounds_and_local_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(p, k) in &[(1usize, 5usize), (2, 10), (3, 17), (4, 40)] {
            let b = BSplineBasis::new(p, k).unwrap();
            for trial in 0..20_000 {
                let x = match trial {
                    0 => 0.0,
                    1 => 1.0,
                    _ => rng.gen::<f64>(),
                };
                let (off, vals) = b.eval_local(x).unwrap();
                assert!(off + vals.len() <= b.dim());
                let sum: f64 = vals.iter().sum();
                assert!((sum - 1.0).abs() < 1e-12, "PoU failed at x={x}: {sum}");
                for &v in &vals {
                    assert!((-1e-14..=1.0 + 1e-14).contains(&v));
                }
            }
        }
    }

    #[test]
    fn design_matrix_rows_and_empty_input() {
        let b = BSplineBasis::new(4, 40).unwrap();
        let xs: Vec<f64> = (1..=60).map(|i| i as f64 / 60.0).collect();
        let d = b.design_matrix(&xs).unwrap();
        assert_eq!(d.nrows(), 60);
        assert_eq!(d.ncols(), 44);
        for i in 0..60 {
            let (_, vals) = d.row(i);
            assert!(vals.iter().filter(|v| **v != 0.0).count() <= 4);
            let s: f64 = vals.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            let dense_row = b.eval(xs[i]).unwrap();
            let full = d.to_dense();
            for j in 0..44 {
                assert_relative_eq!(full[[i, j]], dense_row[j], epsilon = 1e-15);
            }
        }

        let empty = b.design_matrix(&[]).unwrap();
        assert_eq!(empty.nrows(), 0);
        assert_eq!(empty.ncols(), 44);

        assert!(b.design_matrix(&[0.5, 1.5]).is_err());
    }

    #[test]
    fn xtwx_and_xtwy_match_dense_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = BSplineBasis::new(3, 6).unwrap();
        let xs: Vec<f64> = (0..20).map(|_| rng.gen()).collect();
        let d = b.design_matrix(&xs).unwrap();
        let w: Vec<f64> = (0..20).map(|_| rng.gen_range(0.1..2.0)).collect();
        let y: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let dense = d.to_dense();
        let a = d.xtwx(&w).to_dense();
        let rhs = d.xtwy(&w, &y);
        for i in 0..d.ncols() {
            let mut ri = 0.0;
            for r in 0..20 {
                ri += dense[[r, i]] * w[r] * y[r];
            }
            assert_relative_eq!(rhs[i], ri, epsilon = 1e-13);
            for j in 0..d.ncols() {
                let mut aij = 0.0;
                for r in 0..20 {
                    aij += dense[[r, i]] * w[r] * dense[[r, j]];
                }
                assert_relative_eq!(a[[i, j]], aij, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn derivative_annihilates_polynomial_coefficient_sequences() {
        let b = BSplineBasis::new(4, 10).unwrap();
        let constant = Array1::from_elem(b.dim(), 3.5);
        let d = b.derivative_coeffs(&constant, 1).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-12));

        let affine = Array1::from_iter((0..b.dim()).map(|j| 2.0 + 0.5 * j as f64));
        let d = b.derivative_coeffs(&affine, 2).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-10));

        assert!(b.derivative_coeffs(&constant, 4).is_err());
        assert!(b.derivative_coeffs(&constant, 0).is_err());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = 4;
        for &k in &[7usize, 20] {
            let b = BSplineBasis::new(p, k).unwrap();
            let beta = Array1::from_iter((0..b.dim()).map(|_| rng.gen_range(-1.0..1.0)));

            // first derivative against central differences on a fine grid
            let d1 = b.derivative_coeffs(&beta, 1).unwrap();
            let b1 = BSplineBasis::new(p - 1, k).unwrap();
            let h = 1e-5;
            let mut max_err = 0.0f64;
            let mut max_val = 0.0f64;
            for g in 0..10_000 {
                let x = 0.02 + 0.96 * (g as f64 + 0.5) / 10_000.0;
                let fd = (b.value(&beta, x + h).unwrap() - b.value(&beta, x - h).unwrap())
                    / (2.0 * h);
                let ds = b1.value(&d1, x).unwrap();
                max_err = max_err.max((fd - ds).abs());
                max_val = max_val.max(ds.abs());
            }
            assert!(
                max_err / max_val < 1e-6,
                "K={k}: relative error {} too large",
                max_err / max_val
            );

            // second derivative: cubic pieces have zero fourth derivative, so
            // the three-point stencil is exact up to rounding away from knots
            let d2 = b.derivative_coeffs(&beta, 2).unwrap();
            let b2 = BSplineBasis::new(p - 2, k).unwrap();
            let h2 = 1e-4;
            let spacing = 1.0 / (k as f64 + 1.0);
            let mut max_err = 0.0f64;
            let mut max_val = 0.0f64;
            for g in 0..2_000 {
                let x = 0.05 + 0.9 * (g as f64 + 0.37) / 2_000.0;
                // the three-point stencil is only exact while it stays inside
                // one cubic piece; skip points whose stencil straddles a knot
                let nearest = (x / spacing).round() * spacing;
                if (x - nearest).abs() < 3.0 * h2 {
                    continue;
                }
                let fd = (b.value(&beta, x + h2).unwrap() - 2.0 * b.value(&beta, x).unwrap()
                    + b.value(&beta, x - h2).unwrap())
                    / (h2 * h2);
                let ds = b2.value(&d2, x).unwrap();
                max_err = max_err.max((fd - ds).abs());
                max_val = max_val.max(ds.abs());
            }
            assert!(
                max_err / max_val < 1e-6,
                "K={k}: second-derivative relative error {} too large",
                max_err / max_val
            );
        }
    }

    #[test]
    fn gram_matrix_matches_fine_riemann_quadrature() {
        let b = BSplineBasis::new(3, 4).unwrap();
        let g = b.gram_matrix();
        // midpoint rule on a very fine grid as an independent check
        let m = 200_000;
        let mut riemann = Array2::zeros((b.dim(), b.dim()));
        for c in 0..m {
            let x = (c as f64 + 0.5) / m as f64;
            let (off, vals) = b.eval_local(x).unwrap();
            for a in 0..vals.len() {
                for bb in 0..vals.len() {
                    riemann[[off + a, off + bb]] += vals[a] * vals[bb] / m as f64;
                }
            }
        }
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                assert_relative_eq!(g[[i, j]], riemann[[i, j]], epsilon = 5e-10);
            }
        }
        // symmetry and 2(p-1)-band structure
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                assert_relative_eq!(g[[i, j]], g[[j, i]], epsilon = 1e-15);
                if i.abs_diff(j) >= b.order() {
                    assert_eq!(g[[i, j]], 0.0);
                }
            }
        }
    }

    #[test]
    fn gram_eigenvalues_scale_like_inverse_knot_count() {
        // eigenvalue sandwich: eigenvalues of G lie in [c1/K, c2/K] with
        // constants stable across K for fixed order
        let order = 2; // p - q with p = 4, q = 2
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for &k in &[10usize, 20, 40, 80] {
            let b = BSplineBasis::new(order, k).unwrap();
            let eig = crate::linalg::sym_eigenvalues(&b.gram_matrix());
            assert!(eig[0] > 0.0);
            lo.push(eig[0] * k as f64);
            hi.push(eig[eig.len() - 1] * k as f64);
        }
        let spread = |v: &[f64]| {
            let mn = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let mx = v.iter().cloned().fold(0.0f64, f64::max);
            (mx - mn) / mn
        };
        assert!(spread(&lo) < 0.5, "K*eig_min varies too much: {lo:?}");
        assert!(spread(&hi) < 0.5, "K*eig_max varies too much: {hi:?}");
    }
}
