//! Small numerical kernels: symmetric banded storage and Cholesky, dense LU,
//! Gauss–Legendre nodes and a Jacobi eigensolver.
//!
//! The penalized normal equations BᵀWB + λ PᵀP are symmetric positive
//! definite with half-bandwidth max(p−1, q), so a banded Cholesky covers all
//! solver work. The dense routines exist for oracles, diagnostics and the
//! Gram eigenvalue checks, where dimensions stay below ~100.

use ndarray::{Array1, Array2};

use crate::{Error, Result};

/// Symmetric banded matrix, lower band stored by diagonals:
/// `bands[[d, j]] = A[j + d, j]` for `0 <= d <= half_bw`, `j + d < dim`.
#[derive(Debug, Clone)]
pub struct SymBanded {
    dim: usize,
    half_bw: usize,
    bands: Array2<f64>,
}

impl SymBanded {
    pub fn zeros(dim: usize, half_bw: usize) -> Self {
        SymBanded {
            dim,
            half_bw,
            bands: Array2::zeros((half_bw + 1, dim)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bw
    }

    /// Add `v` to A[i, j] (and implicitly A[j, i]). Requires |i − j| <= half_bw.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(hi - lo <= self.half_bw);
        self.bands[[hi - lo, lo]] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        if hi - lo > self.half_bw {
            0.0
        } else {
            self.bands[[hi - lo, lo]]
        }
    }

    /// A + s·B accumulated in place (bandwidths must satisfy B.half_bw <= self.half_bw).
    pub fn add_scaled(&mut self, other: &SymBanded, s: f64) {
        assert_eq!(self.dim, other.dim);
        assert!(other.half_bw <= self.half_bw);
        for d in 0..=other.half_bw {
            for j in 0..self.dim - d {
                self.bands[[d, j]] += s * other.bands[[d, j]];
            }
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.dim, self.dim));
        for j in 0..self.dim {
            for d in 0..=self.half_bw.min(self.dim - 1 - j) {
                a[[j + d, j]] = self.bands[[d, j]];
                a[[j, j + d]] = self.bands[[d, j]];
            }
        }
        a
    }

    /// y = A x.
    pub fn matvec(&self, x: &Array1<f64>) -> Array1<f64> {
        assert_eq!(x.len(), self.dim);
        let mut y = Array1::zeros(self.dim);
        for j in 0..self.dim {
            y[j] += self.bands[[0, j]] * x[j];
            for d in 1..=self.half_bw.min(self.dim - 1 - j) {
                y[j + d] += self.bands[[d, j]] * x[j];
                y[j] += self.bands[[d, j]] * x[j + d];
            }
        }
        y
    }

    /// Banded Cholesky A = L Lᵀ. Fails with `SingularSystem` on a
    /// non-positive pivot.
    pub fn cholesky(&self) -> Result<BandedCholesky> {
        let n = self.dim;
        let bw = self.half_bw;
        let mut l = self.bands.clone();
        for j in 0..n {
            let start = j.saturating_sub(bw);
            let mut s = l[[0, j]];
            for k in start..j {
                let v = l[[j - k, k]];
                s -= v * v;
            }
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::SingularSystem);
            }
            let d = s.sqrt();
            l[[0, j]] = d;
            let imax = (j + bw).min(n - 1);
            for i in j + 1..=imax {
                let mut s = l[[i - j, j]];
                let kstart = i.saturating_sub(bw).max(start);
                for k in kstart..j {
                    s -= l[[i - k, k]] * l[[j - k, k]];
                }
                l[[i - j, j]] = s / d;
            }
        }
        Ok(BandedCholesky {
            dim: n,
            half_bw: bw,
            bands: l,
        })
    }
}

/// Lower-triangular banded Cholesky factor.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    dim: usize,
    half_bw: usize,
    bands: Array2<f64>,
}

impl BandedCholesky {
    /// Solve A x = b via the factorization.
    pub fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        assert_eq!(b.len(), self.dim);
        let mut x = b.clone();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut Array1<f64>) {
        let n = self.dim;
        let bw = self.half_bw;
        // forward L y = b
        for j in 0..n {
            let v = x[j] / self.bands[[0, j]];
            x[j] = v;
            for d in 1..=bw.min(n - 1 - j) {
                x[j + d] -= self.bands[[d, j]] * v;
            }
        }
        // backward Lᵀ x = y
        for j in (0..n).rev() {
            let mut s = x[j];
            for d in 1..=bw.min(n - 1 - j) {
                s -= self.bands[[d, j]] * x[j + d];
            }
            x[j] = s / self.bands[[0, j]];
        }
    }
}

/// Dense LU solve with partial pivoting. Oracle-grade helper for small systems.
pub fn solve_dense(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let mut piv = col;
        let mut best = m[[col, col]].abs();
        for r in col + 1..n {
            if m[[r, col]].abs() > best {
                best = m[[r, col]].abs();
                piv = r;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(Error::SingularSystem);
        }
        if piv != col {
            for c in 0..n {
                m.swap([col, c], [piv, c]);
            }
            x.swap(col, piv);
        }
        for r in col + 1..n {
            let f = m[[r, col]] / m[[col, col]];
            if f != 0.0 {
                for c in col..n {
                    m[[r, c]] -= f * m[[col, c]];
                }
                x[r] -= f * x[col];
            }
        }
    }
    for r in (0..n).rev() {
        let mut s = x[r];
        for c in r + 1..n {
            s -= m[[r, c]] * x[c];
        }
        x[r] = s / m[[r, r]];
    }
    Ok(x)
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Tricomi-type initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (p0 - x * p1) / (1.0 - x * x);
    (p1, d)
}

/// Eigenvalues of a symmetric dense matrix by cyclic Jacobi rotations,
/// returned in ascending order.
pub fn sym_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    let mut m = a.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[[i, j]] * m[[i, j]];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frobenius(&m)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[[i, i]]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_spd_banded(dim: usize, bw: usize, rng: &mut ChaCha8Rng) -> SymBanded {
        let mut a = SymBanded::zeros(dim, bw);
        for j in 0..dim {
            for d in 0..=bw.min(dim - 1 - j) {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a.add(j + d, j, v);
            }
            // diagonal dominance keeps it SPD
            a.add(j, j, 2.0 * (bw as f64 + 1.0));
        }
        a
    }

    #[test]
    fn banded_cholesky_matches_dense_lu() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(dim, bw) in &[(6usize, 1usize), (12, 3), (44, 4), (30, 5)] {
            let a = random_spd_banded(dim, bw, &mut rng);
            let b = Array1::from_iter((0..dim).map(|_| rng.gen_range(-1.0..1.0)));
            let x = a.cholesky().unwrap().solve(&b);
            let xd = solve_dense(&a.to_dense(), &b).unwrap();
            for i in 0..dim {
                assert_relative_eq!(x[i], xd[i], max_relative = 1e-10, epsilon = 1e-12);
            }
            // normal-equations residual
            let r = &a.matvec(&x) - &b;
            let rn = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(rn < 1e-10);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = SymBanded::zeros(3, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, -2.0);
        a.add(2, 2, 1.0);
        assert!(matches!(a.cholesky(), Err(Error::SingularSystem)));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // n nodes are exact through degree 2n-1
        for n in 1..=10usize {
            let (x, w) = gauss_legendre(n);
            for deg in 0..=(2 * n - 1) {
                let got: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(&xi, &wi)| wi * xi.powi(deg as i32))
                    .sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert_relative_eq!(got, exact, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_eigenvalues_2x2_and_3x3() {
        let a = array![[2.0, 1.0], [1.0, 2.0]];
        let e = sym_eigenvalues(&a);
        assert_relative_eq!(e[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(e[1], 3.0, epsilon = 1e-12);

        // eigenvalues of diag-dominant tridiagonal 2,-1 pattern are 2-2cos(kπ/4)
        let a = array![[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]];
        let e = sym_eigenvalues(&a);
        for (k, &ev) in e.iter().enumerate() {
            let expect = 2.0 - 2.0 * (std::f64::consts::PI * (k as f64 + 1.0) / 4.0).cos();
            assert_relative_eq!(ev, expect, epsilon = 1e-10);
        }
    }
}
