// Compare LS gaussian-f1 mean MSE under the uniform-extended knot lattice
// (library basis) vs a clamped (repeated-boundary) basis, same GCV pipeline.
use ndarray::{Array1, Array2};
use pspline::basis::{BSplineBasis, DesignMatrix};
use pspline::penalty::DifferencePenalty;
use pspline::sim::{draw_errors, ErrorDist, Scenario, TestFunction};
use pspline::solver::{edf_and_gcv, pwls_solve};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn clamped_knots(p: usize, k: usize) -> Vec<f64> {
    let h = 1.0 / (k as f64 + 1.0);
    let mut t = vec![0.0; p];
    for i in 1..=k {
        t.push(i as f64 * h);
    }
    t.extend(vec![1.0; p]);
    t
}

// Cox-de Boor on arbitrary nondecreasing knots, 0/0 treated as 0.
fn eval_clamped(t: &[f64], p: usize, dim: usize, x: f64) -> (usize, Vec<f64>) {
    // interval mu with t[mu] <= x < t[mu+1], clamped into [p-1, dim-1]
    let mut mu = dim - 1;
    if x < 1.0 {
        for j in (p - 1)..dim {
            if t[j] <= x && x < t[j + 1] {
                mu = j;
                break;
            }
        }
    }
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
            let tmp = if den != 0.0 { values[r] / den } else { 0.0 };
            values[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        values[j] = saved;
    }
    (mu + 1 - p, values)
}

fn design_clamped(xs: &[f64], p: usize, k: usize) -> DesignMatrix {
    let t = clamped_knots(p, k);
    let dim = k + p;
    let mut offsets = Vec::new();
    let mut vals = Array2::zeros((xs.len(), p));
    for (i, &x) in xs.iter().enumerate() {
        let (off, v) = eval_clamped(&t, p, dim, x);
        offsets.push(off);
        for (kk, vv) in v.iter().enumerate() {
            vals[[i, kk]] = *vv;
        }
    }
    DesignMatrix::from_rows(dim, p, offsets, vals)
}

fn ls_gcv_mse(design: &DesignMatrix, y: &[f64], truth: &[f64]) -> f64 {
    let n = y.len() as f64;
    let penalty = DifferencePenalty::new(2, design.ncols()).unwrap();
    let w = vec![2.0; y.len()];
    let mut best = (f64::INFINITY, Array1::zeros(design.ncols()));
    for i in 0..300 {
        let lam = 1e-8 * (1e12f64).powf(i as f64 / 299.0);
        let lam_eff = 2.0 * n * lam;
        if let Ok(beta) = pwls_solve(design, &w, y, lam_eff, &penalty) {
            let fitted = design.fitted(&beta);
            let resid = Array1::from_iter(y.iter().zip(fitted.iter()).map(|(&a, &b)| a - b));
            if let Ok((_, g)) = edf_and_gcv(design, &w, &resid, lam_eff, &penalty) {
                if g <= best.0 {
                    best = (g, beta);
                }
            }
        }
    }
    let fitted = design.fitted(&best.1);
    fitted
        .iter()
        .zip(truth.iter())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
        / n
}

fn main() {
    let scenario = Scenario::new(TestFunction::F1, ErrorDist::Gaussian);
    let xs = scenario.design();
    let truth = scenario.truth();
    let basis = BSplineBasis::new(4, 40).unwrap();
    let uniform_design = basis.design_matrix(&xs).unwrap();
    let clamped = design_clamped(&xs, 4, 40);

    let reps = 300;
    let (mut mu, mut mc) = (Vec::new(), Vec::new());
    for rep in 0..reps as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(777);
        rng.set_stream(rep);
        let eps = draw_errors(scenario.dist, scenario.n, &mut rng);
        let y: Vec<f64> = truth.iter().zip(&eps).map(|(&f, &e)| f + 0.5 * e).collect();
        mu.push(ls_gcv_mse(&uniform_design, &y, &truth));
        mc.push(ls_gcv_mse(&clamped, &y, &truth));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let med = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        s[s.len() / 2]
    };
    println!("uniform: mean {:.4} median {:.4}", mean(&mu), med(&mu));
    println!("clamped: mean {:.4} median {:.4}", mean(&mc), med(&mc));
}
