// Same data, two selectors: exhaustive 300-point grid argmin vs the
// library's 50-point grid + golden refinement.
use ndarray::Array1;
use pspline::basis::BSplineBasis;
use pspline::loss::Loss;
use pspline::penalty::DifferencePenalty;
use pspline::sim::{draw_errors, ErrorDist, Scenario, TestFunction};
use pspline::solver::{edf_and_gcv, pwls_solve, FitConfig, FitProblem, LambdaChoice, ScaleMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20260810);
    let reps: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(400);
    let scenario = Scenario::new(TestFunction::F1, ErrorDist::Gaussian);
    let xs = scenario.design();
    let truth = scenario.truth();
    let basis = BSplineBasis::new(4, 40).unwrap();
    let design = basis.design_matrix(&xs).unwrap();
    let penalty = DifferencePenalty::new(2, 44).unwrap();

    let mut cfg = FitConfig::new(Loss::LeastSquares);
    cfg.scale_mode = ScaleMode::None;
    cfg.lambda = LambdaChoice::SelectGcv;

    let mut m_grid = Vec::new();
    let mut m_select = Vec::new();
    let mut lam_grid = Vec::new();
    let mut lam_select = Vec::new();
    for rep in 0..reps as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(rep);
        let eps = draw_errors(scenario.dist, scenario.n, &mut rng);
        let y: Vec<f64> = truth.iter().zip(&eps).map(|(&f, &e)| f + 0.5 * e).collect();
        let n = y.len() as f64;
        let w = vec![2.0; y.len()];

        let mut best = (f64::INFINITY, Array1::zeros(44), 0.0);
        for i in 0..300 {
            let lam = 1e-8 * (1e12f64).powf(i as f64 / 299.0);
            let lam_eff = 2.0 * n * lam;
            if let Ok(beta) = pwls_solve(&design, &w, &y, lam_eff, &penalty) {
                let fitted = design.fitted(&beta);
                let resid = Array1::from_iter(y.iter().zip(fitted.iter()).map(|(&a, &b)| a - b));
                if let Ok((_, g)) = edf_and_gcv(&design, &w, &resid, lam_eff, &penalty) {
                    if g <= best.0 {
                        best = (g, beta, lam);
                    }
                }
            }
        }
        let fitted = design.fitted(&best.1);
        m_grid.push(fitted.iter().zip(&truth).map(|(&a, &b)| (a - b) * (a - b)).sum::<f64>() / n);
        lam_grid.push(best.2);

        let p = FitProblem::new(&xs, &y, cfg.clone()).unwrap();
        let r = p.select().unwrap();
        let fitted = p.design().fitted(&r.beta);
        m_select.push(fitted.iter().zip(&truth).map(|(&a, &b)| (a - b) * (a - b)).sum::<f64>() / n);
        lam_select.push(r.lambda);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let se = |v: &[f64]| {
        let m = mean(v);
        (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0) / v.len() as f64).sqrt()
    };
    println!("seed {seed} reps {reps}");
    println!("grid300 : mean {:.4} (se {:.4})", mean(&m_grid), se(&m_grid));
    println!("select  : mean {:.4} (se {:.4})", mean(&m_select), se(&m_select));
    // where do the selected lambdas disagree most?
    let mut worst = (0.0f64, 0usize);
    for i in 0..reps {
        let d = (lam_grid[i].ln() - lam_select[i].ln()).abs();
        if d > worst.0 {
            worst = (d, i);
        }
    }
    println!(
        "max log-lambda gap at rep {}: grid {:.3e} select {:.3e} (mse {:.4} vs {:.4})",
        worst.1, lam_grid[worst.1], lam_select[worst.1], m_grid[worst.1], m_select[worst.1]
    );
}
