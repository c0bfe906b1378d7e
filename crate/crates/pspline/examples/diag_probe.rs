use pspline::loss::Loss;
use pspline::scale::m_scale;
use pspline::sim::{draw_errors, ErrorDist, Scenario, TestFunction};
use pspline::solver::{FitConfig, FitProblem, LambdaChoice, ScaleMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg(loss: Loss, sigma: Option<f64>) -> FitConfig {
    let mut c = FitConfig::new(loss);
    c.scale_mode = match sigma {
        None => ScaleMode::None,
        Some(s) => ScaleMode::Fixed(s),
    };
    c.lambda = LambdaChoice::SelectGcv;
    c
}

fn main() {
    let scenario = Scenario::new(TestFunction::F1, ErrorDist::Gaussian);
    let xs = scenario.design();
    let truth = scenario.truth();
    let mut bad = 0;
    for rep in 0..400u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(20260810);
        rng.set_stream(rep);
        let eps = draw_errors(scenario.dist, scenario.n, &mut rng);
        let y: Vec<f64> = truth.iter().zip(&eps).map(|(&f, &e)| f + 0.5 * e).collect();
        let sigma = m_scale(&y).unwrap().sigma;

        let ls_p = FitProblem::new(&xs, &y, cfg(Loss::LeastSquares, None)).unwrap();
        let (_ls_r, ls_t) = ls_p.select_traced(None).unwrap();
        let h_p = FitProblem::new(&xs, &y, cfg(Loss::huber_default(), Some(sigma))).unwrap();
        let (h_r, h_t) = h_p.select_traced(Some(&ls_t)).unwrap();
        let t_p = FitProblem::new(&xs, &y, cfg(Loss::tukey_default(), Some(sigma))).unwrap();
        let (t_r, _) = t_p.select_traced(Some(&h_t)).unwrap();

        let fitted = t_p.design().fitted(&t_r.beta);
        let mse: f64 = fitted
            .iter()
            .zip(&truth)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<f64>()
            / truth.len() as f64;
        if mse > 0.2 {
            bad += 1;
            println!(
                "rep {rep}: tukey mse {mse:.3} lambda {:.3e} edf {:.2} gcv {:.4} conv {} it {} | huber lambda {:.3e} edf {:.2} sigma {sigma:.3}",
                t_r.lambda, t_r.edf, t_r.gcv, t_r.converged, t_r.iterations, h_r.lambda, h_r.edf
            );
        }
    }
    println!("bad reps: {bad}/400");
}
