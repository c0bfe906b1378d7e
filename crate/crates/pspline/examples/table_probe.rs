use pspline::sim::{run_study, ErrorDist, Estimator, Scenario, StudyConfig, TestFunction};

fn main() {
    let reps: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(400);
    let scenarios = vec![
        Scenario::new(TestFunction::F1, ErrorDist::Gaussian),
        Scenario::new(TestFunction::F1, ErrorDist::MixtureGaussian),
        Scenario::new(TestFunction::F1, ErrorDist::Slash),
    ];
    let cfg = StudyConfig::new(scenarios, Estimator::all().to_vec(), reps, 20260810);
    let t0 = std::time::Instant::now();
    let report = run_study(&cfg).unwrap();
    println!("elapsed: {:.1?} for {} reps", t0.elapsed(), reps);
    println!("{}", report.to_table());
    for c in &report.cells {
        println!(
            "{}/{}/{}: mean {:.4} (se {:.4}) median {:.4} fail {}",
            c.f.name(), c.dist.name(), c.estimator.name(), c.mean_mse, c.mc_se, c.median_mse, c.failures
        );
    }
}
