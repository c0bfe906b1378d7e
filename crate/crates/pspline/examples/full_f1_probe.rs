use pspline::sim::{run_study, ErrorDist, Estimator, Scenario, StudyConfig, TestFunction};

fn main() {
    let reps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(400);
    let seed: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(20260810);
    let scenarios: Vec<Scenario> = ErrorDist::all()
        .iter()
        .map(|&d| Scenario::new(TestFunction::F1, d))
        .collect();
    let cfg = StudyConfig::new(scenarios, Estimator::all().to_vec(), reps, seed);
    let t0 = std::time::Instant::now();
    let report = run_study(&cfg).unwrap();
    println!("elapsed {:.0?} seed {seed} reps {reps}", t0.elapsed());
    for c in &report.cells {
        println!(
            "{}/{}/{}: mean {:.4} (se {:.4}) median {:.4} fail {}",
            c.f.name(), c.dist.name(), c.estimator.name(), c.mean_mse, c.mc_se, c.median_mse, c.failures
        );
    }
}
