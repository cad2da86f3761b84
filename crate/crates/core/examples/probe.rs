// temporary probe: reduced grid medians for the headline claims
use ppbench_core::*;

fn main() {
    let t0 = std::time::Instant::now();
    let config = RunConfig {
        replications: 50,
        ..RunConfig::default()
    };
    let out = run_grid(&config).unwrap();
    println!("grid of {} results in {:?}", out.results.len(), t0.elapsed());
    for s in &out.summaries {
        println!(
            "cell {:2} {:12} level {:5} | lasso med {:8.3} comp med {:8.3} ratio med {:8.3}",
            s.cell_index,
            s.predictor_kind.to_string(),
            s.level,
            s.lasso_rmse.median,
            s.composite_rmse.median,
            s.ratio.median
        );
    }
    let converged = out.results.iter().filter(|r| r.lasso_converged).count();
    println!("converged {}/{}", converged, out.results.len());

    // interior holdout spot check
    let t1 = std::time::Instant::now();
    let config2 = RunConfig {
        replications: 30,
        holdout: vec![HoldoutKind::Interior],
        ..RunConfig::default()
    };
    let out2 = run_grid(&config2).unwrap();
    println!("interior grid in {:?}", t1.elapsed());
    for s in &out2.summaries {
        println!(
            "cell {:2} {:12} level {:5} | lasso med {:8.3} comp med {:8.3}",
            s.cell_index,
            s.predictor_kind.to_string(),
            s.level,
            s.lasso_rmse.median,
            s.composite_rmse.median,
        );
    }
}
