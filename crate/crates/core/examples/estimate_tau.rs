//! The three spreading-variance estimators on one synthetic dataset.
//!
//! cargo run --release --example estimate_tau

use std::time::Instant;

use iteb::simulation::{Design, Noise, ScenarioConfig, ScenarioGenerator, VarianceSource};
use iteb::{central_matching, iteb, truncated_mle, CmConfig, Diagnostics, ItebConfig, TmleConfig};

fn main() -> iteb::Result<()> {
    let cfg = ScenarioConfig {
        n_genes: 15_000,
        m1: 10,
        m0: 0,
        gamma: 0.05,
        tau: 0.7,
        noise: Noise::Gaussian,
        variance_source: VarianceSource::Chisq1,
        design: Design::OneSample,
        seed: 1,
        reps: 1,
    };
    let (_, s) = ScenarioGenerator::new(&cfg)?.summaries(0)?;
    println!("true tau2 {:.4}", cfg.tau * cfg.tau);

    let t = Instant::now();
    let est = iteb(&s, &ItebConfig::default())?;
    if let Diagnostics::Iteb { trace, rejected, .. } = &est.diagnostics {
        println!("trace {trace:.4?}, {} genes removed", rejected.len());
    }
    println!("iteb  {:.4}  ({:.1} ms)", est.tau2, t.elapsed().as_secs_f64() * 1e3);

    let t = Instant::now();
    let est = truncated_mle(&s, &TmleConfig::default())?;
    println!("tmle  {:.4}  ({:.1} ms)", est.tau2, t.elapsed().as_secs_f64() * 1e3);

    let t = Instant::now();
    match central_matching(&s, &CmConfig::default()) {
        Ok(est) => println!("cm    {:.4}  ({:.1} ms)", est.tau2, t.elapsed().as_secs_f64() * 1e3),
        Err(e) => println!("cm    failed: {e}"),
    }
    Ok(())
}
