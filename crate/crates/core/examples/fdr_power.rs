//! FDR of the dual-threshold set and power against the oracle test.
//!
//! cargo run --release --example fdr_power [reps]

use iteb::simulation::{fdr_power_experiment, Design, Noise, ScenarioConfig, VarianceSource};

fn main() -> iteb::Result<()> {
    let reps = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(50);
    let cfg = ScenarioConfig {
        n_genes: 5000,
        m1: 5,
        m0: 5,
        gamma: 0.01,
        tau: 1.0,
        noise: Noise::Gaussian,
        variance_source: VarianceSource::Chisq1,
        design: Design::TwoSamplePooled,
        seed: 11,
        reps,
    };
    let r = fdr_power_experiment(&cfg, 0.1, 0.01, 0.01)?;
    println!("reps {}", r.reps);
    println!("mean FDP           {:.4} +- {:.4}", r.mean_fdp, r.se_fdp);
    println!("power              {:.4}", r.power.unwrap_or(0.0));
    println!("level-0.01 power   {:.4}", r.level_power.unwrap_or(0.0));
    println!("oracle power       {:.4}", r.oracle_power.unwrap_or(0.0));
    println!("mean tau2 estimate {:.4}", r.mean_tau2);
    Ok(())
}
