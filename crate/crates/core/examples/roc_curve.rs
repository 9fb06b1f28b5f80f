//! Averaged ROC curves of the ITEB test and the ordinary t-test.
//!
//! cargo run --release --example roc_curve

use iteb::simulation::{roc_experiment, Design, Noise, RocMethod, ScenarioConfig, VarianceSource};

fn main() -> iteb::Result<()> {
    for tau in [0.0, 0.5, 1.0] {
        let cfg = ScenarioConfig {
            n_genes: 5000,
            m1: 5,
            m0: 5,
            gamma: 0.01,
            tau,
            noise: Noise::Gaussian,
            variance_source: VarianceSource::Chisq1,
            design: Design::TwoSamplePooled,
            seed: 5,
            reps: 20,
        };
        let i = roc_experiment(&cfg, RocMethod::ItebTest)?;
        let t = roc_experiment(&cfg, RocMethod::TTest)?;
        print!("tau {tau}: sensitivity at FDP");
        for target in [0.05, 0.1, 0.2] {
            print!("  {target}: iteb {:.3} t {:.3}", i.sensitivity_at(target), t.sensitivity_at(target));
        }
        println!();
    }
    Ok(())
}
