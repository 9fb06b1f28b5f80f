//! P-values at an estimated `tau2` and the rejection rules.
//!
//! cargo run --release --example multiple_testing

use iteb::simulation::{Design, Noise, ScenarioConfig, ScenarioGenerator, VarianceSource};
use iteb::testing::{fdp, sensitivity, Procedure, TestOutcome};
use iteb::{iteb, ItebConfig};

fn main() -> iteb::Result<()> {
    let cfg = ScenarioConfig {
        n_genes: 5000,
        m1: 5,
        m0: 5,
        gamma: 0.01,
        tau: 1.0,
        noise: Noise::Gaussian,
        variance_source: VarianceSource::Chisq1,
        design: Design::TwoSamplePooled,
        seed: 3,
        reps: 1,
    };
    let (scenario, s) = ScenarioGenerator::new(&cfg)?.summaries(0)?;
    let tau2 = iteb(&s, &ItebConfig::default())?.tau2;
    println!("estimated tau2 {tau2:.4}");

    for (label, tau2) in [("t-test", 0.0), ("iteb", tau2)] {
        for procedure in [Procedure::Bh, Procedure::Bonferroni, Procedure::Dual] {
            let alpha2 = (procedure == Procedure::Dual).then_some(0.01);
            let out = TestOutcome::run(&s, tau2, procedure, 0.1, alpha2)?;
            println!(
                "{label:>6} {procedure:?}: {:5} rejected, FDP {:.3}, sensitivity {:.3}",
                out.n_rejected(),
                fdp(&out.rejected, &scenario.non_null),
                sensitivity(&out.rejected, &scenario.non_null).unwrap_or(0.0)
            );
        }
    }
    Ok(())
}
