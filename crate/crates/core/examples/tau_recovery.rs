//! Relative error of the estimators over a `(tau, gamma)` grid.
//!
//! cargo run --release --example tau_recovery

use iteb::simulation::{tau_error_experiment, Design, Noise, ScenarioConfig, VarianceSource};
use iteb::Method;

fn main() -> iteb::Result<()> {
    let cfg = ScenarioConfig {
        n_genes: 15_000,
        m1: 10,
        m0: 0,
        gamma: 0.0,
        tau: 0.0,
        noise: Noise::Laplacian,
        variance_source: VarianceSource::EmpiricalFile(
            concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/variances_lognormal.txt").into(),
        ),
        design: Design::OneSample,
        seed: 9,
        reps: 5,
    };
    let table = tau_error_experiment(
        &cfg,
        &[0.0, 0.5, 1.0, 2.0],
        &[0.01, 0.05],
        &[Method::Iteb, Method::Tmle, Method::Cm],
    )?;
    print!("{}", table.to_csv());
    Ok(())
}
