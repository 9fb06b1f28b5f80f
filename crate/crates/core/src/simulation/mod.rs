//! Synthetic scenarios and experiment drivers.
//!
//! A scenario has `N` genes of which the first `floor(gamma * N)` are
//! non-null. Null effects are drawn from `N(0, tau^2)`; non-null effects
//! have magnitude `U[1, max(3, 10 tau)]`, with the first half (by index)
//! positive and the rest negative. Per-gene replicate variances come from
//! the configured source and, except for a constant source, are rescaled to
//! mean 1. Experiment replicates are `mu_i + noise`, control replicates are
//! pure noise.
//!
//! Replication `r` draws from a ChaCha8 stream seeded with `seed ^ r`, so a
//! replication does not depend on which others were run or in what order.

mod experiments;

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::read_variances_file;
use crate::summaries::{
    summarize_one_sample, summarize_paired, summarize_pooled, summarize_welch, GeneSummary, Group,
    ReplicateMatrix,
};

pub use experiments::{
    fdr_power_experiment, roc_experiment, tau_error_experiment, tau_error_experiment_with,
    roc_points, FdrPowerResult, NamedEstimator, RocCurve, RocMethod, RocPoint, TauErrorCell,
    TauErrorTable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Noise {
    Gaussian,
    /// Laplace noise with scale `sigma / sqrt(2)`, matching the Gaussian
    /// variance.
    Laplacian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceSource {
    /// `sigma_i^2 ~ chi^2_1`, rescaled to mean 1.
    Chisq1,
    /// Resampled from a one-column file of variances, rescaled to mean 1.
    EmpiricalFile(PathBuf),
    /// Every gene gets this variance; not rescaled.
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    TwoSamplePooled,
    Paired,
    Welch,
    /// Only the `m1` experiment replicates; `m0` is ignored.
    OneSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_genes: usize,
    pub m1: usize,
    #[serde(default)]
    pub m0: usize,
    pub gamma: f64,
    pub tau: f64,
    #[serde(default = "default_noise")]
    pub noise: Noise,
    #[serde(default = "default_variance_source")]
    pub variance_source: VarianceSource,
    #[serde(default = "default_design")]
    pub design: Design,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_reps")]
    pub reps: usize,
}

fn default_noise() -> Noise {
    Noise::Gaussian
}

fn default_variance_source() -> VarianceSource {
    VarianceSource::Chisq1
}

fn default_design() -> Design {
    Design::TwoSamplePooled
}

fn default_reps() -> usize {
    1
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_genes == 0 {
            return Err(Error::Input("n_genes must be positive".into()));
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(Error::Input(format!("gamma must lie in [0, 1), got {}", self.gamma)));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::Input(format!("tau must be finite and >= 0, got {}", self.tau)));
        }
        if self.reps == 0 {
            return Err(Error::Input("reps must be positive".into()));
        }
        match self.design {
            Design::OneSample if self.m1 < 2 => {
                return Err(Error::Design("one-sample design needs m1 >= 2".into()))
            }
            Design::Paired if self.m1 < 2 || self.m1 != self.m0 => {
                return Err(Error::Design("paired design needs m1 = m0 >= 2".into()))
            }
            Design::TwoSamplePooled | Design::Welch if self.m1 < 2 || self.m0 < 2 => {
                return Err(Error::Design("two-sample designs need m1, m0 >= 2".into()))
            }
            _ => {}
        }
        if let VarianceSource::Constant(v) = self.variance_source {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Input(format!("constant variance must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Number of non-null genes, `floor(gamma * N)`.
    pub fn n_non_null(&self) -> usize {
        (self.gamma * self.n_genes as f64).floor() as usize
    }

    /// Degrees of freedom of the per-gene variance estimates.
    pub fn df_sigma(&self) -> f64 {
        match self.design {
            Design::OneSample | Design::Paired => (self.m1 - 1) as f64,
            // Welch df varies by gene; this is its upper end.
            Design::TwoSamplePooled | Design::Welch => (self.m1 + self.m0 - 2) as f64,
        }
    }

    fn n_columns(&self) -> usize {
        match self.design {
            Design::OneSample => self.m1,
            _ => self.m1 + self.m0,
        }
    }
}

/// One generated replication with its ground truth.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub matrix: ReplicateMatrix,
    pub non_null: Vec<bool>,
    pub mu: Vec<f64>,
    /// Per-replicate noise variance of each gene.
    pub sigma2: Vec<f64>,
}

impl Scenario {
    /// Summaries under the design that generated the data.
    pub fn summarize(&self, design: Design) -> Result<Vec<GeneSummary>> {
        match design {
            Design::TwoSamplePooled => summarize_pooled(&self.matrix),
            Design::Paired => summarize_paired(&self.matrix),
            Design::Welch => summarize_welch(&self.matrix),
            Design::OneSample => summarize_one_sample(&self.matrix),
        }
    }
}

/// A validated configuration with any variance file already loaded.
#[derive(Debug, Clone)]
pub struct ScenarioGenerator {
    config: ScenarioConfig,
    empirical: Vec<f64>,
    gene_ids: Vec<String>,
    sample_ids: Vec<String>,
    groups: Vec<Group>,
    batches: Vec<Option<String>>,
}

impl ScenarioGenerator {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let empirical = match &config.variance_source {
            VarianceSource::EmpiricalFile(path) => {
                let v = read_variances_file(path).map_err(|e| match e {
                    Error::Io(io) => Error::Input(format!(
                        "cannot read variance file {}: {io}",
                        path.display()
                    )),
                    other => other,
                })?;
                if !v.iter().any(|&x| x > 0.0) {
                    return Err(Error::Input("variance file has no positive value".into()));
                }
                v
            }
            _ => Vec::new(),
        };

        let (sample_ids, groups, batches) = match config.design {
            Design::OneSample => (
                (1..=config.m1).map(|j| format!("x{j}")).collect(),
                vec![Group::Experiment; config.m1],
                vec![None; config.m1],
            ),
            design => {
                let mut ids: Vec<String> = (1..=config.m1).map(|j| format!("x{j}")).collect();
                ids.extend((1..=config.m0).map(|j| format!("z{j}")));
                let mut groups = vec![Group::Experiment; config.m1];
                groups.extend(vec![Group::Control; config.m0]);
                let batches = if design == Design::Paired {
                    (1..=config.m1)
                        .chain(1..=config.m0)
                        .map(|j| Some(format!("p{j}")))
                        .collect()
                } else {
                    vec![None; config.m1 + config.m0]
                };
                (ids, groups, batches)
            }
        };

        Ok(ScenarioGenerator {
            config: config.clone(),
            empirical,
            gene_ids: (1..=config.n_genes).map(|i| format!("g{i}")).collect(),
            sample_ids,
            groups,
            batches,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// Replication `rep`; a pure function of the configuration and `rep`.
    pub fn generate(&self, rep: usize) -> Scenario {
        let c = &self.config;
        let n = c.n_genes;
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed ^ rep as u64);

        let n1 = c.n_non_null();
        let n_pos = n1 / 2;
        let top = 3f64.max(10.0 * c.tau);
        let mut mu = Vec::with_capacity(n);
        for i in 0..n {
            if i < n1 {
                let mag = rng.random_range(1.0..=top);
                mu.push(if i < n_pos { mag } else { -mag });
            } else {
                let z: f64 = StandardNormal.sample(&mut rng);
                mu.push(c.tau * z);
            }
        }
        let non_null = (0..n).map(|i| i < n1).collect();

        let mut sigma2: Vec<f64> = match &c.variance_source {
            VarianceSource::Chisq1 => {
                let chi = ChiSquared::new(1.0).expect("valid df");
                (0..n).map(|_| chi.sample(&mut rng)).collect()
            }
            VarianceSource::EmpiricalFile(_) => (0..n)
                .map(|_| self.empirical[rng.random_range(0..self.empirical.len())])
                .collect(),
            VarianceSource::Constant(v) => vec![*v; n],
        };
        if !matches!(c.variance_source, VarianceSource::Constant(_)) {
            let mean = sigma2.iter().sum::<f64>() / n as f64;
            if mean > 0.0 {
                sigma2.iter_mut().for_each(|s| *s /= mean);
            }
        }

        let m = c.n_columns();
        let mut values = Vec::with_capacity(n * m);
        for i in 0..n {
            let sd = sigma2[i].sqrt();
            for j in 0..m {
                let e = draw_noise(c.noise, sd, &mut rng);
                let mean = if self.groups[j] == Group::Experiment { mu[i] } else { 0.0 };
                values.push(mean + e);
            }
        }
        let matrix = ReplicateMatrix::new(
            self.gene_ids.clone(),
            self.sample_ids.clone(),
            self.groups.clone(),
            self.batches.clone(),
            values,
        )
        .expect("generated matrix is well formed");

        Scenario {
            matrix,
            non_null,
            mu,
            sigma2,
        }
    }

    pub fn summaries(&self, rep: usize) -> Result<(Scenario, Vec<GeneSummary>)> {
        let s = self.generate(rep);
        let summaries = s.summarize(self.config.design)?;
        Ok((s, summaries))
    }
}

fn draw_noise(noise: Noise, sd: f64, rng: &mut ChaCha8Rng) -> f64 {
    match noise {
        Noise::Gaussian => {
            let z: f64 = StandardNormal.sample(rng);
            sd * z
        }
        Noise::Laplacian => {
            let e: f64 = Exp1.sample(rng);
            let b = sd / std::f64::consts::SQRT_2;
            if rng.random::<bool>() {
                b * e
            } else {
                -b * e
            }
        }
    }
}

/// Generates replication `rep` of `config`.
pub fn gen_scenario(config: &ScenarioConfig, rep: usize) -> Result<Scenario> {
    Ok(ScenarioGenerator::new(config)?.generate(rep))
}
