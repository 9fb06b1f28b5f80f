use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ScenarioConfig, ScenarioGenerator};
use crate::error::{Error, Result};
use crate::estimators::{
    central_matching, iteb, truncated_mle, CmConfig, ItebConfig, Method, TmleConfig,
};
use crate::io::fmt_f64;
use crate::summaries::GeneSummary;
use crate::testing::{bh_mask, fdp, oracle_reject, pvalue_order, pvalues, sensitivity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RocMethod {
    /// p-values at the ITEB estimate of `tau2`.
    ItebTest,
    /// p-values at `tau2 = 0`.
    TTest,
}

impl RocMethod {
    pub fn name(self) -> &'static str {
        match self {
            RocMethod::ItebTest => "iteb_test",
            RocMethod::TTest => "t_test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub rejections: usize,
    pub fdp: f64,
    pub sensitivity: f64,
}

/// Mean FDP and sensitivity over replications at each rejection count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub method: RocMethod,
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// Largest sensitivity among points with FDP at most `max_fdp`.
    pub fn sensitivity_at(&self, max_fdp: f64) -> f64 {
        self.points
            .iter()
            .filter(|p| p.fdp <= max_fdp)
            .map(|p| p.sensitivity)
            .fold(0.0, f64::max)
    }

    pub fn csv_header() -> &'static str {
        "method,rejections,fdp,sensitivity"
    }

    pub fn write_csv_rows(&self, out: &mut String) {
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.method.name(),
                p.rejections,
                fmt_f64(p.fdp),
                fmt_f64(p.sensitivity)
            ));
        }
    }
}

/// FDP and sensitivity after rejecting the `k` smallest p-values, for every
/// `k = 0..=N`.
pub fn roc_points(p: &[f64], non_null: &[bool]) -> Vec<(f64, f64)> {
    let n1 = non_null.iter().filter(|&&x| x).count();
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push((0.0, 0.0));
    let mut tp = 0usize;
    for (k, i) in pvalue_order(p).into_iter().enumerate() {
        if non_null[i] {
            tp += 1;
        }
        let r = (k + 1) as f64;
        out.push(((r - tp as f64) / r, tp as f64 / n1 as f64));
    }
    out
}

pub fn roc_experiment(config: &ScenarioConfig, method: RocMethod) -> Result<RocCurve> {
    let gen = ScenarioGenerator::new(config)?;
    if config.n_non_null() == 0 {
        return Err(Error::Input(
            "ROC curves need at least one non-null gene".into(),
        ));
    }
    let per_rep: Vec<Vec<(f64, f64)>> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let (scenario, summaries) = gen.summaries(rep)?;
            let tau2 = match method {
                RocMethod::ItebTest => iteb(&summaries, &ItebConfig::default())?.tau2,
                RocMethod::TTest => 0.0,
            };
            let p = pvalues(&summaries, tau2)?;
            Ok(roc_points(&p, &scenario.non_null))
        })
        .collect::<Result<_>>()?;

    let reps = config.reps as f64;
    let points = (0..=config.n_genes)
        .map(|k| {
            let (f, s) = per_rep
                .iter()
                .fold((0.0, 0.0), |(f, s), r| (f + r[k].0, s + r[k].1));
            RocPoint {
                rejections: k,
                fdp: f / reps,
                sensitivity: s / reps,
            }
        })
        .collect();
    Ok(RocCurve { method, points })
}

/// Mean relative error `|tau2_hat - tau2| / (tau2 + 0.1)` of one estimator
/// at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauErrorCell {
    pub tau: f64,
    pub gamma: f64,
    pub method: String,
    /// `None` when every replication failed.
    pub mean_rel_error: Option<f64>,
    pub std_error: Option<f64>,
    pub n_ok: usize,
    pub n_failed: usize,
    /// Reason of the first failure, if any.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauErrorTable {
    pub cells: Vec<TauErrorCell>,
}

impl TauErrorTable {
    pub fn get(&self, tau: f64, gamma: f64, method: &str) -> Option<&TauErrorCell> {
        self.cells
            .iter()
            .find(|c| c.tau == tau && c.gamma == gamma && c.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,gamma,method,mean_rel_error,std_error,n_ok,n_failed,failure\n");
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                fmt_f64(c.tau),
                fmt_f64(c.gamma),
                c.method,
                opt(c.mean_rel_error),
                opt(c.std_error),
                c.n_ok,
                c.n_failed,
                c.failure.as_deref().unwrap_or("")
            ));
        }
        out
    }
}

/// An estimator under test: a name and a function from summaries to `tau2`.
pub type NamedEstimator<'a> = (&'a str, &'a (dyn Fn(&[GeneSummary]) -> Result<f64> + Sync));

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Relative errors of arbitrary estimators over a `(tau, gamma)` grid.
///
/// Every estimator sees the same replications at a grid point. Failures are
/// counted per cell and do not abort the run.
pub fn tau_error_experiment_with(
    config: &ScenarioConfig,
    taus: &[f64],
    gammas: &[f64],
    estimators: &[NamedEstimator<'_>],
) -> Result<TauErrorTable> {
    if config.reps < 2 {
        return Err(Error::Input("tau error experiment needs reps >= 2".into()));
    }
    let mut cells = Vec::new();
    for &tau in taus {
        for &gamma in gammas {
            let cfg = ScenarioConfig {
                tau,
                gamma,
                ..config.clone()
            };
            let gen = ScenarioGenerator::new(&cfg)?;
            let tau2 = tau * tau;
            let per_rep: Vec<Vec<std::result::Result<f64, String>>> = (0..cfg.reps)
                .into_par_iter()
                .map(|rep| {
                    let (_, summaries) = gen.summaries(rep)?;
                    Ok(estimators
                        .iter()
                        .map(|(_, f)| match f(&summaries) {
                            Ok(est) => Ok((est - tau2).abs() / (tau2 + 0.1)),
                            Err(e) => Err(e.reason().to_string()),
                        })
                        .collect())
                })
                .collect::<Result<_>>()?;

            for (k, (name, _)) in estimators.iter().enumerate() {
                let mut ok = Vec::new();
                let mut failure = None;
                for r in &per_rep {
                    match &r[k] {
                        Ok(e) => ok.push(*e),
                        Err(reason) => {
                            failure.get_or_insert_with(|| reason.clone());
                        }
                    }
                }
                let (mean, se) = if ok.is_empty() {
                    (None, None)
                } else {
                    let (m, s) = mean_and_se(&ok);
                    (Some(m), Some(s).filter(|s| s.is_finite()))
                };
                cells.push(TauErrorCell {
                    tau,
                    gamma,
                    method: name.to_string(),
                    mean_rel_error: mean,
                    std_error: se,
                    n_ok: ok.len(),
                    n_failed: per_rep.len() - ok.len(),
                    failure,
                });
            }
        }
    }
    Ok(TauErrorTable { cells })
}

/// [`tau_error_experiment_with`] for the built-in estimators at their
/// default settings.
pub fn tau_error_experiment(
    config: &ScenarioConfig,
    taus: &[f64],
    gammas: &[f64],
    methods: &[Method],
) -> Result<TauErrorTable> {
    let run_iteb = |s: &[GeneSummary]| iteb(s, &ItebConfig::default()).map(|e| e.tau2);
    let run_tmle = |s: &[GeneSummary]| truncated_mle(s, &TmleConfig::default()).map(|e| e.tau2);
    let run_cm = |s: &[GeneSummary]| central_matching(s, &CmConfig::default()).map(|e| e.tau2);
    let estimators: Vec<NamedEstimator<'_>> = methods
        .iter()
        .map(|m| -> NamedEstimator<'_> {
            match m {
                Method::Iteb => ("iteb", &run_iteb),
                Method::Tmle => ("tmle", &run_tmle),
                Method::Cm => ("cm", &run_cm),
            }
        })
        .collect();
    tau_error_experiment_with(config, taus, gammas, &estimators)
}

/// Averages over replications of the ITEB rejection set and of fixed-level
/// tests. Powers are `None` without non-null genes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdrPowerResult {
    pub reps: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha: f64,
    /// Mean FDP of the final rejection set.
    pub mean_fdp: f64,
    pub se_fdp: f64,
    /// Mean sensitivity of the final rejection set.
    pub power: Option<f64>,
    pub se_power: Option<f64>,
    /// Mean sensitivity of `p_i <= alpha` at the estimated `tau2`.
    pub level_power: Option<f64>,
    pub se_level_power: Option<f64>,
    /// Mean sensitivity of the oracle rule at the true `tau2`.
    pub oracle_power: Option<f64>,
    pub se_oracle_power: Option<f64>,
    pub mean_rejections: f64,
    pub mean_tau2: f64,
}

impl FdrPowerResult {
    pub fn to_csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        format!(
            "reps,alpha1,alpha2,alpha,mean_fdp,se_fdp,power,se_power,level_power,se_level_power,oracle_power,se_oracle_power,mean_rejections,mean_tau2\n\
             {},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            self.reps,
            fmt_f64(self.alpha1),
            fmt_f64(self.alpha2),
            fmt_f64(self.alpha),
            fmt_f64(self.mean_fdp),
            fmt_f64(self.se_fdp),
            opt(self.power),
            opt(self.se_power),
            opt(self.level_power),
            opt(self.se_level_power),
            opt(self.oracle_power),
            opt(self.se_oracle_power),
            fmt_f64(self.mean_rejections),
            fmt_f64(self.mean_tau2),
        )
    }
}

struct RepOutcome {
    fdp: f64,
    power: Option<f64>,
    level_power: Option<f64>,
    oracle_power: Option<f64>,
    rejections: usize,
    tau2: f64,
}

/// Runs ITEB on each replication, rejects the dual-threshold set at the
/// final estimate, and compares per-gene tests at level `alpha` using the
/// estimate and the true `tau2`.
pub fn fdr_power_experiment(
    config: &ScenarioConfig,
    alpha1: f64,
    alpha2: f64,
    alpha: f64,
) -> Result<FdrPowerResult> {
    let gen = ScenarioGenerator::new(config)?;
    let iteb_cfg = ItebConfig {
        alpha1,
        alpha2,
        ..ItebConfig::default()
    };
    let true_tau2 = config.tau * config.tau;
    let outcomes: Vec<RepOutcome> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let (scenario, summaries) = gen.summaries(rep)?;
            let truth = &scenario.non_null;
            let tau2 = iteb(&summaries, &iteb_cfg)?.tau2;
            let p = pvalues(&summaries, tau2)?;
            let rejected: Vec<bool> = bh_mask(&p, alpha1)
                .into_iter()
                .zip(&p)
                .map(|(r, &pi)| r && pi <= alpha2)
                .collect();
            let level: Vec<bool> = p.iter().map(|&pi| pi <= alpha).collect();
            let oracle = oracle_reject(&summaries, true_tau2, alpha)?;
            Ok(RepOutcome {
                fdp: fdp(&rejected, truth),
                power: sensitivity(&rejected, truth),
                level_power: sensitivity(&level, truth),
                oracle_power: sensitivity(&oracle, truth),
                rejections: rejected.iter().filter(|&&r| r).count(),
                tau2,
            })
        })
        .collect::<Result<_>>()?;

    let stat = |f: &dyn Fn(&RepOutcome) -> Option<f64>| -> (Option<f64>, Option<f64>) {
        let xs: Vec<f64> = outcomes.iter().filter_map(f).collect();
        if xs.is_empty() {
            return (None, None);
        }
        let (m, s) = mean_and_se(&xs);
        (Some(m), Some(s).filter(|s| s.is_finite()))
    };
    let (mean_fdp, se_fdp) = stat(&|o| Some(o.fdp));
    let (power, se_power) = stat(&|o| o.power);
    let (level_power, se_level_power) = stat(&|o| o.level_power);
    let (oracle_power, se_oracle_power) = stat(&|o| o.oracle_power);
    let n = outcomes.len() as f64;
    Ok(FdrPowerResult {
        reps: outcomes.len(),
        alpha1,
        alpha2,
        alpha,
        mean_fdp: mean_fdp.unwrap_or(0.0),
        se_fdp: se_fdp.unwrap_or(f64::NAN),
        power,
        se_power,
        level_power,
        se_level_power,
        oracle_power,
        se_oracle_power,
        mean_rejections: outcomes.iter().map(|o| o.rejections as f64).sum::<f64>() / n,
        mean_tau2: outcomes.iter().map(|o| o.tau2).sum::<f64>() / n,
    })
}
