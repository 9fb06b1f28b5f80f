use serde::{Deserialize, Serialize};

use super::{check_delta, moment_on, validate_all, Diagnostics, Method, TauEstimate};
use crate::error::{Error, Result};
use crate::summaries::GeneSummary;
use crate::testing::{bh_mask, pvalues};

/// Settings of the iterated empirical Bayes estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ItebConfig {
    /// BH level.
    pub alpha1: f64,
    /// Per-hypothesis p-value cutoff.
    pub alpha2: f64,
    /// Inflation of the variance correction; `None` means `sqrt(8 / N)`.
    pub delta: Option<f64>,
    /// Iteration guard; `None` means `N`.
    pub max_iterations: Option<usize>,
}

impl Default for ItebConfig {
    fn default() -> Self {
        ItebConfig {
            alpha1: 0.1,
            alpha2: 0.01,
            delta: None,
            max_iterations: None,
        }
    }
}

impl ItebConfig {
    pub fn resolved_delta(&self, n: usize) -> f64 {
        self.delta.unwrap_or_else(|| (8.0 / n as f64).sqrt())
    }

    fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::domain(format!("{name} must lie in (0, 1), got {a}")));
            }
        }
        if let Some(d) = self.delta {
            check_delta(d)?;
        }
        if self.max_iterations == Some(0) {
            return Err(Error::domain("max_iterations must be positive"));
        }
        Ok(())
    }
}

/// Iterated empirical Bayes estimate of `tau2`.
///
/// Each round computes p-values for all hypotheses at the current estimate,
/// removes from the null set those rejected by BH at `alpha1` whose p-value
/// is also at most `alpha2`, and re-estimates `tau2` on what remains. The
/// loop ends at the first round that removes nothing.
pub fn iteb(summaries: &[GeneSummary], config: &ItebConfig) -> Result<TauEstimate> {
    config.validate()?;
    let n = summaries.len();
    if n < 2 {
        return Err(Error::Input(format!(
            "iterated estimation needs at least 2 hypotheses, got {n}"
        )));
    }
    validate_all(summaries)?;
    let delta = config.resolved_delta(n);
    let max_iterations = config.max_iterations.unwrap_or(n);

    let mut in_null = vec![true; n];
    let estimate_on = |in_null: &[bool]| -> Option<f64> {
        moment_on(summaries, (0..n).filter(|&i| in_null[i]), delta).map(|v| v.max(0.0))
    };

    let mut tau2 = estimate_on(&in_null).expect("nonempty");
    let mut trace = vec![tau2];
    let mut rejected = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iterations {
        iterations += 1;
        let p = pvalues(summaries, tau2)?;
        let bh = bh_mask(&p, config.alpha1);
        rejected = (0..n)
            .filter(|&i| bh[i] && p[i] <= config.alpha2)
            .collect::<Vec<_>>();

        let mut removed_any = false;
        for &i in &rejected {
            if in_null[i] {
                in_null[i] = false;
                removed_any = true;
            }
        }
        if !removed_any {
            converged = true;
            break;
        }
        tau2 = estimate_on(&in_null).ok_or(Error::AllRemoved)?;
        trace.push(tau2);
    }

    Ok(TauEstimate {
        tau2,
        method: Method::Iteb,
        iterations,
        diagnostics: Diagnostics::Iteb {
            delta,
            surviving: (0..n).filter(|&i| in_null[i]).collect(),
            rejected,
            trace,
            converged,
        },
    })
}
