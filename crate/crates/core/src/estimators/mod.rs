//! Estimators of the null spreading variance `tau2`.
//!
//! - [`iteb`]: iterated empirical Bayes. Starts from all hypotheses, removes
//!   those that are both BH-significant and individually significant, and
//!   re-estimates `tau2` on the survivors until nothing more is removed.
//! - [`truncated_mle`]: maximum likelihood restricted to a central window of
//!   effect estimates, alternating over per-gene variances and `tau2`.
//! - [`central_matching`]: fits a quadratic to the log histogram near zero
//!   and matches its curvature.

mod cm;
mod iteb;
mod tmle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summaries::GeneSummary;

pub use cm::{central_matching, cm_curvature, fit_quadratic, solve_cm_equation, CmConfig};
pub use iteb::{iteb, ItebConfig};
pub use tmle::{tmle_objective, truncated_mle, TmleConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Iteb,
    Tmle,
    Cm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Iteb => "iteb",
            Method::Tmle => "tmle",
            Method::Cm => "cm",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iteb" => Ok(Method::Iteb),
            "tmle" => Ok(Method::Tmle),
            "cm" => Ok(Method::Cm),
            other => Err(Error::Input(format!("unknown estimator {other:?}"))),
        }
    }
}

/// Which end of the search interval a central-matching solution hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Lower,
    Upper,
}

/// Method-specific diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Diagnostics {
    Iteb {
        delta: f64,
        /// Indices retained in the final null set.
        surviving: Vec<usize>,
        /// Indices rejected at the final iteration.
        rejected: Vec<usize>,
        /// `tau2` on the current null set, starting with the pilot value.
        trace: Vec<f64>,
        converged: bool,
    },
    Tmle {
        delta0: f64,
        window: usize,
        /// Truncated negative log-likelihood after every half-step.
        objective: Vec<f64>,
        converged: bool,
    },
    Cm {
        delta0: f64,
        beta2: f64,
        bins_used: usize,
        boundary: Option<Boundary>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauEstimate {
    pub tau2: f64,
    pub method: Method,
    pub iterations: usize,
    pub diagnostics: Diagnostics,
}

/// Unclamped moment estimate `mean(xbar^2) - (1 + delta) mean(s2)` over the
/// genes selected by `idx`, accumulated in index order.
pub(crate) fn moment_on(summaries: &[GeneSummary], idx: impl Iterator<Item = usize>, delta: f64) -> Option<f64> {
    let mut sum_x2 = 0.0;
    let mut sum_s2 = 0.0;
    let mut n = 0usize;
    for i in idx {
        let g = &summaries[i];
        sum_x2 += g.xbar * g.xbar;
        sum_s2 += g.s2;
        n += 1;
    }
    if n == 0 {
        return None;
    }
    Some((sum_x2 - (1.0 + delta) * sum_s2) / n as f64)
}

/// Empirical Bayes moment estimate before clamping at zero.
pub fn eb_moment(summaries: &[GeneSummary], delta: f64) -> Result<f64> {
    check_delta(delta)?;
    moment_on(summaries, 0..summaries.len(), delta)
        .ok_or_else(|| Error::Input("empirical Bayes estimate needs at least one gene".into()))
}

/// Adjusted empirical Bayes estimate
/// `[mean(xbar^2) - (1 + delta) mean(s2)]_+`.
pub fn eb_pilot(summaries: &[GeneSummary], delta: f64) -> Result<f64> {
    Ok(eb_moment(summaries, delta)?.max(0.0))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::domain(format!("delta must be finite and >= 0, got {delta}")));
    }
    Ok(())
}

pub(crate) fn check_leave_out(leave_out: f64) -> Result<()> {
    if !(leave_out > 0.0 && leave_out < 1.0) {
        return Err(Error::domain(format!(
            "leave_out must lie in (0, 1), got {leave_out}"
        )));
    }
    Ok(())
}

/// Truncation radius: the empirical `1 - leave_out` quantile of `|xbar|`
/// (linear interpolation between order statistics).
pub fn truncation_radius(summaries: &[GeneSummary], leave_out: f64) -> Result<f64> {
    check_leave_out(leave_out)?;
    if summaries.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let mut abs: Vec<f64> = summaries.iter().map(|g| g.xbar.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let h = (abs.len() - 1) as f64 * (1.0 - leave_out);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(abs.len() - 1);
    Ok(abs[lo] + (h - lo as f64) * (abs[hi] - abs[lo]))
}

/// Upper end of the `tau2` search interval shared by the likelihood and
/// curvature estimators.
pub(crate) fn tau2_search_upper(summaries: &[GeneSummary]) -> Result<f64> {
    let pilot = eb_pilot(summaries, 0.0)?;
    let max_s2 = summaries.iter().map(|g| g.s2).fold(0.0, f64::max);
    Ok(3.0 * pilot + 10.0 * max_s2)
}

pub(crate) fn validate_all(summaries: &[GeneSummary]) -> Result<()> {
    summaries.iter().try_for_each(GeneSummary::validate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(xbar: f64, s2: f64) -> GeneSummary {
        GeneSummary::new("g", xbar, s2, 4.0).unwrap()
    }

    #[test]
    fn pilot_clamps_at_zero() {
        let s = vec![g(0.0, 1.0), g(0.0, 0.5)];
        assert_eq!(eb_pilot(&s, 0.0).unwrap(), 0.0);
        assert!(eb_moment(&s, 0.0).unwrap() < 0.0);
    }

    #[test]
    fn pilot_single_gene() {
        assert_eq!(eb_pilot(&[g(5f64.sqrt(), 1.0)], 0.0).unwrap(), 4.000000000000001);
        assert_eq!(eb_pilot(&[g(3.0, 1.0)], 0.5).unwrap(), 7.5);
    }

    #[test]
    fn pilot_rejects_empty_and_bad_delta() {
        assert!(eb_pilot(&[], 0.1).is_err());
        assert!(eb_pilot(&[g(1.0, 1.0)], -0.1).is_err());
    }

    #[test]
    fn radius_is_interpolated_quantile() {
        let s: Vec<GeneSummary> = (1..=5).map(|i| g(-(i as f64), 1.0)).collect();
        // |xbar| = 1..5; 0.8 quantile at h = 3.2 -> 4.2
        assert!((truncation_radius(&s, 0.2).unwrap() - 4.2).abs() < 1e-12);
        assert!(truncation_radius(&s, 1.0).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Iteb, Method::Tmle, Method::Cm] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
    }
}
