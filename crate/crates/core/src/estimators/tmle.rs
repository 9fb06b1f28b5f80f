use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_leave_out, tau2_search_upper, truncation_radius, validate_all, Diagnostics, Method,
    TauEstimate,
};
use crate::error::{Error, Result};
use crate::optimize::golden_section;
use crate::summaries::GeneSummary;

/// Relative tolerance of the inner one-dimensional searches.
const INNER_TOL: f64 = 1e-8;
/// Minimum number of genes inside the truncation window.
const MIN_WINDOW: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TmleConfig {
    /// Fraction of genes (largest `|xbar|`) left outside the window.
    pub leave_out: f64,
    /// Outer stopping rule: `|change in tau2| <= tol * (tau2 + 0.1)`.
    pub tol: f64,
    pub max_outer: usize,
}

impl Default for TmleConfig {
    fn default() -> Self {
        TmleConfig {
            leave_out: 0.2,
            tol: 1e-6,
            max_outer: 500,
        }
    }
}

/// Probability mass of `N(0, w)` inside `(-delta0, delta0)`.
fn window_mass(delta0: f64, w: f64) -> f64 {
    libm::erf(delta0 / (2.0 * w).sqrt())
}

/// Terms of the truncated negative log-likelihood that involve `tau2`.
fn tau_terms(xbar: f64, v: f64, tau2: f64, delta0: f64) -> f64 {
    let w = tau2 + v;
    window_mass(delta0, w).ln() + 0.5 * w.ln() + xbar * xbar / (2.0 * w)
}

/// Per-gene terms in `v = var(xbar)`; `s2` carries `df` degrees of freedom.
fn gene_objective(g: &GeneSummary, v: f64, tau2: f64, delta0: f64) -> f64 {
    tau_terms(g.xbar, v, tau2, delta0)
        + 0.5 * g.df_sigma * v.ln()
        + g.df_sigma * g.s2 / (2.0 * v)
}

/// Truncated negative log-likelihood (up to a constant) of the window genes
/// at `tau2` and per-gene variances `v`, summed in index order.
pub fn tmle_objective(window: &[GeneSummary], v: &[f64], tau2: f64, delta0: f64) -> f64 {
    window
        .iter()
        .zip(v)
        .map(|(g, &vi)| gene_objective(g, vi, tau2, delta0))
        .sum()
}

/// Truncated maximum-likelihood estimate of `tau2`.
///
/// Keeps genes with `|xbar| < delta0`, where `delta0` is the `1 - leave_out`
/// quantile of `|xbar|`, and minimizes the truncated negative
/// log-likelihood by alternating golden-section searches: per-gene
/// variances (on a log scale) with `tau2` fixed, then `tau2` with the
/// variances fixed. Starts from `tau2 = 0` and the observed variances; a
/// half-step is only accepted when it does not increase the objective.
pub fn truncated_mle(summaries: &[GeneSummary], config: &TmleConfig) -> Result<TauEstimate> {
    check_leave_out(config.leave_out)?;
    if !(config.tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    validate_all(summaries)?;
    let delta0 = truncation_radius(summaries, config.leave_out)?;
    let window: Vec<GeneSummary> = summaries
        .iter()
        .filter(|g| g.xbar.abs() < delta0)
        .cloned()
        .collect();
    if window.len() < MIN_WINDOW {
        return Err(Error::EmptyWindow);
    }

    let mean_s2 = window.iter().map(|g| g.s2).sum::<f64>() / window.len() as f64;
    let s2_floor = if mean_s2 > 0.0 { 1e-8 * mean_s2 } else { 1e-12 };
    let upper = tau2_search_upper(summaries)?.max(delta0 * delta0);

    let mut v: Vec<f64> = window.iter().map(|g| g.s2.max(s2_floor)).collect();
    let mut tau2 = 0.0;
    let mut current = tmle_objective(&window, &v, tau2, delta0);
    if !current.is_finite() {
        return Err(Error::NonFinite("initial truncated likelihood".into()));
    }
    let mut objective = vec![current];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_outer {
        iterations += 1;

        // Variances with tau2 fixed; genes are independent.
        let t = tau2;
        v = window
            .par_iter()
            .zip(v.par_iter())
            .map(|(g, &v_old)| {
                let center = g.s2.max(s2_floor);
                let f = |u: f64| gene_objective(g, u.exp(), t, delta0);
                let best = golden_section(
                    f,
                    (center * 1e-6).ln(),
                    (center * 1e6).ln(),
                    INNER_TOL,
                    1.0,
                );
                if best.value < gene_objective(g, v_old, t, delta0) {
                    best.x.exp()
                } else {
                    v_old
                }
            })
            .collect();
        current = tmle_objective(&window, &v, tau2, delta0);
        objective.push(current);

        // tau2 with variances fixed.
        let profile = |t2: f64| -> f64 {
            window
                .iter()
                .zip(&v)
                .map(|(g, &vi)| tau_terms(g.xbar, vi, t2, delta0))
                .sum()
        };
        let best = golden_section(profile, 0.0, upper, INNER_TOL, 1e-6 * mean_s2.max(1e-12));
        let previous = tau2;
        if best.value < profile(tau2) {
            tau2 = best.x;
        }
        current = tmle_objective(&window, &v, tau2, delta0);
        if !current.is_finite() {
            return Err(Error::NonFinite("truncated likelihood".into()));
        }
        objective.push(current);

        if (tau2 - previous).abs() <= config.tol * (previous + 0.1) {
            converged = true;
            break;
        }
    }

    Ok(TauEstimate {
        tau2,
        method: Method::Tmle,
        iterations,
        diagnostics: Diagnostics::Tmle {
            delta0,
            window: window.len(),
            objective,
            converged,
        },
    })
}
