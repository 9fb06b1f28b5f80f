use serde::{Deserialize, Serialize};

use super::{
    check_leave_out, tau2_search_upper, truncation_radius, validate_all, Boundary, Diagnostics,
    Method, TauEstimate,
};
use crate::error::{Error, Result};
use crate::optimize::{bisect_decreasing, Root};
use crate::summaries::GeneSummary;

const MIN_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CmConfig {
    pub leave_out: f64,
    pub n_bins: usize,
    /// Width of the final `tau2` bracket.
    pub grid_tol: f64,
}

impl Default for CmConfig {
    fn default() -> Self {
        CmConfig {
            leave_out: 0.2,
            n_bins: 120,
            grid_tol: 1e-6,
        }
    }
}

/// Least-squares coefficients `[b0, b1, b2]` of `y ~ b0 + b1 x + b2 x^2`.
pub fn fit_quadratic(xs: &[f64], ys: &[f64]) -> Result<[f64; 3]> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::Input(
            "quadratic fit needs at least 3 paired points".into(),
        ));
    }
    // Normal equations, centered and scaled for conditioning.
    let n = xs.len() as f64;
    let center = xs.iter().sum::<f64>() / n;
    let scale = xs
        .iter()
        .map(|x| (x - center).abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let u = (x - center) / scale;
        let row = [1.0, u, u * u];
        for r in 0..3 {
            aty[r] += row[r] * y;
            for c in 0..3 {
                ata[r][c] += row[r] * row[c];
            }
        }
    }
    let c = solve3(ata, aty)
        .ok_or_else(|| Error::Numeric("quadratic fit is singular".into()))?;
    // Back to the original variable: y = c0 + c1 u + c2 u^2, u = (x - m) / s.
    let (m, s) = (center, scale);
    let b2 = c[2] / (s * s);
    let b1 = c[1] / s - 2.0 * c[2] * m / (s * s);
    let b0 = c[0] - c[1] * m / s + c[2] * m * m / (s * s);
    Ok([b0, b1, b2])
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Curvature implied by a Gaussian mixture null:
/// `sum v_i^(-3/2) / (2 sum v_i^(-1/2))` with `v_i = s2_i + tau2`.
pub fn cm_curvature(variances: &[f64], tau2: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for &s2 in variances {
        let v = s2 + tau2;
        let r = 1.0 / v.sqrt();
        num += r * r * r;
        den += r;
    }
    num / (2.0 * den)
}

/// Solves `cm_curvature(variances, tau2) = beta2` on `[0, upper]`.
///
/// The curvature decreases in `tau2`. When the root lies outside the
/// interval the nearer end is returned together with the end that was hit;
/// an exact root at zero is not flagged.
pub fn solve_cm_equation(
    beta2: f64,
    variances: &[f64],
    upper: f64,
    tol: f64,
) -> (f64, Option<Boundary>) {
    let f = |t: f64| cm_curvature(variances, t) - beta2;
    match bisect_decreasing(f, 0.0, upper, tol) {
        Root::Interior(t) => (t, None),
        Root::BelowLower(t) => {
            if f(0.0) == 0.0 {
                (t, None)
            } else {
                (t, Some(Boundary::Lower))
            }
        }
        Root::AboveUpper(t) => (t, Some(Boundary::Upper)),
    }
}

/// Central-matching estimate of `tau2`.
///
/// Histograms `xbar` over `n_bins` equal bins on `[-delta0, delta0]`, fits a
/// quadratic to the negative log density of the populated bins, and finds
/// the `tau2` whose implied curvature matches the fitted `x^2` coefficient.
pub fn central_matching(summaries: &[GeneSummary], config: &CmConfig) -> Result<TauEstimate> {
    check_leave_out(config.leave_out)?;
    if config.n_bins < MIN_BINS {
        return Err(Error::domain(format!(
            "central matching needs at least {MIN_BINS} bins"
        )));
    }
    if !(config.grid_tol > 0.0) {
        return Err(Error::domain("grid_tol must be positive"));
    }
    validate_all(summaries)?;
    let delta0 = truncation_radius(summaries, config.leave_out)?;
    if !(delta0 > 0.0) {
        return Err(Error::EmptyWindow);
    }
    let width = 2.0 * delta0 / config.n_bins as f64;
    let mut counts = vec![0usize; config.n_bins];
    for g in summaries {
        if g.xbar.abs() < delta0 {
            let k = (((g.xbar + delta0) / width) as usize).min(config.n_bins - 1);
            counts[k] += 1;
        }
    }
    let n = summaries.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| {
            let center = -delta0 + (k as f64 + 0.5) * width;
            (center, -(c as f64 / (n * width)).ln())
        })
        .unzip();
    if xs.len() < MIN_BINS {
        return Err(Error::Numeric(format!(
            "central matching needs at least {MIN_BINS} populated bins, got {}",
            xs.len()
        )));
    }
    let [_, _, beta2] = fit_quadratic(&xs, &ys)?;
    if !(beta2 > 0.0) {
        return Err(Error::CentralMatchingFailed { beta2 });
    }

    let variances: Vec<f64> = summaries.iter().map(|g| g.s2).collect();
    let upper = tau2_search_upper(summaries)?;
    let (tau2, boundary) = solve_cm_equation(beta2, &variances, upper, config.grid_tol);

    Ok(TauEstimate {
        tau2: tau2.max(0.0),
        method: Method::Cm,
        iterations: 1,
        diagnostics: Diagnostics::Cm {
            delta0,
            beta2,
            bins_used: xs.len(),
            boundary,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_fit_recovers_exact_coefficients() {
        let xs: Vec<f64> = (0..15).map(|i| i as f64 * 0.3 - 1.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.7 - 1.1 * x + 2.5 * x * x).collect();
        let [b0, b1, b2] = fit_quadratic(&xs, &ys).unwrap();
        assert!((b0 - 0.7).abs() < 1e-12);
        assert!((b1 + 1.1).abs() < 1e-12);
        assert!((b2 - 2.5).abs() < 1e-12);
    }

    #[test]
    fn curvature_decreases_in_tau2() {
        let v = [0.1, 0.5, 2.0, 0.05];
        let mut last = f64::INFINITY;
        for k in 0..50 {
            let c = cm_curvature(&v, k as f64 * 0.1);
            assert!(c < last);
            last = c;
        }
    }

    #[test]
    fn root_at_zero_is_exact() {
        let v = [0.3, 0.8, 1.7];
        let beta2 = cm_curvature(&v, 0.0);
        assert_eq!(solve_cm_equation(beta2, &v, 10.0, 1e-9), (0.0, None));
        let (t, b) = solve_cm_equation(beta2 * 2.0, &v, 10.0, 1e-9);
        assert_eq!((t, b), (0.0, Some(Boundary::Lower)));
        let (t, b) = solve_cm_equation(1e-9, &v, 10.0, 1e-9);
        assert_eq!((t, b), (10.0, Some(Boundary::Upper)));
    }

    #[test]
    fn exact_gaussian_density_recovers_tau2() {
        let (s, tau2, tol) = (0.4, 1.3, 1e-9);
        let w = s + tau2;
        let xs: Vec<f64> = (0..40).map(|i| -1.5 + i as f64 * 3.0 / 39.0).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 0.5 * (2.0 * std::f64::consts::PI * w).ln() + x * x / (2.0 * w))
            .collect();
        let [_, _, beta2] = fit_quadratic(&xs, &ys).unwrap();
        let (est, boundary) = solve_cm_equation(beta2, &[s; 25], 20.0, tol);
        assert!(boundary.is_none());
        assert!((est - tau2).abs() <= tol);
    }

    #[test]
    fn flat_histogram_fails() {
        // Density proportional to |x| near zero: the negative log density
        // is concave.
        let s: Vec<GeneSummary> = (0..5000)
            .map(|i| {
                let u = (i as f64 + 0.5) / 5000.0;
                let x = (u - 0.5) * 2.0;
                GeneSummary::new("g", x.signum() * x.abs().sqrt(), 0.1, 5.0).unwrap()
            })
            .collect();
        assert!(matches!(
            central_matching(&s, &CmConfig::default()),
            Err(Error::CentralMatchingFailed { .. })
        ));
    }
}
