//! Special functions and the null tail of the squared Welch statistic.
//!
//! Under the null a gene's effect estimate is `xbar ~ N(0, tau2 + sigma2)`
//! and its variance estimate is `sigma2_hat ~ sigma2 * chi2_df / df`. The
//! statistic `xbar^2 / (tau2 + sigma2_hat)` is the square of a Welch
//! statistic whose first variance component (`tau2`) has infinite degrees of
//! freedom. Its upper tail is approximated by `F(1, df)` with the
//! Satterthwaite effective degrees of freedom
//! `df = (tau2 / sigma2_hat + 1)^2 * df_sigma`.
//!
//! All tails are built on the regularized incomplete beta function, which is
//! evaluated by a modified Lentz continued fraction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Iteration cap of the incomplete-beta continued fraction.
const CF_MAX_ITER: usize = 200;
/// Relative convergence threshold of the continued fraction.
const CF_EPS: f64 = 1e-14;
const CF_TINY: f64 = 1e-300;

/// Effective degrees of freedom above which the F(1, df) tail is replaced by
/// its chi-square(1) limit.
pub const DF_CAP: f64 = 1e7;

/// Bisection steps used by [`null_quantile`].
const QUANTILE_BISECTIONS: usize = 60;

/// Parameters of the null tail `F~_i` for one gene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullTailParams {
    pub sigma2_hat: f64,
    pub tau2: f64,
    pub df_sigma: f64,
}

impl NullTailParams {
    pub fn new(sigma2_hat: f64, tau2: f64, df_sigma: f64) -> Result<Self> {
        let params = NullTailParams {
            sigma2_hat,
            tau2,
            df_sigma,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2_hat >= 0.0 && self.sigma2_hat.is_finite()) {
            return Err(Error::domain(format!(
                "sigma2_hat must be finite and >= 0, got {}",
                self.sigma2_hat
            )));
        }
        if !(self.tau2 >= 0.0 && self.tau2.is_finite()) {
            return Err(Error::domain(format!(
                "tau2 must be finite and >= 0, got {}",
                self.tau2
            )));
        }
        if !(self.df_sigma > 0.0) || self.df_sigma.is_nan() {
            return Err(Error::domain(format!(
                "df_sigma must be > 0, got {}",
                self.df_sigma
            )));
        }
        Ok(())
    }

    /// Satterthwaite effective degrees of freedom, `+inf` when
    /// `sigma2_hat == 0 < tau2`.
    pub fn effective_df(&self) -> f64 {
        if self.sigma2_hat == 0.0 {
            if self.tau2 > 0.0 {
                return f64::INFINITY;
            }
            return self.df_sigma;
        }
        let ratio = self.tau2 / self.sigma2_hat + 1.0;
        ratio * ratio * self.df_sigma
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_nan() {
        return Err(Error::domain(format!("{name} is NaN")));
    }
    Ok(())
}

/// Remainder of the Stirling series for `ln Gamma(x)`, accurate for `x >= 10`.
fn stirling_correction(x: f64) -> f64 {
    let x2 = x * x;
    let inv = 1.0 / x;
    let inv2 = 1.0 / x2;
    inv * (1.0 / 12.0
        - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))))
}

/// `ln Gamma(big) - ln Gamma(big + small)` for `big >= 10`, without
/// forming the two large logarithms separately.
fn ln_gamma_ratio(big: f64, small: f64) -> f64 {
    let s = big + small;
    -(big - 0.5) * (small / big).ln_1p() - small * s.ln()
        + small
        + stirling_correction(big)
        - stirling_correction(s)
}

/// Natural logarithm of the beta function.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    let (small, big) = if a < b { (a, b) } else { (b, a) };
    if big < 10.0 {
        libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
    } else if small < 10.0 {
        libm::lgamma(small) + ln_gamma_ratio(big, small)
    } else {
        let s = a + b;
        0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * s.ln()
            + (small - 0.5) * (small / s).ln()
            + (big - 0.5) * (-small / s).ln_1p()
            + stirling_correction(small)
            + stirling_correction(big)
            - stirling_correction(s)
    }
}

/// Regularized incomplete beta function `I_x(a, b)`.
///
/// Absolute error is below `1e-12` over the parameter ranges exercised by
/// the test suite.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    check_finite("x", x)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x must lie in [0, 1], got {x}")));
    }
    inc_beta_xy(a, b, x, 1.0 - x)
}

/// `I_x(a, b)` with `y = 1 - x` supplied by the caller, so that callers who
/// can form `1 - x` without cancellation keep full precision.
fn inc_beta_xy(a: f64, b: f64, x: f64, y: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(Error::domain(format!(
            "beta parameters must be finite and > 0, got a={a}, b={b}"
        )));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if y <= 0.0 {
        return Ok(1.0);
    }
    if x > (a + 1.0) / (a + b + 2.0) {
        Ok(1.0 - beta_cf_term(b, a, y, x)?)
    } else {
        beta_cf_term(a, b, x, y)
    }
}

/// `x^a y^b / (a B(a, b))` times the continued fraction.
fn beta_cf_term(a: f64, b: f64, x: f64, y: f64) -> Result<f64> {
    let ln_x = if x > 0.5 { (-y).ln_1p() } else { x.ln() };
    let ln_y = if y > 0.5 { (-x).ln_1p() } else { y.ln() };
    let ln_prefix = a * ln_x + b * ln_y - ln_beta(a, b);
    let cf = beta_cf(a, b, x)?;
    Ok((ln_prefix.exp() / a) * cf)
}

fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let clamp = |v: f64| if v.abs() < CF_TINY { CF_TINY } else { v };

    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - qab * x / qap);
    let mut h = d;

    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let even = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / clamp(1.0 + even * d);
        c = clamp(1.0 + even / c);
        h *= d * c;

        let odd = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / clamp(1.0 + odd * d);
        c = clamp(1.0 + odd / c);
        let delta = d * c;
        h *= delta;

        if (delta - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(Error::Numeric(format!(
        "incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )))
}

/// Upper tail of the standard normal, `P(Z > z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// Upper tail of Student's t with `nu` (real, > 0) degrees of freedom.
pub fn student_t_sf(t: f64, nu: f64) -> Result<f64> {
    check_finite("t", t)?;
    if !(nu > 0.0) || nu.is_infinite() {
        return Err(Error::domain(format!(
            "t degrees of freedom must be finite and > 0, got {nu}"
        )));
    }
    let abs_t = t.abs();
    let upper = if abs_t.is_infinite() {
        0.0
    } else {
        let t2 = abs_t * abs_t;
        let denom = nu + t2;
        0.5 * inc_beta_xy(nu / 2.0, 0.5, nu / denom, t2 / denom)?
    };
    Ok(if t >= 0.0 { upper } else { 1.0 - upper })
}

/// Upper tail of the F distribution with `(d1, d2)` degrees of freedom.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_finite("x", x)?;
    if x < 0.0 {
        return Err(Error::domain(format!("F statistic must be >= 0, got {x}")));
    }
    for (name, d) in [("d1", d1), ("d2", d2)] {
        if !(d > 0.0) || d.is_infinite() {
            return Err(Error::domain(format!(
                "{name} must be finite and > 0, got {d}"
            )));
        }
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let scaled = d1 * x;
    let denom = d2 + scaled;
    inc_beta_xy(d2 / 2.0, d1 / 2.0, d2 / denom, scaled / denom)
}

/// Null tail `F~_i(t)` of the squared Welch statistic, approximated by
/// `F(1, df)` at the Satterthwaite effective degrees of freedom.
pub fn null_sf(t: f64, params: &NullTailParams) -> Result<f64> {
    check_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::domain(format!("tail point must be >= 0, got {t}")));
    }
    params.validate()?;
    if t == 0.0 {
        return Ok(1.0);
    }
    if params.sigma2_hat == 0.0 && params.tau2 == 0.0 {
        return Err(Error::domain(
            "sigma2_hat and tau2 are both zero; the null tail is degenerate",
        ));
    }
    let df = params.effective_df();
    let p = if df >= DF_CAP {
        2.0 * normal_sf(t.sqrt())
    } else {
        f_sf(t, 1.0, df)?
    };
    Ok(p.max(f64::MIN_POSITIVE))
}

/// Inverse of [`null_sf`]: the `t >= 0` with `null_sf(t) = p`.
pub fn null_quantile(p: f64, params: &NullTailParams) -> Result<f64> {
    check_finite("p", p)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!("p must lie in (0, 1], got {p}")));
    }
    params.validate()?;
    if p == 1.0 {
        return Ok(0.0);
    }

    // Bracket [lo, hi] with sf(lo) > p >= sf(hi) and hi <= 2 lo (or lo = 0).
    let sf = |t: f64| null_sf(t, params);
    let mut lo = 0.0;
    let mut hi = 1.0;
    if sf(hi)? > p {
        loop {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Numeric(format!("cannot bracket quantile p={p}")));
            }
            if sf(hi)? <= p {
                break;
            }
        }
    } else {
        while hi > f64::MIN_POSITIVE {
            let half = hi / 2.0;
            if sf(half)? > p {
                lo = half;
                break;
            }
            hi = half;
        }
    }

    for _ in 0..QUANTILE_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if sf(mid)? > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A Monte-Carlo tail estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Monte-Carlo estimate of `P(xbar^2 / (tau2 + sigma2_hat) > t)` under the
/// exact sampling model, with `xbar ~ N(0, tau2 + sigma2)` and
/// `sigma2_hat ~ sigma2 * chi2_df / df`.
pub fn null_sf_mc_oracle(
    t: f64,
    sigma2: f64,
    tau2: f64,
    df_sigma: f64,
    n_draws: usize,
    seed: u64,
) -> Result<McEstimate> {
    Ok(null_sf_mc_oracle_many(&[t], sigma2, tau2, df_sigma, n_draws, seed)?[0])
}

/// [`null_sf_mc_oracle`] evaluated at several tail points from one set of
/// draws.
pub fn null_sf_mc_oracle_many(
    ts: &[f64],
    sigma2: f64,
    tau2: f64,
    df_sigma: f64,
    n_draws: usize,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    if n_draws < 10_000 {
        return Err(Error::domain(format!(
            "Monte-Carlo oracle needs at least 1e4 draws, got {n_draws}"
        )));
    }
    NullTailParams::new(sigma2, tau2, df_sigma)?;
    if ts.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::domain("tail points must be >= 0"));
    }
    let chi2 = ChiSquared::new(df_sigma)
        .map_err(|e| Error::domain(format!("chi-square df {df_sigma}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = (tau2 + sigma2).sqrt();
    let mut exceed = vec![0u64; ts.len()];
    for _ in 0..n_draws {
        let z: f64 = rng.sample(StandardNormal);
        let xbar = sd * z;
        let s2 = sigma2 * chi2.sample(&mut rng) / df_sigma;
        let stat = xbar * xbar / (tau2 + s2);
        for (count, &t) in exceed.iter_mut().zip(ts) {
            if stat > t {
                *count += 1;
            }
        }
    }
    let n = n_draws as f64;
    Ok(exceed
        .into_iter()
        .map(|c| {
            let p = c as f64 / n;
            McEstimate {
                estimate: p,
                std_error: (p * (1.0 - p) / n).sqrt(),
            }
        })
        .collect())
}
