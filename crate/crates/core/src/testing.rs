//! p-values and rejection rules.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{null_quantile, null_sf, NullTailParams};
use crate::error::{Error, Result};
use crate::summaries::GeneSummary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Procedure {
    Bh,
    Bonferroni,
    Dual,
}

impl std::str::FromStr for Procedure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bh" => Ok(Procedure::Bh),
            "bonferroni" => Ok(Procedure::Bonferroni),
            "dual" => Ok(Procedure::Dual),
            other => Err(Error::Input(format!("unknown procedure {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub pvalues: Vec<f64>,
    pub rejected: Vec<bool>,
    pub procedure: Procedure,
    pub alpha1: f64,
    pub alpha2: Option<f64>,
    pub tau2_used: f64,
}

impl TestOutcome {
    /// Computes p-values at `tau2` and applies `procedure`. `alpha2` is only
    /// used by [`Procedure::Dual`], where it is required.
    pub fn run(
        summaries: &[GeneSummary],
        tau2: f64,
        procedure: Procedure,
        alpha1: f64,
        alpha2: Option<f64>,
    ) -> Result<Self> {
        check_level("alpha1", alpha1)?;
        let p = pvalues(summaries, tau2)?;
        let (rejected, alpha2) = match procedure {
            Procedure::Bh => (bh_mask(&p, alpha1), None),
            Procedure::Bonferroni => (bonferroni_mask(&p, alpha1), None),
            Procedure::Dual => {
                let a2 = alpha2
                    .ok_or_else(|| Error::Input("dual threshold needs alpha2".into()))?;
                if !(0.0..=1.0).contains(&a2) {
                    return Err(Error::domain(format!("alpha2 must lie in [0, 1], got {a2}")));
                }
                (dual_mask(&p, alpha1, a2), Some(a2))
            }
        };
        Ok(TestOutcome {
            pvalues: p,
            rejected,
            procedure,
            alpha1,
            alpha2,
            tau2_used: tau2,
        })
    }

    pub fn n_rejected(&self) -> usize {
        self.rejected.iter().filter(|&&r| r).count()
    }
}

fn check_level(name: &str, a: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::domain(format!("{name} must lie in (0, 1], got {a}")));
    }
    Ok(())
}

fn pvalue(g: &GeneSummary, tau2: f64) -> Result<f64> {
    let var = tau2 + g.s2;
    if var == 0.0 {
        return Ok(if g.xbar == 0.0 { 1.0 } else { f64::MIN_POSITIVE });
    }
    let params = NullTailParams::new(g.s2, tau2, g.df_sigma)?;
    null_sf(g.xbar * g.xbar / var, &params)
}

/// Two-sided p-values `F~_i(xbar_i^2 / (tau2 + s2_i))`.
pub fn pvalues(summaries: &[GeneSummary], tau2: f64) -> Result<Vec<f64>> {
    if !(tau2 >= 0.0 && tau2.is_finite()) {
        return Err(Error::domain(format!("tau2 must be finite and >= 0, got {tau2}")));
    }
    summaries.par_iter().map(|g| pvalue(g, tau2)).collect()
}

/// Indices sorted by p-value, ties in index order.
pub fn pvalue_order(p: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&i, &j| p[i].total_cmp(&p[j]));
    order
}

/// Benjamini-Hochberg step-up rule as a per-hypothesis flag.
pub fn bh_mask(p: &[f64], alpha: f64) -> Vec<bool> {
    let n = p.len();
    let order = pvalue_order(p);
    let mut cutoff = None;
    for (rank, &i) in order.iter().enumerate().rev() {
        if p[i] <= alpha * (rank + 1) as f64 / n as f64 {
            cutoff = Some(p[i]);
            break;
        }
    }
    match cutoff {
        Some(c) => p.iter().map(|&pi| pi <= c).collect(),
        None => vec![false; n],
    }
}

fn bonferroni_mask(p: &[f64], alpha: f64) -> Vec<bool> {
    let c = alpha / p.len() as f64;
    p.iter().map(|&pi| pi <= c).collect()
}

fn dual_mask(p: &[f64], alpha1: f64, alpha2: f64) -> Vec<bool> {
    bh_mask(p, alpha1)
        .into_iter()
        .zip(p)
        .map(|(r, &pi)| r && pi <= alpha2)
        .collect()
}

fn indices(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter_map(|(i, &r)| r.then_some(i))
        .collect()
}

/// Benjamini-Hochberg rejections, as ascending indices.
pub fn bh(p: &[f64], alpha: f64) -> Vec<usize> {
    indices(&bh_mask(p, alpha))
}

/// Rejections with `p_i <= alpha / N`, as ascending indices.
pub fn bonferroni(p: &[f64], alpha: f64) -> Vec<usize> {
    indices(&bonferroni_mask(p, alpha))
}

/// BH rejections at `alpha1` that also have `p_i <= alpha2`.
pub fn dual_threshold(p: &[f64], alpha1: f64, alpha2: f64) -> Vec<usize> {
    indices(&dual_mask(p, alpha1, alpha2))
}

/// Fixed-level test that knows `tau2`: rejects when
/// `xbar_i^2 > q_i(alpha) (s2_i + tau2)`, `q_i` the null quantile.
pub fn oracle_reject(summaries: &[GeneSummary], true_tau2: f64, alpha: f64) -> Result<Vec<bool>> {
    check_level("alpha", alpha)?;
    if !(true_tau2 >= 0.0 && true_tau2.is_finite()) {
        return Err(Error::domain(format!("tau2 must be finite and >= 0, got {true_tau2}")));
    }
    summaries
        .par_iter()
        .map(|g| {
            let var = g.s2 + true_tau2;
            if var == 0.0 {
                return Ok(g.xbar != 0.0);
            }
            let params = NullTailParams::new(g.s2, true_tau2, g.df_sigma)?;
            let q = null_quantile(alpha, &params)?;
            Ok(g.xbar * g.xbar > q * var)
        })
        .collect()
}

/// False discovery proportion of `rejected` given which hypotheses are
/// non-null. Zero when nothing is rejected.
pub fn fdp(rejected: &[bool], non_null: &[bool]) -> f64 {
    let r = rejected.iter().filter(|&&x| x).count();
    if r == 0 {
        return 0.0;
    }
    let false_rej = rejected
        .iter()
        .zip(non_null)
        .filter(|(&x, &nn)| x && !nn)
        .count();
    false_rej as f64 / r as f64
}

/// Fraction of non-nulls rejected; `None` without non-nulls.
pub fn sensitivity(rejected: &[bool], non_null: &[bool]) -> Option<f64> {
    let m = non_null.iter().filter(|&&x| x).count();
    if m == 0 {
        return None;
    }
    let hit = rejected
        .iter()
        .zip(non_null)
        .filter(|(&x, &nn)| x && nn)
        .count();
    Some(hit as f64 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::student_t_sf;

    fn g(xbar: f64, s2: f64, df: f64) -> GeneSummary {
        GeneSummary::new("g", xbar, s2, df).unwrap()
    }

    #[test]
    fn zero_effect_has_unit_pvalue() {
        assert_eq!(pvalues(&[g(0.0, 1.0, 4.0)], 0.3).unwrap(), vec![1.0]);
    }

    #[test]
    fn zero_tau2_is_t_test() {
        let s = [g(1.3, 0.25, 6.0), g(-0.4, 0.09, 3.0)];
        let p = pvalues(&s, 0.0).unwrap();
        for (gi, pi) in s.iter().zip(p) {
            let t = gi.xbar.abs() / gi.s2.sqrt();
            let want = 2.0 * student_t_sf(t, gi.df_sigma).unwrap();
            assert!((pi - want).abs() < 1e-13, "{pi} vs {want}");
        }
    }

    #[test]
    fn bh_examples() {
        assert_eq!(bh(&[0.001, 0.2, 0.9], 0.05), vec![0]);
        assert!(bh(&[1.0; 5], 0.05).is_empty());
        assert!(bh(&[], 0.05).is_empty());
    }

    #[test]
    fn dual_examples() {
        let p = [0.001, 0.02, 0.9];
        assert_eq!(bh(&p, 0.1), vec![0, 1]);
        assert_eq!(dual_threshold(&p, 0.1, 0.01), vec![0]);
        assert_eq!(dual_threshold(&p, 0.1, 1.0), bh(&p, 0.1));
        assert!(dual_threshold(&p, 0.1, 0.0).is_empty());
    }

    #[test]
    fn bonferroni_examples() {
        let mut p = vec![0.5; 10];
        p[0] = 0.001;
        p[3] = 0.005;
        p[4] = 0.0051;
        assert_eq!(bonferroni(&p, 0.05), vec![0, 3]);
        assert!(bonferroni(&[1.0; 4], 0.05).is_empty());
    }

    #[test]
    fn oracle_matches_pvalue_form() {
        let s: Vec<_> = (0..60)
            .map(|i| g(i as f64 * 0.11 - 3.0, 0.2 + 0.01 * i as f64, 3.0 + (i % 5) as f64))
            .collect();
        for alpha in [0.01, 0.05, 0.3] {
            let r = oracle_reject(&s, 0.4, alpha).unwrap();
            let p = pvalues(&s, 0.4).unwrap();
            for (ri, pi) in r.iter().zip(p) {
                assert_eq!(*ri, pi <= alpha);
            }
        }
        let all = oracle_reject(&s, 0.4, 1.0).unwrap();
        assert!(all.iter().zip(&s).all(|(r, gi)| *r == (gi.xbar != 0.0)));
    }

    #[test]
    fn fdp_and_sensitivity_conventions() {
        let nn = [true, false, false, true];
        assert_eq!(fdp(&[false; 4], &nn), 0.0);
        assert_eq!(fdp(&[true, true, false, false], &nn), 0.5);
        assert_eq!(sensitivity(&[true, true, false, false], &nn), Some(0.5));
        assert_eq!(sensitivity(&[true; 4], &[false; 4]), None);
        assert_eq!(fdp(&[true, false, false, false], &[false; 4]), 1.0);
    }

    #[test]
    fn run_dual_needs_alpha2() {
        let s = [g(1.0, 1.0, 4.0), g(3.0, 0.1, 4.0)];
        assert!(TestOutcome::run(&s, 0.0, Procedure::Dual, 0.1, None).is_err());
        let out = TestOutcome::run(&s, 0.0, Procedure::Dual, 0.1, Some(1.0)).unwrap();
        let bh = TestOutcome::run(&s, 0.0, Procedure::Bh, 0.1, None).unwrap();
        assert_eq!(out.rejected, bh.rejected);
    }
}
