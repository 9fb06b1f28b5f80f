//! Replicate matrices and per-gene sufficient statistics.
//!
//! Every design reduces a gene to `(xbar, s2, df_sigma)`: an effect
//! estimate, an unbiased estimate of its variance, and the degrees of
//! freedom of that variance estimate. Downstream code never needs to know
//! which design produced a summary.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Experiment,
    Control,
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "experiment" | "exp" | "treatment" => Ok(Group::Experiment),
            "control" | "ctrl" => Ok(Group::Control),
            other => Err(Error::Input(format!("unknown group label {other:?}"))),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Experiment => f.write_str("experiment"),
            Group::Control => f.write_str("control"),
        }
    }
}

/// Per-hypothesis sufficient statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneSummary {
    pub id: String,
    pub xbar: f64,
    pub s2: f64,
    pub df_sigma: f64,
}

impl GeneSummary {
    pub fn new(id: impl Into<String>, xbar: f64, s2: f64, df_sigma: f64) -> Result<Self> {
        let summary = GeneSummary {
            id: id.into(),
            xbar,
            s2,
            df_sigma,
        };
        summary.validate()?;
        Ok(summary)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.xbar.is_finite() {
            return Err(Error::domain(format!("{}: xbar is not finite", self.id)));
        }
        if !(self.s2 >= 0.0 && self.s2.is_finite()) {
            return Err(Error::domain(format!(
                "{}: s2 must be finite and >= 0, got {}",
                self.id, self.s2
            )));
        }
        if !(self.df_sigma > 0.0 && self.df_sigma.is_finite()) {
            return Err(Error::domain(format!(
                "{}: df must be finite and > 0, got {}",
                self.id, self.df_sigma
            )));
        }
        Ok(())
    }
}

/// Raw measurements: one row per gene, one column per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateMatrix {
    pub gene_ids: Vec<String>,
    pub sample_ids: Vec<String>,
    pub groups: Vec<Group>,
    /// Optional batch / pairing label per column.
    pub batches: Vec<Option<String>>,
    values: Vec<f64>,
}

impl ReplicateMatrix {
    /// Builds a matrix from row-major values.
    pub fn new(
        gene_ids: Vec<String>,
        sample_ids: Vec<String>,
        groups: Vec<Group>,
        batches: Vec<Option<String>>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let n_cols = sample_ids.len();
        if gene_ids.is_empty() {
            return Err(Error::Input("matrix has no genes".into()));
        }
        if groups.len() != n_cols || batches.len() != n_cols {
            return Err(Error::Input(
                "sample, group and batch label counts differ".into(),
            ));
        }
        if values.len() != gene_ids.len() * n_cols {
            return Err(Error::Input(format!(
                "expected {} values, got {}",
                gene_ids.len() * n_cols,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "non-finite value for gene {} sample {}",
                gene_ids[pos / n_cols.max(1)],
                sample_ids[pos % n_cols.max(1)]
            )));
        }
        Ok(ReplicateMatrix {
            gene_ids,
            sample_ids,
            groups,
            batches,
            values,
        })
    }

    /// Convenience constructor from per-gene rows, without batch labels.
    pub fn from_rows(
        gene_ids: Vec<String>,
        groups: Vec<Group>,
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        let n_cols = groups.len();
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Input("ragged rows".into()));
        }
        let sample_ids = (0..n_cols).map(|j| format!("s{}", j + 1)).collect();
        let batches = vec![None; n_cols];
        let values = rows.iter().flatten().copied().collect();
        ReplicateMatrix::new(gene_ids, sample_ids, groups, batches, values)
    }

    pub fn n_genes(&self) -> usize {
        self.gene_ids.len()
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.n_samples();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_samples() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn columns_of(&self, group: Group) -> Vec<usize> {
        (0..self.n_samples())
            .filter(|&j| self.groups[j] == group)
            .collect()
    }

    /// Experiment/control column pairs matched by batch label, in order of
    /// first appearance of each label.
    pub fn pairs(&self) -> Result<Vec<(usize, usize)>> {
        let mut order: Vec<&str> = Vec::new();
        let mut slots: HashMap<&str, (Vec<usize>, Vec<usize>)> = HashMap::new();
        for j in 0..self.n_samples() {
            let label = self.batches[j].as_deref().ok_or_else(|| {
                Error::Design(format!(
                    "sample {} has no pairing label",
                    self.sample_ids[j]
                ))
            })?;
            let entry = slots.entry(label).or_insert_with(|| {
                order.push(label);
                (Vec::new(), Vec::new())
            });
            match self.groups[j] {
                Group::Experiment => entry.0.push(j),
                Group::Control => entry.1.push(j),
            }
        }
        order
            .into_iter()
            .map(|label| {
                let (exp, ctrl) = &slots[label];
                if exp.len() == 1 && ctrl.len() == 1 {
                    Ok((exp[0], ctrl[0]))
                } else {
                    Err(Error::Design(format!(
                        "pair {label:?} has {} experiment and {} control columns; expected 1 and 1",
                        exp.len(),
                        ctrl.len()
                    )))
                }
            })
            .collect()
    }
}

fn sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Mean and sum of squared deviations. Values are reduced in sorted order so
/// the result does not depend on column order.
fn mean_and_ss(values: &[f64]) -> (f64, f64) {
    let v = sorted(values.iter().copied());
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let ss = sorted(v.iter().map(|x| (x - mean) * (x - mean)))
        .iter()
        .sum::<f64>();
    (mean, ss)
}

/// One-sample summary of a set of replicates: mean, variance of the mean,
/// and `m - 1` degrees of freedom.
pub fn one_sample_stats(values: &[f64]) -> Result<(f64, f64, f64)> {
    let m = values.len();
    if m < 2 {
        return Err(Error::Design(format!(
            "need at least 2 replicates, got {m}"
        )));
    }
    let (mean, ss) = mean_and_ss(values);
    let mf = m as f64;
    Ok((mean, ss / (mf - 1.0) / mf, mf - 1.0))
}

/// Summaries of the experiment columns as a single sample.
pub fn summarize_one_sample(matrix: &ReplicateMatrix) -> Result<Vec<GeneSummary>> {
    let cols = matrix.columns_of(Group::Experiment);
    if cols.len() < 2 {
        return Err(Error::Design(format!(
            "one-sample design needs at least 2 experiment columns, got {}",
            cols.len()
        )));
    }
    (0..matrix.n_genes())
        .map(|i| {
            let row = matrix.row(i);
            let values: Vec<f64> = cols.iter().map(|&j| row[j]).collect();
            let (xbar, s2, df) = one_sample_stats(&values)?;
            Ok(GeneSummary {
                id: matrix.gene_ids[i].clone(),
                xbar,
                s2,
                df_sigma: df,
            })
        })
        .collect()
}

/// Paired design: one-sample statistics of the per-pair differences
/// `experiment - control`.
pub fn summarize_paired(matrix: &ReplicateMatrix) -> Result<Vec<GeneSummary>> {
    let pairs = matrix.pairs()?;
    if pairs.len() < 2 {
        return Err(Error::Design(format!(
            "paired design needs at least 2 pairs, got {}",
            pairs.len()
        )));
    }
    (0..matrix.n_genes())
        .map(|i| {
            let row = matrix.row(i);
            let diffs: Vec<f64> = pairs.iter().map(|&(e, c)| row[e] - row[c]).collect();
            let (xbar, s2, df) = one_sample_stats(&diffs)?;
            Ok(GeneSummary {
                id: matrix.gene_ids[i].clone(),
                xbar,
                s2,
                df_sigma: df,
            })
        })
        .collect()
}

fn two_group_columns(matrix: &ReplicateMatrix) -> Result<(Vec<usize>, Vec<usize>)> {
    let exp = matrix.columns_of(Group::Experiment);
    let ctrl = matrix.columns_of(Group::Control);
    if exp.len() < 2 || ctrl.len() < 2 {
        return Err(Error::Design(format!(
            "two-sample design needs at least 2 replicates per group, got {} experiment and {} control",
            exp.len(),
            ctrl.len()
        )));
    }
    Ok((exp, ctrl))
}

fn group_stats(row: &[f64], cols: &[usize]) -> (f64, f64) {
    let values: Vec<f64> = cols.iter().map(|&j| row[j]).collect();
    mean_and_ss(&values)
}

/// Two-sample design with a pooled within-group variance.
pub fn summarize_pooled(matrix: &ReplicateMatrix) -> Result<Vec<GeneSummary>> {
    let (exp, ctrl) = two_group_columns(matrix)?;
    let m1 = exp.len() as f64;
    let m0 = ctrl.len() as f64;
    let df = m1 + m0 - 2.0;
    Ok((0..matrix.n_genes())
        .map(|i| {
            let row = matrix.row(i);
            let (mx, ssx) = group_stats(row, &exp);
            let (mz, ssz) = group_stats(row, &ctrl);
            let pooled = (ssx + ssz) / df;
            GeneSummary {
                id: matrix.gene_ids[i].clone(),
                xbar: mx - mz,
                s2: pooled / m1 + pooled / m0,
                df_sigma: df,
            }
        })
        .collect())
}

/// Satterthwaite degrees of freedom for the unequal-variance two-sample
/// design, with per-group weights `SS / m` and `m - 1` degrees of freedom
/// per group. Lies in `[min(m1, m0) - 1, m1 + m0 - 2]`.
pub fn welch_df(ss_x: f64, m1: usize, ss_z: f64, m0: usize) -> f64 {
    let n1 = (m1 - 1) as f64;
    let n0 = (m0 - 1) as f64;
    let wx = ss_x / m1 as f64;
    let wz = ss_z / m0 as f64;
    let total = wx + wz;
    if total <= 0.0 {
        return n1 + n0;
    }
    // (wx + wz)^2 / (wx^2 / n1 + wz^2 / n0), written in terms of the share
    // r = wx / (wx + wz) so that the r = 1/2 and r = 1 cases are exact.
    let r = wx / total;
    let df = n1 * n0 / (r * r * n0 + (1.0 - r) * (1.0 - r) * n1);
    df.clamp(n1.min(n0), n1 + n0)
}

/// Two-sample design with unequal group variances.
pub fn summarize_welch(matrix: &ReplicateMatrix) -> Result<Vec<GeneSummary>> {
    let (exp, ctrl) = two_group_columns(matrix)?;
    let m1 = exp.len();
    let m0 = ctrl.len();
    Ok((0..matrix.n_genes())
        .map(|i| {
            let row = matrix.row(i);
            let (mx, ssx) = group_stats(row, &exp);
            let (mz, ssz) = group_stats(row, &ctrl);
            let var_x = ssx / (m1 - 1) as f64;
            let var_z = ssz / (m0 - 1) as f64;
            GeneSummary {
                id: matrix.gene_ids[i].clone(),
                xbar: mx - mz,
                s2: var_x / m1 as f64 + var_z / m0 as f64,
                df_sigma: welch_df(ssx, m1, ssz, m0),
            }
        })
        .collect())
}

/// Quantile normalization across all columns.
///
/// Each column is replaced by the mean order-statistic profile at its ranks.
/// Tied values within a column receive the average of the profile over the
/// tied ranks.
pub fn quantile_normalize(matrix: &ReplicateMatrix) -> ReplicateMatrix {
    let n = matrix.n_genes();
    let m = matrix.n_samples();
    let orders: Vec<Vec<usize>> = (0..m)
        .map(|j| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| matrix.get(a, j).total_cmp(&matrix.get(b, j)));
            idx
        })
        .collect();

    let profile: Vec<f64> = (0..n)
        .map(|r| orders.iter().enumerate().map(|(j, o)| matrix.get(o[r], j)).sum::<f64>() / m as f64)
        .collect();

    let mut values = vec![0.0; n * m];
    for (j, order) in orders.iter().enumerate() {
        let mut r = 0;
        while r < n {
            let v = matrix.get(order[r], j);
            let mut end = r + 1;
            while end < n && matrix.get(order[end], j) == v {
                end += 1;
            }
            let target = if end - r == 1 {
                profile[r]
            } else {
                profile[r..end].iter().sum::<f64>() / (end - r) as f64
            };
            for &i in &order[r..end] {
                values[i * m + j] = target;
            }
            r = end;
        }
    }

    ReplicateMatrix {
        gene_ids: matrix.gene_ids.clone(),
        sample_ids: matrix.sample_ids.clone(),
        groups: matrix.groups.clone(),
        batches: matrix.batches.clone(),
        values,
    }
}

/// Per-pair natural-log ratios `ln(experiment) - ln(control)`.
///
/// The result has one experiment column per pair, named
/// `<experiment>-<control>` and labelled with the pair's batch.
pub fn paired_log_diff(matrix: &ReplicateMatrix) -> Result<ReplicateMatrix> {
    let pairs = matrix.pairs()?;
    if let Some(pos) = matrix.values.iter().position(|&v| v <= 0.0) {
        let m = matrix.n_samples();
        return Err(Error::Input(format!(
            "log difference needs positive measurements; gene {} sample {} has {}",
            matrix.gene_ids[pos / m],
            matrix.sample_ids[pos % m],
            matrix.values[pos]
        )));
    }
    let n = matrix.n_genes();
    let mut values = Vec::with_capacity(n * pairs.len());
    for i in 0..n {
        let row = matrix.row(i);
        values.extend(pairs.iter().map(|&(e, c)| row[e].ln() - row[c].ln()));
    }
    let sample_ids = pairs
        .iter()
        .map(|&(e, c)| format!("{}-{}", matrix.sample_ids[e], matrix.sample_ids[c]))
        .collect();
    let batches = pairs.iter().map(|&(e, _)| matrix.batches[e].clone()).collect();
    ReplicateMatrix::new(
        matrix.gene_ids.clone(),
        sample_ids,
        vec![Group::Experiment; pairs.len()],
        batches,
        values,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("g{i}")).collect()
    }

    fn paired(rows: &[Vec<f64>], labels: &[(&str, Group)]) -> ReplicateMatrix {
        let m = labels.len();
        ReplicateMatrix::new(
            ids(rows.len()),
            (0..m).map(|j| format!("s{j}")).collect(),
            labels.iter().map(|l| l.1).collect(),
            labels.iter().map(|l| Some(l.0.to_string())).collect(),
            rows.iter().flatten().copied().collect(),
        )
        .unwrap()
    }

    use Group::{Control as C, Experiment as E};

    #[test]
    fn paired_constant_differences() {
        let m = paired(
            &[vec![3.0, 1.0, 5.0, 3.0, 2.5, 0.5]],
            &[("a", E), ("a", C), ("b", E), ("b", C), ("c", E), ("c", C)],
        );
        let s = summarize_paired(&m).unwrap();
        assert_eq!(s[0].xbar, 2.0);
        assert_eq!(s[0].s2, 0.0);
        assert_eq!(s[0].df_sigma, 2.0);
    }

    #[test]
    fn paired_two_differences() {
        // differences 1 and 3
        let m = paired(&[vec![1.0, 0.0, 3.0, 0.0]], &[("a", E), ("a", C), ("b", E), ("b", C)]);
        let s = summarize_paired(&m).unwrap();
        assert_eq!((s[0].xbar, s[0].s2, s[0].df_sigma), (2.0, 1.0, 1.0));
    }

    #[test]
    fn paired_is_invariant_to_pair_order() {
        let a = paired(
            &[vec![1.3, 0.2, 3.7, -0.4, 2.2, 1.1], vec![0.1, 0.5, -2.0, 0.3, 0.7, 0.9]],
            &[("a", E), ("a", C), ("b", E), ("b", C), ("c", E), ("c", C)],
        );
        let b = paired(
            &[vec![2.2, 1.1, 1.3, 0.2, 3.7, -0.4], vec![0.7, 0.9, 0.1, 0.5, -2.0, 0.3]],
            &[("c", E), ("c", C), ("a", E), ("a", C), ("b", E), ("b", C)],
        );
        assert_eq!(summarize_paired(&a).unwrap(), summarize_paired(&b).unwrap());
    }

    #[test]
    fn paired_rejects_bad_pairing() {
        let m = paired(&[vec![1.0, 0.0, 3.0, 0.0]], &[("a", E), ("a", E), ("b", C), ("b", C)]);
        assert!(matches!(summarize_paired(&m), Err(Error::Design(_))));
        let one_pair = paired(&[vec![1.0, 0.0]], &[("a", E), ("a", C)]);
        assert!(matches!(summarize_paired(&one_pair), Err(Error::Design(_))));
        let unlabeled =
            ReplicateMatrix::from_rows(ids(1), vec![E, C, E, C], &[vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        assert!(matches!(summarize_paired(&unlabeled), Err(Error::Design(_))));
    }

    #[test]
    fn pooled_examples() {
        let m = ReplicateMatrix::from_rows(
            ids(2),
            vec![E, E, C, C],
            &[vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0, 0.0]],
        )
        .unwrap();
        let s = summarize_pooled(&m).unwrap();
        assert_eq!((s[0].xbar, s[0].s2, s[0].df_sigma), (1.0, 0.0, 2.0));
        assert_eq!((s[1].xbar, s[1].s2, s[1].df_sigma), (1.0, 1.0, 2.0));
    }

    #[test]
    fn pooled_swap_negates_effect() {
        let rows = [vec![0.3, 1.9, 2.2, -0.7, 0.1]];
        let a = ReplicateMatrix::from_rows(ids(1), vec![E, E, E, C, C], &rows).unwrap();
        let b = ReplicateMatrix::from_rows(ids(1), vec![C, C, C, E, E], &rows).unwrap();
        let (sa, sb) = (summarize_pooled(&a).unwrap(), summarize_pooled(&b).unwrap());
        assert_eq!(sa[0].xbar, -sb[0].xbar);
        assert_eq!(sa[0].s2, sb[0].s2);
        assert_eq!(sa[0].df_sigma, sb[0].df_sigma);
    }

    #[test]
    fn two_sample_needs_replicates() {
        let m = ReplicateMatrix::from_rows(ids(1), vec![E, C, C], &[vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(matches!(summarize_pooled(&m), Err(Error::Design(_))));
        assert!(matches!(summarize_welch(&m), Err(Error::Design(_))));
    }

    #[test]
    fn welch_symmetric_and_single_term_limits() {
        // equal sizes, equal variances
        let m = ReplicateMatrix::from_rows(
            ids(1),
            vec![E, E, E, C, C, C],
            &[vec![1.0, 2.0, 3.0, 5.0, 6.0, 7.0]],
        )
        .unwrap();
        assert_eq!(summarize_welch(&m).unwrap()[0].df_sigma, 4.0);
        // control variance zero: df = m1 - 1
        let m = ReplicateMatrix::from_rows(
            ids(1),
            vec![E, E, E, E, C, C, C],
            &[vec![1.0, 2.0, 3.0, 7.0, 5.0, 5.0, 5.0]],
        )
        .unwrap();
        assert_eq!(summarize_welch(&m).unwrap()[0].df_sigma, 3.0);
    }

    #[test]
    fn welch_unequal_groups_by_hand() {
        // experiment: 4 values with sample variance 2 (SS = 6)
        // control: 3 values with sample variance 1 (SS = 2)
        let a = 1.0;
        let x = [a - 1.5, a - 0.5, a + 0.5, a + 1.5]; // SS = 5; scale to SS = 6
        let k = (6.0f64 / 5.0).sqrt();
        let x: Vec<f64> = x.iter().map(|v| a + (v - a) * k).collect();
        let z = [-1.0, 0.0, 1.0];
        let mut row = x.clone();
        row.extend_from_slice(&z);
        let m = ReplicateMatrix::from_rows(ids(1), vec![E, E, E, E, C, C, C], &[row]).unwrap();
        let s = &summarize_welch(&m).unwrap()[0];
        // s2 = 2/4 + 1/3
        assert!((s.s2 - (0.5 + 1.0 / 3.0)).abs() < 1e-14);
        // weights SS/m: 6/4 = 1.5 and 2/3; df = (1.5 + 2/3)^2 / (1.5^2/3 + (2/3)^2/2)
        let (wx, wz) = (1.5f64, 2.0f64 / 3.0);
        let expect = (wx + wz).powi(2) / (wx * wx / 3.0 + wz * wz / 2.0);
        assert!((s.df_sigma - expect).abs() < 1e-12);
        assert!((s.df_sigma - 4.828_571_428_571_428).abs() < 1e-12);
        assert!(s.df_sigma >= 2.0 && s.df_sigma <= 5.0);
        assert!((s.xbar - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pooled_and_welch_agree_for_balanced_equal_variance() {
        let m = ReplicateMatrix::from_rows(
            ids(1),
            vec![E, E, E, C, C, C],
            &[vec![0.5, 1.5, 4.0, -1.0, 0.0, 2.5]],
        )
        .unwrap();
        let p = &summarize_pooled(&m).unwrap()[0];
        let w = &summarize_welch(&m).unwrap()[0];
        assert_eq!(p.xbar, w.xbar);
        assert_eq!(p.s2, w.s2);
        assert_eq!(p.df_sigma, w.df_sigma);
    }

    #[test]
    fn quantile_normalize_by_hand() {
        // columns (5, 2, 3) and (4, 1, 6)
        // sorted: (2, 3, 5) and (1, 4, 6); profile (1.5, 3.5, 5.5)
        let m = ReplicateMatrix::from_rows(
            ids(3),
            vec![E, C],
            &[vec![5.0, 4.0], vec![2.0, 1.0], vec![3.0, 6.0]],
        )
        .unwrap();
        let q = quantile_normalize(&m);
        assert_eq!(q.row(0), &[5.5, 3.5]);
        assert_eq!(q.row(1), &[1.5, 1.5]);
        assert_eq!(q.row(2), &[3.5, 5.5]);
    }

    #[test]
    fn quantile_normalize_identical_and_permuted_columns() {
        let m = ReplicateMatrix::from_rows(
            ids(3),
            vec![E, C],
            &[vec![1.0, 1.0], vec![7.0, 7.0], vec![3.0, 3.0]],
        )
        .unwrap();
        assert_eq!(quantile_normalize(&m), m);

        let m = ReplicateMatrix::from_rows(
            ids(3),
            vec![E, C],
            &[vec![1.0, 7.0], vec![7.0, 3.0], vec![3.0, 1.0]],
        )
        .unwrap();
        let q = quantile_normalize(&m);
        for j in 0..2 {
            let mut col: Vec<f64> = (0..3).map(|i| q.get(i, j)).collect();
            col.sort_by(f64::total_cmp);
            assert_eq!(col, vec![1.0, 3.0, 7.0]);
        }
    }

    #[test]
    fn quantile_normalize_averages_ties() {
        let m = ReplicateMatrix::from_rows(
            ids(3),
            vec![E, C],
            &[vec![2.0, 1.0], vec![2.0, 2.0], vec![5.0, 3.0]],
        )
        .unwrap();
        // profile (1.5, 2, 4); tied ranks 0 and 1 of column 0 get 1.75
        let q = quantile_normalize(&m);
        assert_eq!(q.get(0, 0), 1.75);
        assert_eq!(q.get(1, 0), 1.75);
        assert_eq!(q.get(2, 0), 4.0);
    }

    #[test]
    fn log_diff_cases() {
        let m = paired(&[vec![2.0, 1.0, 3.0, 3.0]], &[("a", E), ("a", C), ("b", E), ("b", C)]);
        let d = paired_log_diff(&m).unwrap();
        assert_eq!(d.n_samples(), 2);
        assert!((d.get(0, 0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(d.get(0, 1), 0.0);
        assert_eq!(d.sample_ids[0], "s0-s1");

        let bad = paired(&[vec![0.0, 1.0, 3.0, 3.0]], &[("a", E), ("a", C), ("b", E), ("b", C)]);
        assert!(paired_log_diff(&bad).is_err());
    }

    #[test]
    fn log_diff_multi_gene() {
        let rows = vec![vec![4.0, 2.0, 9.0, 3.0, 1.0, 5.0], vec![1.5, 1.5, 0.2, 0.4, 8.0, 2.0]];
        let m = paired(&rows, &[("a", E), ("a", C), ("b", C), ("b", E), ("c", E), ("c", C)]);
        let d = paired_log_diff(&m).unwrap();
        for (i, row) in rows.iter().enumerate() {
            let expect = [
                row[0].ln() - row[1].ln(),
                row[3].ln() - row[2].ln(),
                row[4].ln() - row[5].ln(),
            ];
            assert_eq!(d.row(i), &expect);
        }
    }

    #[test]
    fn group_labels_parse() {
        assert_eq!("Experiment".parse::<Group>().unwrap(), E);
        assert_eq!("ctrl".parse::<Group>().unwrap(), C);
        assert!("foo".parse::<Group>().is_err());
    }
}
