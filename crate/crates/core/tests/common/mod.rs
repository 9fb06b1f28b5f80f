#![allow(dead_code)]

pub mod quadrature;

/// BH by definition: the largest observed threshold `t` with
/// `t <= alpha * #{p <= t} / N`, rejecting everything at or below it.
pub fn bh_brute(p: &[f64], alpha: f64) -> Vec<usize> {
    let n = p.len();
    let mut best: Option<f64> = None;
    for &t in p {
        let count = p.iter().filter(|&&q| q <= t).count();
        if t <= alpha * count as f64 / n as f64 && best.is_none_or(|b| t > b) {
            best = Some(t);
        }
    }
    match best {
        Some(t) => (0..n).filter(|&i| p[i] <= t).collect(),
        None => Vec::new(),
    }
}

pub fn bonferroni_brute(p: &[f64], alpha: f64) -> Vec<usize> {
    let cutoff = alpha / p.len() as f64;
    let mut out = Vec::new();
    for (i, &pi) in p.iter().enumerate() {
        if pi <= cutoff {
            out.push(i);
        }
    }
    out
}

pub fn dual_brute(p: &[f64], alpha1: f64, alpha2: f64) -> Vec<usize> {
    bh_brute(p, alpha1)
        .into_iter()
        .filter(|&i| p[i] <= alpha2)
        .collect()
}

/// `(false rejections / rejections, true rejections / non-nulls)` by
/// counting index sets.
pub fn fdp_sens_brute(rejected: &[usize], non_null: &[usize]) -> (f64, Option<f64>) {
    let false_rej = rejected.iter().filter(|i| !non_null.contains(i)).count();
    let true_rej = rejected.len() - false_rej;
    let fdp = if rejected.is_empty() {
        0.0
    } else {
        false_rej as f64 / rejected.len() as f64
    };
    let sens = (!non_null.is_empty()).then(|| true_rej as f64 / non_null.len() as f64);
    (fdp, sens)
}

/// Kolmogorov-Smirnov distance between the sample and U(0, 1).
pub fn ks_uniform(sample: &[f64]) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let hi = (i + 1) as f64 / n - x;
            let lo = x - i as f64 / n;
            hi.max(lo)
        })
        .fold(0.0, f64::max)
}

pub fn mask(indices: &[usize], n: usize) -> Vec<bool> {
    let mut m = vec![false; n];
    for &i in indices {
        m[i] = true;
    }
    m
}

/// Sample mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
