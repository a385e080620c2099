//! Reference implementations used as test oracles. None of them share code
//! with the library paths they check.
#![allow(dead_code)]

use csme_core::dataset::{Class, LabeledDataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mann-Whitney statistic: concordant positive/negative pairs over all pairs,
/// ties counted one half.
pub fn concordance_auc(truth: &[Class], scores: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0usize;
    for (i, ti) in truth.iter().enumerate() {
        if *ti != Class::Minority {
            continue;
        }
        for (j, tj) in truth.iter().enumerate() {
            if *tj != Class::Majority {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                num += 1.0;
            } else if scores[i] == scores[j] {
                num += 0.5;
            }
        }
    }
    num / pairs as f64
}

/// Sorts every training row by exact Euclidean distance (then row index) and
/// counts minority labels among the first `k`.
pub fn brute_knn_score(train: &LabeledDataset<f64>, query: &[f64], k: usize) -> f64 {
    let mut all: Vec<(f64, usize)> = (0..train.len())
        .map(|i| {
            let d: f64 = train
                .row(i)
                .iter()
                .zip(query)
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            (d.sqrt(), i)
        })
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let hits = all[..k]
        .iter()
        .filter(|(_, i)| train.label(*i) == Class::Minority)
        .count();
    hits as f64 / k as f64
}

pub fn count_confusion(truth: &[Class], pred: &[Class]) -> (usize, usize, usize, usize) {
    let count = |t: Class, p: Class| {
        truth
            .iter()
            .zip(pred)
            .filter(|(a, b)| **a == t && **b == p)
            .count()
    };
    (
        count(Class::Minority, Class::Minority),
        count(Class::Majority, Class::Minority),
        count(Class::Majority, Class::Majority),
        count(Class::Minority, Class::Majority),
    )
}

/// (fpr, tpr) at each candidate threshold: every distinct score, and -inf.
pub fn enumerate_roc(truth: &[Class], scores: &[f64]) -> Vec<(f64, f64)> {
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.push(f64::NEG_INFINITY);
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let p = truth.iter().filter(|c| **c == Class::Minority).count() as f64;
    let n = truth.len() as f64 - p;
    thresholds
        .iter()
        .map(|&t| {
            let tp = truth
                .iter()
                .zip(scores)
                .filter(|(c, s)| **c == Class::Minority && **s > t)
                .count();
            let fp = truth
                .iter()
                .zip(scores)
                .filter(|(c, s)| **c == Class::Majority && **s > t)
                .count();
            (fp as f64 / n, tp as f64 / p)
        })
        .collect()
}

/// Index of the max-Youden point under the tie rule (higher tpr, then lower
/// threshold), by a plain scan.
pub fn youden_scan(points: &[(f64, f64, f64)]) -> usize {
    let mut best = 0;
    for i in 1..points.len() {
        let (f, t, th) = points[i];
        let (bf, bt, bth) = points[best];
        let (j, bj) = (t - f, bt - bf);
        if j > bj || (j == bj && t > bt) || (j == bj && t == bt && th < bth) {
            best = i;
        }
    }
    best
}

/// Lowest-fpr point with tpr >= min_se (ties: higher tpr, then lower threshold).
pub fn min_fpr_scan(points: &[(f64, f64, f64)], min_se: f64) -> Option<usize> {
    let eligible: Vec<usize> = (0..points.len())
        .filter(|&i| points[i].1 >= min_se)
        .collect();
    let mut best = *eligible.first()?;
    for &i in &eligible {
        let (f, t, th) = points[i];
        let (bf, bt, bth) = points[best];
        if f < bf || (f == bf && t > bt) || (f == bf && t == bt && th < bth) {
            best = i;
        }
    }
    Some(best)
}

/// Random labels with both classes present and scores drawn from a small
/// grid, so ties are common.
pub fn random_scored(rng: &mut ChaCha8Rng, len: usize) -> (Vec<Class>, Vec<f64>) {
    loop {
        let truth: Vec<Class> = (0..len)
            .map(|_| {
                if rng.random_bool(0.4) {
                    Class::Minority
                } else {
                    Class::Majority
                }
            })
            .collect();
        if truth.contains(&Class::Minority) && truth.contains(&Class::Majority) {
            let levels = rng.random_range(2..12);
            let scores = truth
                .iter()
                .map(|c| {
                    let shift = if *c == Class::Minority { 2 } else { 0 };
                    ((rng.random_range(0..levels) + shift) as f64) / (levels + 2) as f64
                })
                .collect();
            return (truth, scores);
        }
    }
}

pub fn random_dataset(
    rng: &mut ChaCha8Rng,
    rows: usize,
    n: usize,
    p_minority: f64,
) -> LabeledDataset<f64> {
    let ids = (0..rows).map(|i| format!("r{i}")).collect();
    let data = (0..rows)
        .map(|_| (0..n).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect();
    let labels = (0..rows)
        .map(|i| {
            if i == 0 {
                Class::Minority
            } else if i == 1 {
                Class::Majority
            } else if rng.random_bool(p_minority) {
                Class::Minority
            } else {
                Class::Majority
            }
        })
        .collect();
    LabeledDataset::new(ids, data, labels, None).unwrap()
}
