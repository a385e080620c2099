//! Brute-force k-nearest-neighbor scoring.
//!
//! The score of a query is the fraction of minority labels among its `k`
//! nearest training rows, so it takes values in `{0, 1/k, ..., 1}`. Distance
//! ties at the k-th neighbor go to the lower training row index.

use std::borrow::Cow;
use std::cmp::Ordering;

use rayon::prelude::*;

use crate::dataset::{Class, LabeledDataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Distance {
    #[default]
    Euclidean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnnConfig {
    pub k: usize,
    pub distance: Distance,
    /// Z-score every column using training statistics. Off by default: raw
    /// feature values are compared directly.
    pub standardize: bool,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            k: 3,
            distance: Distance::Euclidean,
            standardize: false,
        }
    }
}

impl KnnConfig {
    pub fn with_k(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }
}

/// A k-NN scorer over a training set, or over a subset of its rows.
#[derive(Debug)]
pub struct Knn<'a, T: Scalar> {
    n: usize,
    features: Cow<'a, [T]>,
    labels: &'a [Class],
    rows: Cow<'a, [usize]>,
    k: usize,
    scaling: Option<(Vec<T>, Vec<T>)>,
}

impl<'a, T: Scalar> Knn<'a, T> {
    pub fn fit(train: &'a LabeledDataset<T>, cfg: &KnnConfig) -> Result<Self> {
        Self::fit_rows(train, Cow::Owned((0..train.len()).collect()), cfg)
    }

    /// Scorer whose training set is `rows` of `data`. Tie-breaking follows the
    /// order of `rows`, which callers keep ascending.
    pub fn fit_rows(
        data: &'a LabeledDataset<T>,
        rows: Cow<'a, [usize]>,
        cfg: &KnnConfig,
    ) -> Result<Self> {
        if cfg.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if cfg.k > rows.len() {
            return Err(Error::invalid(format!(
                "k = {} exceeds training size {}",
                cfg.k,
                rows.len()
            )));
        }
        let n = data.n_features();
        let mut features: Cow<'a, [T]> = Cow::Borrowed(data.features());
        let mut scaling = None;
        if cfg.standardize {
            let (mean, sd) = column_stats(data, &rows);
            let scaled: Vec<T> = features
                .chunks_exact(n)
                .flat_map(|row| {
                    row.iter()
                        .enumerate()
                        .map(|(j, &v)| (v - mean[j]) / sd[j])
                        .collect::<Vec<_>>()
                })
                .collect();
            features = Cow::Owned(scaled);
            scaling = Some((mean, sd));
        }
        Ok(Self {
            n,
            features,
            labels: data.labels(),
            rows,
            k: cfg.k,
            scaling,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn row(&self, i: usize) -> &[T] {
        &self.features[i * self.n..(i + 1) * self.n]
    }

    /// Indices (into the underlying dataset) of the `k` nearest training rows,
    /// nearest first.
    pub fn nearest(&self, query: &[T]) -> Result<Vec<usize>> {
        if query.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: query.len(),
            });
        }
        let query: Cow<[T]> = match &self.scaling {
            Some((mean, sd)) => Cow::Owned(
                query
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| (v - mean[j]) / sd[j])
                    .collect(),
            ),
            None => Cow::Borrowed(query),
        };
        let mut dist: Vec<(T, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(order, &i)| (squared_distance(self.row(i), &query), order))
            .collect();
        let by_distance = |a: &(T, usize), b: &(T, usize)| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(Ordering::Equal)
                .then(a.1.cmp(&b.1))
        };
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, by_distance);
            dist.truncate(self.k);
        }
        dist.sort_unstable_by(by_distance);
        Ok(dist
            .into_iter()
            .map(|(_, order)| self.rows[order])
            .collect())
    }

    pub fn score(&self, query: &[T]) -> Result<T> {
        let hits = self
            .nearest(query)?
            .into_iter()
            .filter(|&i| self.labels[i] == Class::Minority)
            .count();
        Ok(T::of_usize(hits) / T::of_usize(self.k))
    }

    /// Scores every row of `queries`, in order.
    pub fn scores(&self, queries: &LabeledDataset<T>, parallel: bool) -> Result<Vec<T>> {
        if parallel {
            (0..queries.len())
                .into_par_iter()
                .map(|i| self.score(queries.row(i)))
                .collect()
        } else {
            queries.rows().map(|q| self.score(q)).collect()
        }
    }

    /// Scores rows of the training dataset itself.
    pub fn scores_of_rows(&self, data: &LabeledDataset<T>, rows: &[usize]) -> Result<Vec<T>> {
        rows.iter().map(|&i| self.score(data.row(i))).collect()
    }
}

fn column_stats<T: Scalar>(ds: &LabeledDataset<T>, rows: &[usize]) -> (Vec<T>, Vec<T>) {
    let n = ds.n_features();
    let count = T::of_usize(rows.len());
    let mut mean = vec![T::zero(); n];
    for &i in rows {
        for (m, &v) in mean.iter_mut().zip(ds.row(i)) {
            *m = *m + v;
        }
    }
    mean.iter_mut().for_each(|m| *m = *m / count);
    let mut var = vec![T::zero(); n];
    for &i in rows {
        for ((s, &v), &m) in var.iter_mut().zip(ds.row(i)).zip(&mean) {
            *s = *s + (v - m) * (v - m);
        }
    }
    let sd = var
        .into_iter()
        .map(|s| {
            let sd = (s / count).sqrt();
            if sd > T::zero() {
                sd
            } else {
                T::one()
            }
        })
        .collect();
    (mean, sd)
}

pub fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Minority fraction among the `cfg.k` nearest rows of `train`.
pub fn knn_score<T: Scalar>(train: &LabeledDataset<T>, query: &[T], cfg: &KnnConfig) -> Result<T> {
    Knn::fit(train, cfg)?.score(query)
}

/// Label 1 iff the score exceeds `threshold`.
pub fn knn_classify<T: Scalar>(
    train: &LabeledDataset<T>,
    queries: &LabeledDataset<T>,
    cfg: &KnnConfig,
    threshold: T,
) -> Result<Vec<Class>> {
    let knn = Knn::fit(train, cfg)?;
    Ok(knn
        .scores(queries, false)?
        .into_iter()
        .map(|s| {
            if s > threshold {
                Class::Minority
            } else {
                Class::Majority
            }
        })
        .collect())
}
