//! SMOTE class balancing.
//!
//! `round(r * n_minority)` synthetic rows are appended. Minority rows are
//! visited cyclically in row order; each visit interpolates between the visited
//! row and one of its `k_neighbors` nearest minority rows. The random draws of a
//! visit come from the stream `(seed, parent row, visit round)`.

use std::cmp::Ordering;

use rand::Rng as _;
use rayon::prelude::*;

use crate::dataset::{Class, LabeledDataset};
use crate::error::{Error, Result};
use crate::neighbors::squared_distance;
use crate::scalar::Scalar;
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OversampleConfig {
    /// Synthetic rows per original minority row.
    pub r: f64,
    pub k_neighbors: usize,
    pub seed: u64,
}

impl Default for OversampleConfig {
    fn default() -> Self {
        Self {
            r: 1.0,
            k_neighbors: 5,
            seed: 0,
        }
    }
}

impl OversampleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::invalid(format!(
                "oversampling ratio must be >= 0, got {}",
                self.r
            )));
        }
        if self.k_neighbors == 0 {
            return Err(Error::invalid("k_neighbors must be at least 1"));
        }
        Ok(())
    }
}

/// Synthetic rows generated for ratio `r`.
pub fn synthetic_count(n_minority: usize, r: f64) -> usize {
    (r * n_minority as f64).round() as usize
}

/// Where a synthetic row came from: `parent + lambda * (neighbor - parent)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticOrigin {
    pub parent: usize,
    pub neighbor: usize,
    pub lambda: f64,
}

#[derive(Clone, Debug)]
pub struct SmoteOutput<T: Scalar> {
    pub dataset: LabeledDataset<T>,
    /// One entry per appended row, in order.
    pub origins: Vec<SyntheticOrigin>,
}

pub fn smote<T: Scalar>(
    ds: &LabeledDataset<T>,
    cfg: &OversampleConfig,
) -> Result<LabeledDataset<T>> {
    smote_with_origins(ds, cfg).map(|out| out.dataset)
}

pub fn smote_with_origins<T: Scalar>(
    ds: &LabeledDataset<T>,
    cfg: &OversampleConfig,
) -> Result<SmoteOutput<T>> {
    cfg.validate()?;
    let minority = ds.class_rows(Class::Minority);
    let count = synthetic_count(minority.len(), cfg.r);
    if cfg.r > 0.0 && minority.is_empty() {
        return Err(Error::MissingClass(Class::Minority.as_u8()));
    }
    if count == 0 {
        return Ok(SmoteOutput {
            dataset: ds.clone(),
            origins: Vec::new(),
        });
    }
    if minority.len() < cfg.k_neighbors + 1 {
        return Err(Error::ClassTooSmall {
            class: Class::Minority.as_u8(),
            count: minority.len(),
            required: cfg.k_neighbors + 1,
        });
    }

    let neighbors: Vec<Vec<usize>> = minority
        .par_iter()
        .map(|&i| minority_neighbors(ds, &minority, i, cfg.k_neighbors))
        .collect();

    let n = ds.n_features();
    let mut ids = Vec::with_capacity(count);
    let mut features = Vec::with_capacity(count * n);
    let mut origins = Vec::with_capacity(count);
    for visit in 0..count {
        let slot = visit % minority.len();
        let round = visit / minority.len();
        let parent = minority[slot];
        let mut rng = seed::rng(cfg.seed, &[seed::SMOTE, parent as u64, round as u64]);
        let neighbor = neighbors[slot][rng.random_range(0..cfg.k_neighbors)];
        let lambda: f64 = rng.random();
        let step = T::of(lambda);
        features.extend(
            ds.row(parent)
                .iter()
                .zip(ds.row(neighbor))
                .map(|(&s, &t)| s + step * (t - s)),
        );
        ids.push(format!("syn:{}:{round}", ds.ids()[parent]));
        origins.push(SyntheticOrigin {
            parent,
            neighbor,
            lambda,
        });
    }
    let dataset = ds.extend(ids, features, vec![Class::Minority; count])?;
    Ok(SmoteOutput { dataset, origins })
}

/// The `k` nearest minority rows of `row`, itself excluded, ties by row index.
fn minority_neighbors<T: Scalar>(
    ds: &LabeledDataset<T>,
    minority: &[usize],
    row: usize,
    k: usize,
) -> Vec<usize> {
    let mut dist: Vec<(T, usize)> = minority
        .iter()
        .filter(|&&j| j != row)
        .map(|&j| (squared_distance(ds.row(row), ds.row(j)), j))
        .collect();
    dist.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    dist.into_iter().take(k).map(|(_, j)| j).collect()
}
