use std::borrow::Cow;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::dataset::{project, Class, FeatureMask, FoldAssignment, LabeledDataset};
use crate::error::{Error, Result};
use crate::metrics::auc_of;
use crate::neighbors::{Knn, KnnConfig};
use crate::scalar::Scalar;

/// Cross-validated criterion `J = 1 - mean fold AUC` of k-NN on a feature
/// subset. Lower is better.
#[derive(Debug, Clone)]
pub struct Criterion<'a, T: Scalar> {
    train: &'a LabeledDataset<T>,
    knn: KnnConfig,
    splits: Vec<(Vec<usize>, Vec<usize>)>,
}

impl<'a, T: Scalar> Criterion<'a, T> {
    pub fn new(
        train: &'a LabeledDataset<T>,
        folds: &FoldAssignment,
        knn: KnnConfig,
    ) -> Result<Self> {
        if folds.len() != train.len() {
            return Err(Error::DimensionMismatch {
                expected: train.len(),
                found: folds.len(),
            });
        }
        let mut splits = Vec::with_capacity(folds.k());
        for fold in 0..folds.k() {
            let test = folds.test_rows(fold);
            for class in Class::BOTH {
                if !test.iter().any(|&i| train.label(i) == class) {
                    return Err(Error::invalid(format!(
                        "fold {fold} lacks class {}",
                        class.as_u8()
                    )));
                }
            }
            let fit = folds.train_rows(fold);
            if fit.len() < knn.k {
                return Err(Error::invalid(format!(
                    "fold {fold} leaves {} training rows for k = {}",
                    fit.len(),
                    knn.k
                )));
            }
            splits.push((fit, test));
        }
        Ok(Self { train, knn, splits })
    }

    pub fn n_features(&self) -> usize {
        self.train.n_features()
    }

    pub fn folds(&self) -> usize {
        self.splits.len()
    }

    /// Held-out AUC of every fold, in fold order.
    pub fn fold_aucs(&self, mask: &FeatureMask) -> Result<Vec<T>> {
        let projected = project(self.train, mask)?;
        self.splits
            .iter()
            .map(|(fit, test)| {
                let knn = Knn::fit_rows(&projected, Cow::Borrowed(fit.as_slice()), &self.knn)?;
                let scores = knn.scores_of_rows(&projected, test)?;
                let truth: Vec<Class> = test.iter().map(|&i| projected.label(i)).collect();
                auc_of(&truth, &scores)
            })
            .collect()
    }

    pub fn evaluate(&self, mask: &FeatureMask) -> Result<T> {
        let aucs = self.fold_aucs(mask)?;
        let mean = aucs.iter().copied().sum::<T>() / T::of_usize(aucs.len());
        Ok(T::one() - mean)
    }
}

/// Criterion value of `mask`.
pub fn criterion<T: Scalar>(
    mask: &FeatureMask,
    train: &LabeledDataset<T>,
    folds: &FoldAssignment,
    knn: &KnnConfig,
) -> Result<T> {
    Criterion::new(train, folds, *knn)?.evaluate(mask)
}

/// Batch evaluator with memoization and a function-evaluation counter.
///
/// Every requested mask counts as one evaluation, including repeats served
/// from the cache, so budgets are identical with or without memoization.
pub(crate) struct Evaluator<'a, T: Scalar> {
    criterion: Criterion<'a, T>,
    cache: HashMap<FeatureMask, T>,
    parallel: bool,
    evaluations: usize,
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    pub fn new(criterion: Criterion<'a, T>, parallel: bool) -> Self {
        Self {
            criterion,
            cache: HashMap::new(),
            parallel,
            evaluations: 0,
        }
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn evaluate_all(&mut self, masks: &[FeatureMask]) -> Result<Vec<T>> {
        let mut fresh: Vec<&FeatureMask> = masks
            .iter()
            .filter(|m| !self.cache.contains_key(*m))
            .collect();
        fresh.sort();
        fresh.dedup();
        let values: Vec<T> = if self.parallel {
            fresh
                .par_iter()
                .map(|m| self.criterion.evaluate(m))
                .collect::<Result<_>>()?
        } else {
            fresh
                .iter()
                .map(|m| self.criterion.evaluate(m))
                .collect::<Result<_>>()?
        };
        for (m, v) in fresh.into_iter().zip(values) {
            self.cache.insert(m.clone(), v);
        }
        self.evaluations += masks.len();
        Ok(masks.iter().map(|m| self.cache[m]).collect())
    }
}
