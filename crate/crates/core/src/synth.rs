//! Planted-subset benchmark datasets and the exhaustive subset-search oracle.

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::dataset::{Class, FeatureMask, FoldAssignment, LabeledDataset};
use crate::error::{Error, Result};
use crate::neighbors::KnnConfig;
use crate::scalar::Scalar;
use crate::search::Criterion;
use crate::seed;

/// Largest feature count the exhaustive oracle accepts.
pub const EXHAUSTIVE_MAX_FEATURES: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub n_features: usize,
    /// Zero-based label-bearing columns.
    pub informative: Vec<usize>,
    pub n_minority: usize,
    pub n_majority: usize,
    /// Distance between the class means on each informative column, in
    /// within-class standard deviations.
    pub class_separation: f64,
    /// Standard deviation of the uninformative columns.
    pub noise_sd: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// 12 features, columns 2, 6 and 10 (1-based) informative, 1:2 imbalance.
    pub fn planted(seed: u64) -> Self {
        Self {
            n_features: 12,
            informative: vec![1, 5, 9],
            n_minority: 40,
            n_majority: 80,
            class_separation: 2.0,
            noise_sd: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_features == 0 {
            return Err(Error::invalid("n_features must be positive"));
        }
        if self.informative.is_empty() {
            return Err(Error::invalid(
                "at least one informative feature is required",
            ));
        }
        if let Some(&m) = self.informative.iter().find(|&&m| m >= self.n_features) {
            return Err(Error::invalid(format!(
                "informative index {} exceeds {}",
                m + 1,
                self.n_features
            )));
        }
        if self.n_minority == 0 || self.n_majority == 0 {
            return Err(Error::invalid("both classes need at least one sample"));
        }
        if !(self.class_separation >= 0.0 && self.class_separation.is_finite()) {
            return Err(Error::invalid("class separation must be >= 0"));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::invalid("noise_sd must be >= 0"));
        }
        Ok(())
    }

    pub fn informative_mask(&self) -> FeatureMask {
        FeatureMask::from_indices(self.n_features, &self.informative).expect("validated indices")
    }
}

/// Minority rows come first, then majority rows. Row `i` draws from its own
/// stream `(seed, i)`.
pub fn generate<T: Scalar>(spec: &SynthSpec) -> Result<LabeledDataset<T>> {
    spec.validate()?;
    let half = spec.class_separation / 2.0;
    let informative = spec.informative_mask();
    let noise = Normal::new(0.0, spec.noise_sd).map_err(|e| Error::invalid(e.to_string()))?;
    let total = spec.n_minority + spec.n_majority;
    let mut ids = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut features = Vec::with_capacity(total * spec.n_features);
    for i in 0..total {
        let class = if i < spec.n_minority {
            Class::Minority
        } else {
            Class::Majority
        };
        let signal =
            Normal::new(if class.is_positive() { half } else { -half }, 1.0).expect("unit sd");
        let mut rng = seed::rng(spec.seed, &[seed::SYNTH, i as u64]);
        for &on in informative.bits() {
            let v = if on {
                signal.sample(&mut rng)
            } else {
                noise.sample(&mut rng)
            };
            features.push(T::of(v));
        }
        ids.push(format!("s{i:05}"));
        labels.push(class);
    }
    LabeledDataset::from_flat(
        ids,
        features,
        spec.n_features,
        labels,
        Some("synth".to_owned()),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct Exhaustive<T> {
    pub mask: FeatureMask,
    pub j: T,
    pub evaluated: usize,
}

/// Evaluates the criterion on every non-empty subset and returns the minimum;
/// ties go to the smaller cardinality, then to the smaller binary code.
pub fn exhaustive_best_subset<T: Scalar>(
    train: &LabeledDataset<T>,
    folds: &FoldAssignment,
    knn: &KnnConfig,
) -> Result<Exhaustive<T>> {
    let n = train.n_features();
    if n > EXHAUSTIVE_MAX_FEATURES {
        return Err(Error::invalid(format!(
            "exhaustive search is limited to {EXHAUSTIVE_MAX_FEATURES} features, got {n}"
        )));
    }
    let criterion = Criterion::new(train, folds, *knn)?;
    let values: Vec<T> = (1u64..1 << n)
        .into_par_iter()
        .map(|code| criterion.evaluate(&FeatureMask::from_code(n, code)))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        let (code, best_code) = (i as u64 + 1, best as u64 + 1);
        if *v < values[best] || (*v == values[best] && code.count_ones() < best_code.count_ones()) {
            best = i;
        }
    }
    Ok(Exhaustive {
        mask: FeatureMask::from_code(n, best as u64 + 1),
        j: values[best],
        evaluated: values.len(),
    })
}
