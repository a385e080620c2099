//! Wrapper feature selection over [`FeatureMask`] space.
//!
//! Each run fixes one stratified fold assignment (derived from the run seed) and
//! minimizes the cross-validated criterion with either a generational GA or a
//! binary PSO under a budget of criterion evaluations. [`multi_run_select`]
//! repeats independent runs and aggregates them.
//!
//! Random draws are taken serially per generation from the seed hierarchy and
//! only criterion evaluations run concurrently, so results do not depend on the
//! thread count or on [`SearchConfig::parallel`].

mod bpso;
mod criterion;
mod ga;
mod report;

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;

use crate::dataset::{stratified_kfold, FeatureMask, FoldAssignment, LabeledDataset};
use crate::error::{Error, Result};
use crate::metrics::{improvement_pi, reduction_xi};
use crate::neighbors::KnnConfig;
use crate::scalar::Scalar;
use crate::seed;

pub use bpso::bpso_run;
pub use criterion::{criterion, Criterion};
pub use ga::ga_run;

pub(crate) use criterion::Evaluator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ga,
    Bpso,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Ga => "ga",
            Algorithm::Bpso => "bpso",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ga" => Ok(Algorithm::Ga),
            "bpso" => Ok(Algorithm::Bpso),
            other => Err(Error::invalid(format!(
                "unknown algorithm {other:?}, expected one of {{ga, bpso}}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig<T> {
    pub population_size: usize,
    /// Criterion evaluations per run.
    pub fe_budget: usize,
    pub runs: usize,
    pub cv_folds: usize,
    pub knn: KnnConfig,
    /// Crossover probability.
    pub ga_pc: T,
    /// Per-bit mutation probability; `None` means `1/n`.
    pub ga_pm: Option<T>,
    /// Per-bit exchange probability of parameterized-uniform crossover.
    pub ga_mix: T,
    pub bpso_omega: T,
    pub bpso_c1: T,
    pub bpso_c2: T,
    pub bpso_vmax: T,
    pub master_seed: u64,
    /// Evaluate criterion calls (and runs) on the rayon pool.
    pub parallel: bool,
}

impl<T: Scalar> Default for SearchConfig<T> {
    fn default() -> Self {
        Self {
            population_size: 30,
            fe_budget: 6000,
            runs: 40,
            cv_folds: 10,
            knn: KnnConfig::default(),
            ga_pc: T::of(0.8),
            ga_pm: None,
            ga_mix: T::of(0.5),
            bpso_omega: T::one(),
            bpso_c1: T::of(2.0),
            bpso_c2: T::of(2.0),
            bpso_vmax: T::of(6.0),
            master_seed: 0,
            parallel: true,
        }
    }
}

impl<T: Scalar> SearchConfig<T> {
    /// Reduced runs and budget for quick experiments and tests.
    pub fn desk_scale() -> Self {
        Self {
            runs: 5,
            fe_budget: 900,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: T| {
            if v >= T::zero() && v <= T::one() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must lie in [0,1], got {v}")))
            }
        };
        if self.population_size < 2 {
            return Err(Error::invalid("population size must be at least 2"));
        }
        if self.fe_budget < self.population_size {
            return Err(Error::invalid(format!(
                "evaluation budget {} is below the population size {}",
                self.fe_budget, self.population_size
            )));
        }
        if self.runs == 0 {
            return Err(Error::invalid("at least one run is required"));
        }
        if self.cv_folds < 2 {
            return Err(Error::invalid("at least two folds are required"));
        }
        if self.knn.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        unit("ga_pc", self.ga_pc)?;
        unit("ga_mix", self.ga_mix)?;
        if let Some(pm) = self.ga_pm {
            unit("ga_pm", pm)?;
        }
        if !(self.bpso_vmax > T::zero() && self.bpso_vmax.is_finite()) {
            return Err(Error::invalid("bpso_vmax must be positive"));
        }
        for (name, v) in [
            ("bpso_omega", self.bpso_omega),
            ("bpso_c1", self.bpso_c1),
            ("bpso_c2", self.bpso_c2),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn generations(&self) -> usize {
        self.fe_budget / self.population_size
    }
}

/// Outcome of one optimizer run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult<T> {
    pub best_mask: FeatureMask,
    pub best_j: T,
    pub cardinality: usize,
    /// Best-so-far criterion after each generation, the initial one included.
    pub history: Vec<T>,
    pub evaluations: usize,
    pub run_seed: u64,
}

/// Fold assignment a run with `run_seed` optimizes over.
pub fn run_folds<T: Scalar>(
    train: &LabeledDataset<T>,
    cv_folds: usize,
    run_seed: u64,
) -> Result<FoldAssignment> {
    stratified_kfold(train, cv_folds, seed::derive(run_seed, &[seed::FOLDS]))
}

pub fn run_seed(master_seed: u64, run: usize) -> u64 {
    seed::derive(master_seed, &[seed::RUN, run as u64])
}

/// Sets one random bit if `bits` is all zero.
pub(crate) fn repair(bits: &mut [bool], rng: &mut seed::Rng) {
    if !bits.contains(&true) {
        let m = rng.random_range(0..bits.len());
        bits[m] = true;
    }
}

pub(crate) fn prepare<'a, T: Scalar>(
    train: &'a LabeledDataset<T>,
    cfg: &SearchConfig<T>,
    run_seed: u64,
) -> Result<Evaluator<'a, T>> {
    cfg.validate()?;
    if train.n_features() < 2 {
        return Err(Error::invalid(
            "feature selection needs at least two features",
        ));
    }
    let folds = run_folds(train, cfg.cv_folds, run_seed)?;
    Ok(Evaluator::new(
        Criterion::new(train, &folds, cfg.knn)?,
        cfg.parallel,
    ))
}

/// Index of the smallest value; ties go to the lower index.
pub(crate) fn argmin<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

pub fn run<T: Scalar>(
    algorithm: Algorithm,
    train: &LabeledDataset<T>,
    cfg: &SearchConfig<T>,
    run_seed: u64,
) -> Result<RunResult<T>> {
    match algorithm {
        Algorithm::Ga => ga_run(train, cfg, run_seed),
        Algorithm::Bpso => bpso_run(train, cfg, run_seed),
    }
}

/// Aggregate of independent runs.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionReport<T> {
    pub algorithm: Algorithm,
    pub n_features: usize,
    pub master_seed: u64,
    pub per_run: Vec<RunResult<T>>,
    pub best_run: usize,
    pub best_overall: FeatureMask,
    pub j_mean: T,
    pub j_sd: T,
    pub j_best: T,
    pub xi_mean: T,
    pub xi_sd: T,
    pub xi_best: usize,
    /// Criterion of the full feature set, averaged over the runs' fold
    /// assignments.
    pub j_prime: T,
    /// Undefined when the full set already scores a perfect criterion.
    pub pi_percent: Option<T>,
    pub xi_percent: T,
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_sd<T: Scalar>(values: &[T]) -> (T, T) {
    let n = T::of_usize(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    if values.len() < 2 {
        return (mean, T::zero());
    }
    let ss: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - T::one())).sqrt())
}

impl<T: Scalar> SelectionReport<T> {
    /// Aggregates finished runs. The best run has the lowest criterion, then the
    /// smallest cardinality, then the lowest index.
    pub fn from_runs(
        algorithm: Algorithm,
        n_features: usize,
        master_seed: u64,
        per_run: Vec<RunResult<T>>,
        j_prime: T,
    ) -> Result<Self> {
        if per_run.is_empty() {
            return Err(Error::invalid("no runs to aggregate"));
        }
        let mut best_run = 0;
        for (i, r) in per_run.iter().enumerate() {
            let b = &per_run[best_run];
            if r.best_j < b.best_j || (r.best_j == b.best_j && r.cardinality < b.cardinality) {
                best_run = i;
            }
        }
        let js: Vec<T> = per_run.iter().map(|r| r.best_j).collect();
        let xis: Vec<T> = per_run.iter().map(|r| T::of_usize(r.cardinality)).collect();
        let (j_mean, j_sd) = mean_sd(&js);
        let (xi_mean, xi_sd) = mean_sd(&xis);
        let pi_percent = if j_prime > T::zero() {
            Some(improvement_pi(j_prime, j_mean)?)
        } else {
            None
        };
        let xi_percent = reduction_xi(n_features, xi_mean)?;
        Ok(Self {
            algorithm,
            n_features,
            master_seed,
            best_overall: per_run[best_run].best_mask.clone(),
            j_best: per_run[best_run].best_j,
            xi_best: per_run[best_run].cardinality,
            best_run,
            per_run,
            j_mean,
            j_sd,
            xi_mean,
            xi_sd,
            j_prime,
            pi_percent,
            xi_percent,
        })
    }
}

/// Runs `cfg.runs` independent searches and aggregates them.
pub fn multi_run_select<T: Scalar>(
    algorithm: Algorithm,
    train: &LabeledDataset<T>,
    cfg: &SearchConfig<T>,
) -> Result<SelectionReport<T>> {
    cfg.validate()?;
    let seeds: Vec<u64> = (0..cfg.runs)
        .map(|r| run_seed(cfg.master_seed, r))
        .collect();
    let per_run: Vec<RunResult<T>> = if cfg.parallel {
        seeds
            .par_iter()
            .map(|&s| run(algorithm, train, cfg, s))
            .collect::<Result<_>>()?
    } else {
        seeds
            .iter()
            .map(|&s| run(algorithm, train, cfg, s))
            .collect::<Result<_>>()?
    };
    let full = FeatureMask::all_ones(train.n_features());
    let full_js: Vec<T> = seeds
        .iter()
        .map(|&s| {
            let folds = run_folds(train, cfg.cv_folds, s)?;
            criterion(&full, train, &folds, &cfg.knn)
        })
        .collect::<Result<_>>()?;
    let j_prime = mean_sd(&full_js).0;
    SelectionReport::from_runs(
        algorithm,
        train.n_features(),
        cfg.master_seed,
        per_run,
        j_prime,
    )
}
