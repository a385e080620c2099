//! Screening pipeline for skewed binary feature datasets.
//!
//! The crate covers everything downstream of feature extraction:
//!
//! - [`dataset`]: feature-file I/O, stratified splitting and k-fold assignment,
//!   projection onto feature subsets.
//! - [`oversample`]: SMOTE class balancing controlled by an oversampling ratio.
//! - [`neighbors`]: brute-force k-NN scoring and classification.
//! - [`metrics`]: confusion summaries, ROC curves, AUC, operating points and the
//!   feature-selection summary percentages.
//! - [`search`]: the cross-validated AUC criterion, GA and binary PSO wrappers,
//!   and multi-run selection.
//! - [`synth`]: planted-subset benchmark generation and exhaustive-search oracle.
//!
//! All numeric code is generic over [`Scalar`]; the aliases below fix it to `f64`
//! (the default everywhere in the CLI) or `f32`.

pub mod dataset;
pub mod error;
pub mod metrics;
pub mod neighbors;
pub mod oversample;
pub mod scalar;
pub mod search;
pub mod seed;
pub mod synth;

pub use dataset::{Class, FeatureMask, FoldAssignment, LabeledDataset};
pub use error::{Error, Result};
pub use metrics::{ConfusionMatrix, OperatingPoint, RocCurve, RocPoint};
pub use neighbors::KnnConfig;
pub use oversample::OversampleConfig;
pub use scalar::Scalar;
pub use search::{Algorithm, RunResult, SearchConfig, SelectionReport};
pub use synth::SynthSpec;

pub type Dataset = LabeledDataset<f64>;
pub type Dataset32 = LabeledDataset<f32>;
pub type Roc = RocCurve<f64>;
pub type Roc32 = RocCurve<f32>;
pub type Config = SearchConfig<f64>;
pub type Config32 = SearchConfig<f32>;
pub type Report = SelectionReport<f64>;
pub type Report32 = SelectionReport<f32>;
