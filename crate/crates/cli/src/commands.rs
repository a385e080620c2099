//! Pipeline commands. Each one is a pure function of its configuration and
//! input files and writes its outputs under `cfg.out`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use csme_core::dataset::{self, project, Class, FeatureMask};
use csme_core::metrics::{
    self, auc, operating_point_a, operating_point_b, roc_curve, OperatingPoint,
};
use csme_core::neighbors::Knn;
use csme_core::oversample::{smote, OversampleConfig};
use csme_core::search::{multi_run_select, Algorithm};
use csme_core::synth;
use csme_core::{Dataset, Report, Roc};

use crate::config::PipelineConfig;

fn load(path: &Path) -> Result<Dataset> {
    Ok(dataset::load_feature_file(path)?)
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).with_context(|| format!("{}", path.display()))?;
    Ok(path)
}

fn out_dir(cfg: &PipelineConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("{}", cfg.out.display()))?;
    Ok(&cfg.out)
}

/// Renders `rows` (header first) as an aligned text table and as CSV.
pub fn tables(rows: &[Vec<String>]) -> (String, String) {
    let cols = rows.first().map_or(0, Vec::len);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut text = String::new();
    let mut csv = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (cell, &w))| {
                if c == 0 {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        let _ = writeln!(text, "{}", cells.join("  ").trim_end());
        let _ = writeln!(csv, "{}", row.join(","));
    }
    (text, csv)
}

pub fn cmd_synth(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let data: Dataset = synth::generate(&cfg.synth)?;
    let dir = out_dir(cfg)?;
    Ok(vec![write(
        dir.join("synth.csv"),
        &dataset::to_feature_string(&data),
    )?])
}

pub fn cmd_split(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let input = PipelineConfig::require(&cfg.input, "input")?;
    let data = load(&input)?;
    let (train, test) = dataset::stratified_split(&data, cfg.test_fraction, cfg.seed)?;
    let dir = out_dir(cfg)?;
    Ok(vec![
        write(dir.join("train.csv"), &dataset::to_feature_string(&train))?,
        write(dir.join("test.csv"), &dataset::to_feature_string(&test))?,
    ])
}

pub fn cmd_oversample(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let train = load(&PipelineConfig::require(&cfg.train, "train")?)?;
    let balanced = smote(&train, &cfg.oversample)?;
    let dir = out_dir(cfg)?;
    Ok(vec![write(
        dir.join("balanced.csv"),
        &dataset::to_feature_string(&balanced),
    )?])
}

/// Oversamples the training file at `cfg.oversample.r` and runs the
/// multi-run search.
pub fn select(cfg: &PipelineConfig, algorithm: Algorithm) -> Result<Report> {
    let train = load(&PipelineConfig::require(&cfg.train, "train")?)?;
    let balanced = smote(&train, &cfg.oversample)?;
    Ok(multi_run_select(algorithm, &balanced, &cfg.search)?)
}

pub fn cmd_select(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let report = select(cfg, cfg.algorithm)?;
    let dir = out_dir(cfg)?;
    Ok(vec![
        write(dir.join("selection_report.txt"), &report.to_text())?,
        write(dir.join("selection_summary.csv"), &report.summary_csv())?,
        write(dir.join("selection_runs.csv"), &report.runs_csv())?,
        write(
            dir.join("best_mask.txt"),
            &report.best_overall.to_mask_file(),
        )?,
    ])
}

/// Test-set performance of k-NN trained on the (oversampled, projected)
/// training set.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub r: f64,
    pub train_minority: usize,
    pub train_majority: usize,
    pub features: usize,
    pub se: f64,
    pub sp: f64,
    pub accuracy: f64,
    pub auc: f64,
    pub roc: Roc,
    pub point_a: OperatingPoint<f64>,
    pub point_b: Option<OperatingPoint<f64>>,
}

pub fn evaluate(
    cfg: &PipelineConfig,
    train: &Dataset,
    test: &Dataset,
    mask: Option<&FeatureMask>,
    oversample: &OversampleConfig,
) -> Result<Evaluation> {
    if train.n_features() != test.n_features() {
        bail!(
            "train has {} features but test has {}",
            train.n_features(),
            test.n_features()
        );
    }
    let balanced = smote(train, oversample)?;
    let (fit, queries) = match mask {
        Some(m) => (project(&balanced, m)?, project(test, m)?),
        None => (balanced, test.clone()),
    };
    let knn = Knn::fit(&fit, &cfg.search.knn)?;
    let scores = knn.scores(&queries, cfg.search.parallel)?;
    let predicted: Vec<Class> = scores
        .iter()
        .map(|&s| {
            if s > cfg.threshold {
                Class::Minority
            } else {
                Class::Majority
            }
        })
        .collect();
    let summary = metrics::summary::<f64>(&metrics::confusion(queries.labels(), &predicted)?)?;
    let roc = roc_curve(queries.labels(), &scores)?;
    Ok(Evaluation {
        r: oversample.r,
        train_minority: fit.class_count(Class::Minority),
        train_majority: fit.class_count(Class::Majority),
        features: fit.n_features(),
        se: summary.se,
        sp: summary.sp,
        accuracy: summary.accuracy,
        auc: auc(&roc),
        point_a: operating_point_a(&roc),
        point_b: operating_point_b(&roc, cfg.min_se).ok(),
        roc,
    })
}

fn point_pairs(
    cfg: &PipelineConfig,
    name: &str,
    point: Option<&OperatingPoint<f64>>,
) -> Vec<(String, String)> {
    let field = |f: &dyn Fn(&OperatingPoint<f64>) -> f64| {
        point.map_or("undefined".to_owned(), |p| f(p).to_string())
    };
    vec![
        (format!("{name}_threshold"), field(&|p| p.threshold)),
        (format!("{name}_se"), field(&|p| p.se)),
        (format!("{name}_sp"), field(&|p| p.sp)),
        (
            format!("{name}_accuracy"),
            field(&|p| p.accuracy.unwrap_or(f64::NAN)),
        ),
        (
            format!("{name}_expected_cost"),
            field(&|p| p.expected_cost(cfg.prevalence, cfg.c_fn, cfg.c_fp)),
        ),
    ]
}

pub fn evaluation_pairs(cfg: &PipelineConfig, ev: &Evaluation) -> Vec<(String, String)> {
    let mut pairs = vec![
        ("r".to_owned(), ev.r.to_string()),
        ("features".to_owned(), ev.features.to_string()),
        ("train_minority".to_owned(), ev.train_minority.to_string()),
        ("train_majority".to_owned(), ev.train_majority.to_string()),
        ("threshold".to_owned(), cfg.threshold.to_string()),
        ("se".to_owned(), ev.se.to_string()),
        ("sp".to_owned(), ev.sp.to_string()),
        ("accuracy".to_owned(), ev.accuracy.to_string()),
        ("auc".to_owned(), ev.auc.to_string()),
        ("min_se".to_owned(), cfg.min_se.to_string()),
        ("prevalence".to_owned(), cfg.prevalence.to_string()),
        ("c_fn".to_owned(), cfg.c_fn.to_string()),
        ("c_fp".to_owned(), cfg.c_fp.to_string()),
    ];
    pairs.extend(point_pairs(cfg, "point_a", Some(&ev.point_a)));
    pairs.extend(point_pairs(cfg, "point_b", ev.point_b.as_ref()));
    pairs
}

pub fn cmd_evaluate(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let train = load(&PipelineConfig::require(&cfg.train, "train")?)?;
    let test = load(&PipelineConfig::require(&cfg.test, "test")?)?;
    let mask = cfg.mask.as_deref().map(FeatureMask::read).transpose()?;
    if let Some(m) = &mask {
        if m.len() != train.n_features() {
            bail!(
                "mask covers {} features but the data has {}",
                m.len(),
                train.n_features()
            );
        }
    }
    let ev = evaluate(cfg, &train, &test, mask.as_ref(), &cfg.oversample)?;
    let mut rows = vec![vec!["key".to_owned(), "value".to_owned()]];
    rows.extend(
        evaluation_pairs(cfg, &ev)
            .into_iter()
            .map(|(k, v)| vec![k, v]),
    );
    let (text, csv) = tables(&rows);
    let dir = out_dir(cfg)?;
    Ok(vec![
        write(dir.join("evaluate_report.txt"), &text)?,
        write(dir.join("evaluate_report.csv"), &csv)?,
        write(dir.join("roc.csv"), &ev.roc.to_csv())?,
    ])
}

/// One evaluation per ratio in `cfg.r_values`, in order.
pub fn sweep_r(cfg: &PipelineConfig, train: &Dataset, test: &Dataset) -> Result<Vec<Evaluation>> {
    cfg.r_values
        .iter()
        .map(|&r| {
            let oversample = OversampleConfig {
                r,
                ..cfg.oversample
            };
            evaluate(cfg, train, test, None, &oversample)
        })
        .collect()
}

pub fn cmd_sweep_r(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    if cfg.r_values.is_empty() {
        bail!("r_values is empty");
    }
    let train = load(&PipelineConfig::require(&cfg.train, "train")?)?;
    let test = load(&PipelineConfig::require(&cfg.test, "test")?)?;
    let evals = sweep_r(cfg, &train, &test)?;
    let mut rows = vec![[
        "r",
        "train_minority",
        "train_majority",
        "auc",
        "se",
        "sp",
        "accuracy",
        "roc_file",
    ]
    .map(String::from)
    .to_vec()];
    let dir = out_dir(cfg)?;
    let mut written = Vec::new();
    for (i, ev) in evals.iter().enumerate() {
        let roc_name = format!("roc_r{i}.csv");
        written.push(write(dir.join(&roc_name), &ev.roc.to_csv())?);
        rows.push(vec![
            ev.r.to_string(),
            ev.train_minority.to_string(),
            ev.train_majority.to_string(),
            ev.auc.to_string(),
            ev.se.to_string(),
            ev.sp.to_string(),
            ev.accuracy.to_string(),
            roc_name,
        ]);
    }
    let (text, csv) = tables(&rows);
    written.insert(0, write(dir.join("sweep_report.txt"), &text)?);
    written.insert(1, write(dir.join("sweep_report.csv"), &csv)?);
    Ok(written)
}
