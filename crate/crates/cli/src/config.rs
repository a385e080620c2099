//! Flat `key = value` pipeline configuration.
//!
//! Values are layered: built-in defaults, then the desk-scale preset when
//! requested, then the config file, then command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use csme_core::search::Algorithm;
use csme_core::synth::SynthSpec;
use csme_core::{Config, OversampleConfig};

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub mask: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub test_fraction: f64,
    pub oversample: OversampleConfig,
    pub search: Config,
    pub algorithm: Algorithm,
    pub threshold: f64,
    pub min_se: f64,
    pub prevalence: f64,
    pub c_fn: f64,
    pub c_fp: f64,
    pub r_values: Vec<f64>,
    pub synth: SynthSpec,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: None,
            train: None,
            test: None,
            mask: None,
            out: PathBuf::from("."),
            seed: 0,
            test_fraction: 0.2,
            oversample: OversampleConfig::default(),
            search: Config::default(),
            algorithm: Algorithm::Ga,
            threshold: 0.5,
            min_se: 0.95,
            prevalence: 0.015,
            c_fn: 1.0,
            c_fp: 1.0,
            r_values: vec![0.0, 0.5, 1.0, 1.5, 2.0],
            synth: SynthSpec::planted(0),
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment line.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key = value, got {line:?}", i + 1);
        };
        pairs.push((normalize(k), v.trim().to_owned()));
    }
    Ok(pairs)
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| anyhow::anyhow!("{key}: bad list element {s:?}"))
        })
        .collect()
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| anyhow::anyhow!("{key}: cannot parse {value:?}"))
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => bail!("{key}: expected true or false, got {value:?}"),
    }
}

impl PipelineConfig {
    /// Builds the layered configuration from an optional config file and flag
    /// overrides (already in `key, value` form).
    pub fn resolve(
        config_file: Option<&Path>,
        desk_scale: bool,
        overrides: &[(String, String)],
    ) -> Result<Self> {
        let file_pairs = match config_file {
            Some(path) => {
                let text =
                    fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
                parse_pairs(&text)?
            }
            None => Vec::new(),
        };
        let desk = desk_scale
            || file_pairs
                .iter()
                .any(|(k, v)| k == "desk_scale" && flag(k, v).unwrap_or(false));
        let mut cfg = Self::default();
        if desk {
            cfg.search = Config::desk_scale();
        }
        for (k, v) in file_pairs.iter().chain(overrides) {
            cfg.apply(k, v)?;
        }
        // a single seed drives every stochastic stage
        cfg.oversample.seed = cfg.seed;
        cfg.search.master_seed = cfg.seed;
        cfg.synth.seed = cfg.seed;
        Ok(cfg)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let key = normalize(key);
        let k = key.as_str();
        match k {
            "input" => self.input = Some(PathBuf::from(value)),
            "train" => self.train = Some(PathBuf::from(value)),
            "test" => self.test = Some(PathBuf::from(value)),
            "mask" => self.mask = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = num(k, value)?,
            "desk_scale" => {
                flag(k, value)?;
            }
            "test_fraction" => self.test_fraction = num(k, value)?,
            "r" => self.oversample.r = num(k, value)?,
            "k_neighbors" => self.oversample.k_neighbors = num(k, value)?,
            "algorithm" => self.algorithm = value.parse()?,
            "knn_k" => self.search.knn.k = num(k, value)?,
            "standardize" => self.search.knn.standardize = flag(k, value)?,
            "folds" => self.search.cv_folds = num(k, value)?,
            "population" => self.search.population_size = num(k, value)?,
            "fe_budget" => self.search.fe_budget = num(k, value)?,
            "runs" => self.search.runs = num(k, value)?,
            "pc" => self.search.ga_pc = num(k, value)?,
            "pm" => self.search.ga_pm = Some(num(k, value)?),
            "mix" => self.search.ga_mix = num(k, value)?,
            "omega" => self.search.bpso_omega = num(k, value)?,
            "c1" => self.search.bpso_c1 = num(k, value)?,
            "c2" => self.search.bpso_c2 = num(k, value)?,
            "vmax" => self.search.bpso_vmax = num(k, value)?,
            "parallel" => self.search.parallel = flag(k, value)?,
            "threshold" => self.threshold = num(k, value)?,
            "min_se" => self.min_se = num(k, value)?,
            "prevalence" => self.prevalence = num(k, value)?,
            "c_fn" => self.c_fn = num(k, value)?,
            "c_fp" => self.c_fp = num(k, value)?,
            "r_values" => self.r_values = list(k, value)?,
            "n_features" => self.synth.n_features = num(k, value)?,
            "informative" => {
                let one_based: Vec<usize> = list(k, value)?;
                if one_based.contains(&0) {
                    bail!("informative: feature indices are 1-based");
                }
                self.synth.informative = one_based.into_iter().map(|m| m - 1).collect();
            }
            "n_minority" => self.synth.n_minority = num(k, value)?,
            "n_majority" => self.synth.n_majority = num(k, value)?,
            "separation" => self.synth.class_separation = num(k, value)?,
            "noise_sd" => self.synth.noise_sd = num(k, value)?,
            _ => bail!("unknown config key {key:?}"),
        }
        Ok(())
    }

    pub fn require(path: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
        match path {
            Some(p) => Ok(p.clone()),
            None => bail!("missing --{what}"),
        }
    }
}
