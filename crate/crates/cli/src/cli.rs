use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use csme_core::search::Algorithm;

use crate::commands;
use crate::config::PipelineConfig;

#[derive(Parser, Debug)]
#[command(
    name = "csme",
    version,
    about = "Class balancing, wrapper feature selection and ROC evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Flat key = value config file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for splitting, oversampling, search and synthesis
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reduced runs and evaluation budget
    #[arg(long, global = true)]
    desk_scale: bool,
    /// Evaluate everything on the calling thread
    #[arg(long, global = true)]
    serial: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stratified train/test split of a feature file
    Split {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        test_fraction: Option<f64>,
    },
    /// SMOTE-balance a training file
    Oversample {
        #[arg(long)]
        train: Option<PathBuf>,
        #[command(flatten)]
        balance: Balance,
    },
    /// Multi-run wrapper feature selection on the balanced training set
    Select {
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long, value_enum)]
        algorithm: Option<AlgorithmArg>,
        #[command(flatten)]
        balance: Balance,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Test-set metrics, ROC curve and operating points
    Evaluate {
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        test: Option<PathBuf>,
        /// Mask file selecting the features to use
        #[arg(long)]
        mask: Option<PathBuf>,
        #[command(flatten)]
        balance: Balance,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Test-set metrics for several oversampling ratios
    SweepR {
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        test: Option<PathBuf>,
        /// Comma-separated ratios
        #[arg(long)]
        r_values: Option<String>,
        #[command(flatten)]
        balance: Balance,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Planted-subset synthetic feature file
    Synth {
        #[arg(long)]
        n_features: Option<usize>,
        /// Comma-separated 1-based informative features
        #[arg(long)]
        informative: Option<String>,
        #[arg(long)]
        n_minority: Option<usize>,
        #[arg(long)]
        n_majority: Option<usize>,
        #[arg(long)]
        separation: Option<f64>,
        #[arg(long)]
        noise_sd: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgorithmArg {
    Ga,
    Bpso,
}

#[derive(Args, Debug)]
struct Balance {
    /// Oversampling ratio
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    k_neighbors: Option<usize>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    knn_k: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    fe_budget: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    pc: Option<f64>,
    #[arg(long)]
    pm: Option<f64>,
    #[arg(long)]
    mix: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    vmax: Option<f64>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    knn_k: Option<usize>,
    /// Z-score features with training statistics before k-NN
    #[arg(long)]
    standardize: bool,
    /// Score threshold for the reported SE/SP/accuracy
    #[arg(long)]
    threshold: Option<f64>,
    /// Minimum sensitivity of operating point B
    #[arg(long)]
    min_se: Option<f64>,
    #[arg(long)]
    prevalence: Option<f64>,
    #[arg(long)]
    c_fn: Option<f64>,
    #[arg(long)]
    c_fp: Option<f64>,
}

#[derive(Default)]
struct Overrides(Vec<(String, String)>);

impl Overrides {
    fn set<V: ToString>(&mut self, key: &str, value: Option<V>) {
        if let Some(v) = value {
            self.0.push((key.to_owned(), v.to_string()));
        }
    }

    fn path(&mut self, key: &str, value: Option<PathBuf>) {
        self.set(key, value.map(|p| p.display().to_string()));
    }

    fn balance(&mut self, b: Balance) {
        self.set("r", b.r);
        self.set("k_neighbors", b.k_neighbors);
    }

    fn eval(&mut self, e: EvalArgs) {
        self.set("knn_k", e.knn_k);
        if e.standardize {
            self.set("standardize", Some(true));
        }
        self.set("threshold", e.threshold);
        self.set("min_se", e.min_se);
        self.set("prevalence", e.prevalence);
        self.set("c_fn", e.c_fn);
        self.set("c_fp", e.c_fp);
    }
}

type CommandFn = fn(&PipelineConfig) -> Result<Vec<PathBuf>>;

/// Parses `args` (program name first), runs the command and returns the
/// files it wrote.
pub fn run<I, T>(args: I) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let mut o = Overrides::default();
    o.set("seed", cli.common.seed);
    o.path("out", cli.common.out);
    if cli.common.serial {
        o.set("parallel", Some(false));
    }
    let command: CommandFn = match cli.command {
        Command::Split {
            input,
            test_fraction,
        } => {
            o.path("input", input);
            o.set("test_fraction", test_fraction);
            commands::cmd_split
        }
        Command::Oversample { train, balance } => {
            o.path("train", train);
            o.balance(balance);
            commands::cmd_oversample
        }
        Command::Select {
            train,
            algorithm,
            balance,
            search,
        } => {
            o.path("train", train);
            o.set(
                "algorithm",
                algorithm.map(|a| match a {
                    AlgorithmArg::Ga => Algorithm::Ga,
                    AlgorithmArg::Bpso => Algorithm::Bpso,
                }),
            );
            o.balance(balance);
            o.set("knn_k", search.knn_k);
            o.set("folds", search.folds);
            o.set("population", search.population);
            o.set("fe_budget", search.fe_budget);
            o.set("runs", search.runs);
            o.set("pc", search.pc);
            o.set("pm", search.pm);
            o.set("mix", search.mix);
            o.set("omega", search.omega);
            o.set("c1", search.c1);
            o.set("c2", search.c2);
            o.set("vmax", search.vmax);
            commands::cmd_select
        }
        Command::Evaluate {
            train,
            test,
            mask,
            balance,
            eval,
        } => {
            o.path("train", train);
            o.path("test", test);
            o.path("mask", mask);
            o.balance(balance);
            o.eval(eval);
            commands::cmd_evaluate
        }
        Command::SweepR {
            train,
            test,
            r_values,
            balance,
            eval,
        } => {
            o.path("train", train);
            o.path("test", test);
            o.set("r_values", r_values);
            o.balance(balance);
            o.eval(eval);
            commands::cmd_sweep_r
        }
        Command::Synth {
            n_features,
            informative,
            n_minority,
            n_majority,
            separation,
            noise_sd,
        } => {
            o.set("n_features", n_features);
            o.set("informative", informative);
            o.set("n_minority", n_minority);
            o.set("n_majority", n_majority);
            o.set("separation", separation);
            o.set("noise_sd", noise_sd);
            commands::cmd_synth
        }
    };
    let cfg = PipelineConfig::resolve(cli.common.config.as_deref(), cli.common.desk_scale, &o.0)?;
    command(&cfg)
}
