//! Command-line interface: `resample`, `eval` and `benchmark`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::benchmark::{
    evaluate_split, positive_label, run_benchmark, BenchmarkPlan, ClassifierSpec, SAMPLER_STREAM,
};
use crate::dataset::{class_summary, load_csv, stratified_split, LabelColumn, SplitSpec};
use crate::error::{Error, Result};
use crate::samplers::{resample_with_batch, Method, SamplerConfig};
use crate::seeded_rng;

#[derive(Debug, Parser)]
#[command(name = "kwsmote", version, about = "Kernel-weighted minority oversampling and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Oversample the minority class of a CSV until classes are balanced.
    Resample(ResampleArgs),
    /// Train and score one classifier, printing a JSON report.
    Eval(EvalArgs),
    /// Run every cell of a benchmark plan.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    None,
    Smote,
    Kwsmote,
    Normal,
    Snocc,
}

impl MethodArg {
    fn method(self) -> Option<Method> {
        match self {
            MethodArg::None => None,
            MethodArg::Smote => Some(Method::Smote),
            MethodArg::Kwsmote => Some(Method::Kwsmote),
            MethodArg::Normal => Some(Method::NormalCenter),
            MethodArg::Snocc => Some(Method::Snocc),
        }
    }

    fn name(self) -> &'static str {
        self.method().map_or("none", |m| m.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierArg {
    Knn,
    Logistic,
}

#[derive(Debug, Clone, Args)]
pub struct SamplerArgs {
    #[arg(long, value_enum, default_value = "kwsmote")]
    pub method: MethodArg,
    /// Nearest neighbors per seed row.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Neighbors combined per sample (kwsmote, snocc).
    #[arg(long, default_value_t = 3)]
    pub c: usize,
    /// Skip threshold on the largest neighbor kernel weight (kwsmote).
    #[arg(long, default_value_t = 0.01)]
    pub tau: f64,
    /// Gaussian kernel width; the variance heuristic is used when absent.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Spread of the normal-center multiplier.
    #[arg(long, default_value_t = 0.5)]
    pub sigma_normal: f64,
    #[arg(long, default_value_t = 100)]
    pub max_attempt_factor: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SamplerArgs {
    fn config(&self) -> Result<Option<SamplerConfig>> {
        let Some(method) = self.method.method() else {
            return Ok(None);
        };
        let cfg = SamplerConfig {
            method,
            k_neighbors: self.k,
            convex_points: self.c,
            threshold: self.tau,
            sigma: self.sigma,
            sigma_normal: self.sigma_normal,
            max_attempt_factor: self.max_attempt_factor,
        };
        cfg.validate()?;
        Ok(Some(cfg))
    }
}

#[derive(Debug, Clone, Args)]
pub struct ResampleArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Label column name or zero-based index.
    #[arg(long)]
    pub label: String,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long)]
    pub output: PathBuf,
    /// Append a `synthetic` 0/1 column to the output.
    #[arg(long)]
    pub emit_synthetic_flag: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Single CSV to split into train and test.
    #[arg(long, conflicts_with_all = ["train", "test"], required_unless_present = "train")]
    pub input: Option<PathBuf>,
    /// Pre-split training CSV.
    #[arg(long, requires = "test")]
    pub train: Option<PathBuf>,
    /// Pre-split test CSV.
    #[arg(long, requires = "train")]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub label: String,
    /// Positive class for metrics; the minority class when absent.
    #[arg(long)]
    pub positive_label: Option<String>,
    #[arg(long, default_value_t = 0.7)]
    pub train_fraction: f64,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long, value_enum, default_value = "knn")]
    pub classifier: ClassifierArg,
    #[arg(long, default_value_t = 5)]
    pub k_votes: usize,
    #[arg(long, default_value_t = 500)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    /// Dataset name used in the report; defaults to the file stem.
    #[arg(long)]
    pub dataset_id: Option<String>,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchmarkArgs {
    /// TOML plan file.
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long)]
    pub output_json: PathBuf,
    #[arg(long)]
    pub output_csv: PathBuf,
}

fn write_file(path: &PathBuf, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Resample(args) => cmd_resample(&args, out),
        Command::Eval(args) => cmd_eval(&args, out),
        Command::Benchmark(args) => cmd_benchmark(&args, out),
    }
}

pub fn cmd_resample(args: &ResampleArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = args.sampler.config()?;
    let ds = load_csv(&args.input, &LabelColumn::Name(args.label.clone()))?;
    let before = class_summary(&ds);
    writeln!(
        out,
        "before: {} x {} (minority), {} x {} (majority)",
        before.minority_count, before.minority_label, before.majority_count, before.majority_label
    )
    .map_err(io_err)?;

    let (resampled, skipped) = match &cfg {
        Some(cfg) if before.minority_count != before.majority_count => {
            let mut rng = seeded_rng(args.sampler.seed, SAMPLER_STREAM);
            let (resampled, batch) = resample_with_batch(&ds, cfg, &mut rng)?;
            if let Some(bw) = batch.bandwidth {
                writeln!(out, "sigma: {} ({:?})", bw.sigma(), bw.source()).map_err(io_err)?;
            }
            (resampled, batch.skipped_count)
        }
        Some(_) => {
            writeln!(out, "classes already balanced; nothing generated").map_err(io_err)?;
            (ds.clone(), 0)
        }
        None => {
            writeln!(out, "method none; dataset copied unchanged").map_err(io_err)?;
            (ds.clone(), 0)
        }
    };

    let after = class_summary(&resampled);
    writeln!(
        out,
        "after: {} x {}, {} x {}",
        after.minority_count, after.minority_label, after.majority_count, after.majority_label
    )
    .map_err(io_err)?;
    writeln!(out, "generated: {}", resampled.n_samples() - ds.n_samples()).map_err(io_err)?;
    writeln!(out, "skipped_count: {skipped}").map_err(io_err)?;

    let flag_from = args.emit_synthetic_flag.then_some(ds.n_samples());
    resampled.save_csv(&args.output, flag_from)
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let sampler = args.sampler.config()?;
    let classifier = match args.classifier {
        ClassifierArg::Knn => ClassifierSpec::Knn {
            k_votes: args.k_votes,
        },
        ClassifierArg::Logistic => ClassifierSpec::Logistic {
            epochs: args.epochs,
            learning_rate: args.learning_rate,
        },
    };
    let label = LabelColumn::Name(args.label.clone());
    let seed = args.sampler.seed;

    let (source, train, test) = match (&args.input, &args.train, &args.test) {
        (Some(input), _, _) => {
            let ds = load_csv(input, &label)?;
            let spec = SplitSpec::new(args.train_fraction, seed)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            let (train, test) = stratified_split(&ds, &spec)?;
            (input, train, test)
        }
        (None, Some(train), Some(test)) => (train, load_csv(train, &label)?, load_csv(test, &label)?),
        _ => return Err(Error::InvalidConfig("need --input or both --train and --test".into())),
    };
    let dataset_id = args.dataset_id.clone().unwrap_or_else(|| {
        source
            .file_stem()
            .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned())
    });
    let positive = positive_label(&train, args.positive_label.as_deref())?;

    let report = evaluate_split(
        &dataset_id,
        &train,
        &test,
        args.sampler.method.name(),
        sampler.as_ref(),
        classifier.kind(),
        &classifier,
        &positive,
        seed,
    )?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    out.write_all(json.as_bytes()).map_err(io_err)?;
    if let Some(path) = &args.output {
        write_file(path, &json)?;
    }
    Ok(())
}

pub fn cmd_benchmark(args: &BenchmarkArgs, out: &mut dyn Write) -> Result<()> {
    let plan = BenchmarkPlan::load(&args.plan)?;
    let report = run_benchmark(&plan)?;
    write_file(&args.output_json, &report.to_json()?)?;
    write_file(&args.output_csv, &report.to_csv()?)?;
    out.write_all(report.render_table().as_bytes()).map_err(io_err)?;
    let failed: usize = report.cells.iter().map(|c| c.n_failed).sum();
    let total: usize = report.cells.iter().map(|c| c.runs.len()).sum();
    writeln!(out, "{} runs, {} failed", total, failed).map_err(io_err)?;
    Ok(())
}
