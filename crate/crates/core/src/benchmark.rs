//! Benchmark plans and the split / resample / fit / evaluate pipeline.
//!
//! A plan is a TOML document:
//!
//! ```toml
//! train_fraction = 0.7          # optional, default 0.7
//! seeds = [1, 2, 3, 4, 5]
//!
//! [[datasets]]
//! path = "haberman.csv"         # relative to the plan file
//! label = "survival"            # column name or zero-based index
//! id = "haberman"               # optional, defaults to the file stem
//! positive_label = "2"          # optional, defaults to the minority class
//!
//! [[methods]]
//! method = "kwsmote"            # none | smote | kwsmote | normal | snocc
//! id = "kwsmote-k7"             # optional, defaults to the method name
//! k = 7
//! c = 3
//! tau = 0.01
//! sigma = 1.5                   # optional, heuristic when absent
//!
//! [[classifiers]]
//! kind = "knn"                  # knn | logistic
//! k_votes = 5
//! ```
//!
//! Every (dataset, method, classifier, seed) run is independent. A failing
//! run is recorded in the report and does not stop the others.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{knn_fit_predict, logistic_fit, logistic_predict, LogisticConfig};
use crate::dataset::{
    class_summary, load_csv, stratified_split, ClassLabel, LabelColumn, LabeledDataset, SplitSpec,
};
use crate::error::{Error, Result};
use crate::metrics::{ConfusionMatrix, EvalReport};
use crate::samplers::{resample, Method, SamplerConfig};
use crate::seeded_rng;

/// Generator stream used for resampling the training partition.
pub const SAMPLER_STREAM: u64 = 0x5eed_0002;
/// Generator stream used for classifier initialization.
pub const CLASSIFIER_STREAM: u64 = 0x5eed_0003;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelSpec {
    Index(usize),
    Name(String),
}

impl From<&LabelSpec> for LabelColumn {
    fn from(spec: &LabelSpec) -> Self {
        match spec {
            LabelSpec::Index(i) => LabelColumn::Index(*i),
            LabelSpec::Name(n) => LabelColumn::Name(n.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub path: PathBuf,
    pub label: LabelSpec,
    pub id: Option<String>,
    /// Positive class for metrics; the minority class when absent.
    pub positive_label: Option<String>,
}

impl DatasetEntry {
    pub fn id(&self) -> String {
        self.id.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.path.display().to_string())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodEntry {
    pub method: String,
    pub id: Option<String>,
    pub k: Option<usize>,
    pub c: Option<usize>,
    pub tau: Option<f64>,
    pub sigma: Option<f64>,
    pub sigma_normal: Option<f64>,
    pub max_attempt_factor: Option<usize>,
}

impl MethodEntry {
    pub fn id(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.method.clone())
    }

    /// `None` for the no-resampling baseline.
    pub fn sampler_config(&self) -> Result<Option<SamplerConfig>> {
        if self.method == "none" {
            return Ok(None);
        }
        let mut cfg = SamplerConfig::new(self.method.parse::<Method>()?);
        if let Some(k) = self.k {
            cfg.k_neighbors = k;
        }
        if let Some(c) = self.c {
            cfg.convex_points = c;
        }
        if let Some(tau) = self.tau {
            cfg.threshold = tau;
        }
        cfg.sigma = self.sigma;
        if let Some(s) = self.sigma_normal {
            cfg.sigma_normal = s;
        }
        if let Some(f) = self.max_attempt_factor {
            cfg.max_attempt_factor = f;
        }
        Ok(Some(cfg))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassifierSpec {
    Knn { k_votes: usize },
    Logistic { epochs: usize, learning_rate: f64 },
}

fn default_k_votes() -> usize {
    5
}

fn default_epochs() -> usize {
    LogisticConfig::default().epochs
}

fn default_learning_rate() -> f64 {
    LogisticConfig::default().learning_rate
}

fn default_train_fraction() -> f64 {
    0.7
}

impl ClassifierSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ClassifierSpec::Knn { .. } => "knn",
            ClassifierSpec::Logistic { .. } => "logistic",
        }
    }

    /// Fits on `train` and returns predictions and positive-class scores for
    /// the rows of `test`.
    pub fn fit_predict(
        &self,
        train: &LabeledDataset,
        test: &LabeledDataset,
        positive: &ClassLabel,
        seed: u64,
    ) -> Result<(Vec<ClassLabel>, Vec<f64>)> {
        match *self {
            ClassifierSpec::Knn { k_votes } => {
                knn_fit_predict(train, test.features(), k_votes, positive)
            }
            ClassifierSpec::Logistic {
                epochs,
                learning_rate,
            } => {
                let cfg = LogisticConfig {
                    epochs,
                    learning_rate,
                    init_scale: 0.0,
                };
                let mut rng = seeded_rng(seed, CLASSIFIER_STREAM);
                let model = logistic_fit(train, &cfg, positive, &mut rng)?;
                logistic_predict(&model, test.features())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierEntry {
    pub kind: String,
    pub id: Option<String>,
    pub k_votes: Option<usize>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
}

impl ClassifierEntry {
    pub fn spec(&self) -> Result<ClassifierSpec> {
        match self.kind.as_str() {
            "knn" => Ok(ClassifierSpec::Knn {
                k_votes: self.k_votes.unwrap_or_else(default_k_votes),
            }),
            "logistic" => Ok(ClassifierSpec::Logistic {
                epochs: self.epochs.unwrap_or_else(default_epochs),
                learning_rate: self.learning_rate.unwrap_or_else(default_learning_rate),
            }),
            other => Err(Error::InvalidConfig(format!("unknown classifier `{other}`"))),
        }
    }

    pub fn id(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.kind.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkPlan {
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    pub seeds: Vec<u64>,
    pub datasets: Vec<DatasetEntry>,
    pub methods: Vec<MethodEntry>,
    pub classifiers: Vec<ClassifierEntry>,
}

impl BenchmarkPlan {
    pub fn parse(text: &str) -> Result<Self> {
        let plan: BenchmarkPlan =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("plan: {e}")))?;
        plan.validate()?;
        Ok(plan)
    }

    /// Reads a plan file; relative dataset paths are resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut plan = Self::parse(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for d in &mut plan.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
        }
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(format!("plan: {m}")));
        if self.seeds.is_empty() || self.datasets.is_empty() || self.methods.is_empty() || self.classifiers.is_empty() {
            return bad("seeds, datasets, methods and classifiers must all be nonempty".into());
        }
        let distinct: HashSet<_> = self.seeds.iter().collect();
        if distinct.len() != self.seeds.len() {
            return bad("seeds must be distinct".into());
        }
        SplitSpec::new(self.train_fraction, 0).map_err(|e| Error::InvalidConfig(format!("plan: {e}")))?;
        for m in &self.methods {
            if m.method != "none" {
                m.method.parse::<Method>()?;
            }
        }
        for c in &self.classifiers {
            c.spec()?;
        }
        check_unique("dataset", self.datasets.iter().map(DatasetEntry::id))?;
        check_unique("method", self.methods.iter().map(MethodEntry::id))?;
        check_unique("classifier", self.classifiers.iter().map(ClassifierEntry::id))?;
        Ok(())
    }
}

fn check_unique(what: &str, ids: impl Iterator<Item = String>) -> Result<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id.clone()) {
            return Err(Error::InvalidConfig(format!("plan: duplicate {what} id `{id}`")));
        }
    }
    Ok(())
}

/// Positive class for a dataset: an explicit label, else the minority.
pub fn positive_label(ds: &LabeledDataset, explicit: Option<&str>) -> Result<ClassLabel> {
    match explicit {
        Some(l) => {
            let label = ClassLabel::new(l);
            if ds.labels().contains(&label) {
                Ok(label)
            } else {
                Err(Error::InvalidConfig(format!("positive label {l} not in dataset")))
            }
        }
        None => Ok(class_summary(ds).minority_label),
    }
}

/// Resamples `train` (unless `sampler` is `None`), fits the classifier and
/// scores it on the untouched `test` partition.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_split(
    dataset_id: &str,
    train: &LabeledDataset,
    test: &LabeledDataset,
    method_id: &str,
    sampler: Option<&SamplerConfig>,
    classifier_id: &str,
    classifier: &ClassifierSpec,
    positive: &ClassLabel,
    seed: u64,
) -> Result<EvalReport> {
    let resampled;
    let fit_on = match sampler {
        Some(cfg) => {
            let mut rng = seeded_rng(seed, SAMPLER_STREAM);
            resampled = resample(train, cfg, &mut rng)?;
            &resampled
        }
        None => train,
    };
    let (pred, scores) = classifier.fit_predict(fit_on, test, positive, seed)?;
    EvalReport::evaluate(
        dataset_id,
        method_id,
        classifier_id,
        seed,
        test.labels(),
        &pred,
        &scores,
        positive,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub f1: f64,
    pub g_mean: f64,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub status: RunStatus,
    pub scores: Option<Scores>,
    pub confusion: Option<ConfusionMatrix>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

/// One (dataset, method, classifier) cell of the report grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub dataset: String,
    pub method: String,
    pub classifier: String,
    /// Mean over the seeds that ran successfully; absent when none did.
    pub seed_mean: Option<Scores>,
    pub n_ok: usize,
    pub n_failed: usize,
    pub runs: Vec<RunRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub train_fraction: f64,
    pub seeds: Vec<u64>,
    pub cells: Vec<CellReport>,
}

fn run_record(seed: u64, result: Result<EvalReport>) -> RunRecord {
    match result {
        Ok(r) => RunRecord {
            seed,
            status: RunStatus::Ok,
            scores: Some(Scores {
                f1: r.f1,
                g_mean: r.g_mean,
                auc: r.auc,
            }),
            confusion: Some(r.confusion),
            error: None,
        },
        Err(e) => RunRecord {
            seed,
            status: RunStatus::Failed,
            scores: None,
            confusion: None,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every cell of the plan. Runs execute in parallel; the report is
/// assembled in plan order (dataset, method, classifier, seed).
pub fn run_benchmark(plan: &BenchmarkPlan) -> Result<BenchmarkReport> {
    plan.validate()?;
    let methods: Vec<Result<Option<SamplerConfig>>> =
        plan.methods.iter().map(MethodEntry::sampler_config).collect();

    let mut cells = Vec::new();
    for entry in &plan.datasets {
        let dataset_id = entry.id();
        let prepared = load_csv(&entry.path, &LabelColumn::from(&entry.label)).and_then(|ds| {
            let positive = positive_label(&ds, entry.positive_label.as_deref())?;
            Ok((ds, positive))
        });
        // split once per seed; every method sees the same test rows
        let splits: Vec<Result<(LabeledDataset, LabeledDataset)>> = plan
            .seeds
            .iter()
            .map(|&seed| match &prepared {
                Ok((ds, _)) => stratified_split(ds, &SplitSpec::new(plan.train_fraction, seed)?),
                Err(e) => Err(Error::Plan(format!("dataset {dataset_id}: {e}"))),
            })
            .collect();

        let jobs: Vec<(usize, usize, usize)> = (0..plan.methods.len())
            .flat_map(|m| (0..plan.classifiers.len()).flat_map(move |c| (0..plan.seeds.len()).map(move |s| (m, c, s))))
            .collect();
        let runs: Vec<RunRecord> = jobs
            .par_iter()
            .map(|&(m, c, s)| {
                let seed = plan.seeds[s];
                let result = (|| {
                    let (train, test) = splits[s].as_ref().map_err(|e| Error::Plan(e.to_string()))?;
                    let sampler = methods[m].as_ref().map_err(|e| Error::Plan(e.to_string()))?;
                    let positive = &prepared.as_ref().map_err(|e| Error::Plan(e.to_string()))?.1;
                    let classifier = &plan.classifiers[c];
                    let spec = classifier.spec()?;
                    evaluate_split(
                        &dataset_id,
                        train,
                        test,
                        &plan.methods[m].id(),
                        sampler.as_ref(),
                        &classifier.id(),
                        &spec,
                        positive,
                        seed,
                    )
                })();
                run_record(seed, result)
            })
            .collect();

        for (cell_index, chunk) in runs.chunks(plan.seeds.len()).enumerate() {
            let m = cell_index / plan.classifiers.len();
            let c = cell_index % plan.classifiers.len();
            cells.push(cell_report(
                &dataset_id,
                &plan.methods[m].id(),
                &plan.classifiers[c].id(),
                chunk.to_vec(),
            ));
        }
    }
    Ok(BenchmarkReport {
        train_fraction: plan.train_fraction,
        seeds: plan.seeds.clone(),
        cells,
    })
}

fn cell_report(dataset: &str, method: &str, classifier: &str, runs: Vec<RunRecord>) -> CellReport {
    let ok: Vec<Scores> = runs.iter().filter_map(|r| r.scores).collect();
    let seed_mean = (!ok.is_empty()).then(|| {
        let n = ok.len() as f64;
        Scores {
            f1: ok.iter().map(|s| s.f1).sum::<f64>() / n,
            g_mean: ok.iter().map(|s| s.g_mean).sum::<f64>() / n,
            auc: ok.iter().map(|s| s.auc).sum::<f64>() / n,
        }
    });
    CellReport {
        dataset: dataset.to_string(),
        method: method.to_string(),
        classifier: classifier.to_string(),
        seed_mean,
        n_ok: ok.len(),
        n_failed: runs.len() - ok.len(),
        runs,
    }
}

impl BenchmarkReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One row per cell with the seed means.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["dataset", "method", "classifier", "n_ok", "n_failed", "f1", "g_mean", "auc"])?;
        for c in &self.cells {
            let (f1, g, auc) = match c.seed_mean {
                Some(s) => (format!("{:.4}", s.f1), format!("{:.4}", s.g_mean), format!("{:.4}", s.auc)),
                None => Default::default(),
            };
            w.write_record([
                c.dataset.clone(),
                c.method.clone(),
                c.classifier.clone(),
                c.n_ok.to_string(),
                c.n_failed.to_string(),
                f1,
                g,
                auc,
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Plan(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Text grid: one block per dataset, one row per method, and an
    /// F1 / G-mean / AUC column group per classifier.
    pub fn render_table(&self) -> String {
        let mut datasets: Vec<&str> = Vec::new();
        let mut classifiers: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !datasets.contains(&c.dataset.as_str()) {
                datasets.push(&c.dataset);
            }
            if !classifiers.contains(&c.classifier.as_str()) {
                classifiers.push(&c.classifier);
            }
        }
        let mut out = String::new();
        let _ = write!(out, "{:<16} {:<14}", "dataset", "method");
        for clf in &classifiers {
            let _ = write!(out, " | {:^26}", clf);
        }
        out.push('\n');
        let _ = write!(out, "{:<16} {:<14}", "", "");
        for _ in &classifiers {
            let _ = write!(out, " | {:>8} {:>8} {:>8}", "F1", "G-mean", "AUC");
        }
        out.push('\n');
        for d in datasets {
            let mut methods: Vec<&str> = Vec::new();
            for c in self.cells.iter().filter(|c| c.dataset == d) {
                if !methods.contains(&c.method.as_str()) {
                    methods.push(&c.method);
                }
            }
            for (i, m) in methods.iter().enumerate() {
                let _ = write!(out, "{:<16} {:<14}", if i == 0 { d } else { "" }, m);
                for clf in &classifiers {
                    let cell = self
                        .cells
                        .iter()
                        .find(|c| c.dataset == d && c.method == *m && c.classifier == *clf);
                    match cell.and_then(|c| c.seed_mean) {
                        Some(s) => {
                            let _ = write!(out, " | {:>8.4} {:>8.4} {:>8.4}", s.f1, s.g_mean, s.auc);
                        }
                        None => {
                            let _ = write!(out, " | {:>26}", "failed");
                        }
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}
