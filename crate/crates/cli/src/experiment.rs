//! Cross-validated comparison of the baseline forest, the group-threshold
//! post-processor and FairTTTS.
//!
//! Every fold trains one forest on its training rows. The baseline is the
//! forest's majority vote; the threshold optimizer is fitted on the forest's
//! vote fractions over the training rows and applied to the test rows;
//! FairTTTS wraps the same forest. Randomness is keyed by the master seed:
//! the fold plan uses it directly, fold `f` trains with
//! `derive_seed(master, [FOREST, f])` and FairTTTS walks for test row `i`
//! use `derive_seed(master, [f, FAIRTTTS])` with stream id `i`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use fairtree::data_io::{load_dataset, make_folds, make_stratified_folds, DataError, DatasetConfig, FoldPlan};
use fairtree::engine::{exact_path_distribution, predict_fair_batch};
use fairtree::metrics::full_report;
use fairtree::rng::{derive_seed, tag};
use fairtree::threshold::{apply_threshold_policy, fit_threshold_policy};
use fairtree::tree::{sqrt_features, train_forest};
use fairtree::{
    Aggregation, Dataset, FairTTTSConfig, FairnessSpec, Forest, ForestParams, MetricsReport, ScaleMode,
    ThresholdPolicy, TreeParams,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const REPORT_SCHEMA: &str = "fairtree-report/1";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
}

impl HarnessError {
    /// Process exit code: 1 for configuration problems, 2 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Data(_) => 2,
        }
    }
}

/// Classify a dataset loading error: a bad dataset config is a config
/// error, anything about the CSV itself is a data error.
pub fn data_error(context: &str, e: DataError) -> HarnessError {
    match e {
        DataError::Config(_) => HarnessError::Config(format!("{context}: {e}")),
        _ => HarnessError::Data(format!("{context}: {e}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Baseline,
    ThresholdOptimizer,
    Fairttts,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Baseline, Method::ThresholdOptimizer, Method::Fairttts];

    pub fn name(self) -> &'static str {
        match self {
            Method::Baseline => "baseline",
            Method::ThresholdOptimizer => "threshold_optimizer",
            Method::Fairttts => "fairttts",
        }
    }
}

/// How FairTTTS class probabilities are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    MonteCarlo,
    /// Exact path enumeration; needs a single-tree forest.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSettings {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// `None` means `floor(sqrt(d))`.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub scale_mode: ScaleMode,
}

impl Default for ModelSettings {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: None,
            bootstrap: true,
            scale_mode: ScaleMode::default(),
        }
    }
}

impl ModelSettings {
    pub fn forest_params(&self, n_features: usize, rng_seed: u64) -> ForestParams {
        ForestParams {
            n_trees: self.n_trees,
            bootstrap: self.bootstrap,
            tree: TreeParams {
                max_depth: self.max_depth,
                min_samples_leaf: self.min_samples_leaf,
                features_per_split: Some(self.features_per_split.unwrap_or_else(|| sqrt_features(n_features))),
                rng_seed,
                scale_mode: self.scale_mode,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FairTTTSSettings {
    pub n_simulations: usize,
    pub p_max: f64,
    pub alpha: f64,
    pub aggregation: Aggregation,
    pub engine: Engine,
}

impl Default for FairTTTSSettings {
    fn default() -> Self {
        let c = FairTTTSConfig::default();
        Self {
            n_simulations: c.n_simulations,
            p_max: c.p_max,
            alpha: c.alpha,
            aggregation: Aggregation::default(),
            engine: Engine::default(),
        }
    }
}

impl FairTTTSSettings {
    pub fn engine_config(&self, rng_seed: u64) -> FairTTTSConfig {
        FairTTTSConfig { n_simulations: self.n_simulations, p_max: self.p_max, alpha: self.alpha, rng_seed }
    }
}

fn default_k() -> usize {
    5
}

fn default_seed() -> u64 {
    42
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

/// An experiment description, usually read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Dataset config path, as written; relative paths resolve against the
    /// experiment file's directory.
    pub dataset: PathBuf,
    #[serde(default = "default_k")]
    pub k_folds: usize,
    #[serde(default)]
    pub stratified: bool,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub model: ModelSettings,
    #[serde(default)]
    pub fairttts: FairTTTSSettings,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for everything but the dataset.
    pub fn new(dataset: impl Into<PathBuf>) -> Self {
        Self {
            dataset: dataset.into(),
            k_folds: default_k(),
            stratified: false,
            master_seed: default_seed(),
            methods: default_methods(),
            output_dir: None,
            model: ModelSettings::default(),
            fairttts: FairTTTSSettings::default(),
            base_dir: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(format!("experiment config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_toml_str(&text)?;
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    pub fn dataset_path(&self) -> PathBuf {
        match &self.base_dir {
            Some(dir) if self.dataset.is_relative() => dir.join(&self.dataset),
            _ => self.dataset.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.k_folds < 2 {
            return bad(format!("k_folds = {} must be at least 2", self.k_folds));
        }
        if self.methods.is_empty() {
            return bad("at least one method must be selected".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return bad(format!("method {} listed twice", m.name()));
            }
        }
        let m = &self.model;
        if m.n_trees == 0 {
            return bad("n_trees must be at least 1".into());
        }
        if m.max_depth == Some(0) || m.min_samples_leaf == 0 || m.features_per_split == Some(0) {
            return bad("max_depth, min_samples_leaf and features_per_split must be at least 1".into());
        }
        self.fairttts.engine_config(0).validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.fairttts.engine == Engine::Exact && m.n_trees != 1 && self.methods.contains(&Method::Fairttts) {
            return bad(format!("the exact engine needs n_trees = 1, got {}", m.n_trees));
        }
        Ok(())
    }

    pub fn load_dataset(&self) -> Result<(Dataset, DatasetConfig), HarnessError> {
        let path = self.dataset_path();
        let ds_config = DatasetConfig::from_file(&path).map_err(|e| match e {
            DataError::Io { .. } | DataError::Config(_) => HarnessError::Config(format!("{}: {e}", path.display())),
            other => data_error(&path.display().to_string(), other),
        })?;
        let data = load_dataset(&ds_config).map_err(|e| data_error(&ds_config.csv_path.display().to_string(), e))?;
        Ok((data, ds_config))
    }
}

/// Mean and sample standard deviation over the folds where a metric is
/// defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: Option<f64>,
    /// `None` with fewer than two defined folds.
    pub std: Option<f64>,
    pub n_folds: usize,
    pub excluded_folds: usize,
}

impl Stat {
    pub fn from_values(values: &[Option<f64>]) -> Self {
        let defined: Vec<f64> = values.iter().flatten().copied().collect();
        let n = defined.len();
        let mean = (n > 0).then(|| defined.iter().sum::<f64>() / n as f64);
        let std = mean.filter(|_| n > 1).map(|m| {
            (defined.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64).sqrt()
        });
        Stat { mean, std, n_folds: n, excluded_folds: values.len() - n }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub accuracy: Stat,
    pub eod: Stat,
    pub di: Stat,
    pub di_distance: Stat,
}

impl MethodSummary {
    pub const METRICS: [&'static str; 4] = ["accuracy", "eod", "di", "di_distance"];

    pub fn from_reports(reports: &[&MetricsReport]) -> Self {
        let stat = |f: &dyn Fn(&MetricsReport) -> Option<f64>| {
            Stat::from_values(&reports.iter().map(|r| f(r)).collect::<Vec<_>>())
        };
        MethodSummary {
            accuracy: stat(&|r| Some(r.accuracy)),
            eod: stat(&|r| r.eod.value()),
            di: stat(&|r| r.di.value()),
            di_distance: stat(&|r| r.di_distance.value()),
        }
    }

    /// Statistics in [`Self::METRICS`] order.
    pub fn stats(&self) -> [(&'static str, &Stat); 4] {
        [("accuracy", &self.accuracy), ("eod", &self.eod), ("di", &self.di), ("di_distance", &self.di_distance)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub report: MetricsReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_policy: Option<ThresholdPolicy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: Method,
    pub folds: Vec<FoldOutcome>,
    pub summary: MethodSummary,
}

impl MethodResult {
    fn new(method: Method, folds: Vec<FoldOutcome>) -> Self {
        let reports: Vec<&MetricsReport> = folds.iter().map(|f| &f.report).collect();
        let summary = MethodSummary::from_reports(&reports);
        MethodResult { method, folds, summary }
    }

    /// Notes about folds excluded from a metric's mean.
    fn exclusion_warnings(&self) -> Vec<String> {
        self.summary
            .stats()
            .iter()
            .filter(|(_, s)| s.excluded_folds > 0)
            .map(|(name, s)| {
                format!("{}: {name} undefined on {} fold(s), excluded from the mean", self.method.name(), s.excluded_folds)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub fairtree_version: String,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    /// File stem of the dataset config.
    pub name: String,
    pub n_rows: usize,
    pub n_features: usize,
    pub protected_column: String,
    pub positive_rate: f64,
    pub privileged_share: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Experiment,
    AlphaSweep,
}

/// Deterministic outcome of [`run_experiment`]; wall-clock timings are kept
/// apart in [`Timings`] so reports are reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema: String,
    pub kind: ReportKind,
    pub environment: Environment,
    pub dataset: DatasetSummary,
    pub settings: ExperimentConfig,
    pub methods: Vec<MethodResult>,
    pub warnings: Vec<String>,
}

impl ExperimentResult {
    pub fn method(&self, m: Method) -> Option<&MethodResult> {
        self.methods.iter().find(|r| r.method == m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub fairttts: MethodResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema: String,
    pub kind: ReportKind,
    pub environment: Environment,
    pub dataset: DatasetSummary,
    pub settings: ExperimentConfig,
    pub baseline: MethodResult,
    pub points: Vec<SweepPoint>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MethodTiming {
    pub label: String,
    /// Seconds of inference per fold.
    pub inference_seconds: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub training_seconds: Vec<f64>,
    pub methods: Vec<MethodTiming>,
}

/// Models fitted on one fold's training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldModels {
    pub forest: Forest,
    pub policy: Option<ThresholdPolicy>,
}

pub struct PreparedFold {
    pub fold: usize,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub models: FoldModels,
    pub training_seconds: f64,
}

/// Dataset, folds and fitted models shared by every method and every α.
pub struct Prepared {
    pub config: ExperimentConfig,
    pub data: Dataset,
    pub spec: FairnessSpec,
    pub plan: FoldPlan,
    pub summary: DatasetSummary,
    pub folds: Vec<PreparedFold>,
}

fn group_of(data: &Dataset, protected: usize, rows: &[usize]) -> Vec<u8> {
    rows.iter().map(|&i| u8::from(data.row(i)[protected] == 1.0)).collect()
}

/// Fit the forest (and, if requested, the threshold policy) of fold `fold`
/// using only `train_rows`.
pub fn fit_fold(
    data: &Dataset,
    train_rows: &[usize],
    protected: usize,
    config: &ExperimentConfig,
    fold: usize,
) -> Result<FoldModels, HarnessError> {
    let train = data.subset(train_rows);
    let seed = derive_seed(config.master_seed, &[tag::FOREST, fold as u64]);
    let forest = train_forest(&train, &config.model.forest_params(data.n_features(), seed))
        .map_err(|e| HarnessError::Data(format!("fold {fold}: {e}")))?;
    let policy = if config.methods.contains(&Method::ThresholdOptimizer) {
        let scores: Vec<f64> = train.rows().iter().map(|r| forest.positive_votes(r) as f64 / forest.n_trees() as f64).collect();
        let group = group_of(&train, protected, &(0..train.n_rows()).collect::<Vec<_>>());
        Some(
            fit_threshold_policy(&scores, train.labels(), &group)
                .map_err(|e| HarnessError::Data(format!("fold {fold}: threshold policy: {e}")))?,
        )
    } else {
        None
    };
    Ok(FoldModels { forest, policy })
}

fn dataset_name(config: &ExperimentConfig) -> String {
    config.dataset.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Load the dataset, build the fold plan and fit every fold's models.
pub fn prepare(config: &ExperimentConfig) -> Result<Prepared, HarnessError> {
    config.validate()?;
    let (data, ds_config) = config.load_dataset()?;
    let protected = data
        .feature_index(&ds_config.protected_column)
        .ok_or_else(|| HarnessError::Data(format!("protected column {:?} not in dataset", ds_config.protected_column)))?;
    let spec = FairnessSpec::new(protected);
    let plan = if config.stratified {
        make_stratified_folds(data.labels(), config.k_folds, config.master_seed)
    } else {
        make_folds(data.n_rows(), config.k_folds, config.master_seed)
    }
    .map_err(|e| data_error("folds", e))?;

    let n = data.n_rows() as f64;
    let summary = DatasetSummary {
        name: dataset_name(config),
        n_rows: data.n_rows(),
        n_features: data.n_features(),
        protected_column: ds_config.protected_column.clone(),
        positive_rate: data.labels().iter().filter(|&&y| y == 1).count() as f64 / n,
        privileged_share: data.column(protected).iter().filter(|&&v| v == 1.0).count() as f64 / n,
    };

    let mut folds = Vec::with_capacity(config.k_folds);
    for fold in 0..config.k_folds {
        let train_rows = plan.train_indices(fold);
        let test_rows = plan.test_indices(fold);
        let start = Instant::now();
        let models = fit_fold(&data, &train_rows, protected, config, fold)?;
        folds.push(PreparedFold {
            fold,
            train_rows,
            test_rows,
            models,
            training_seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(Prepared { config: config.clone(), data, spec, plan, summary, folds })
}

impl Prepared {
    fn fairttts_predictions(&self, f: &PreparedFold, settings: &FairTTTSSettings) -> Result<Vec<u8>, HarnessError> {
        let seed = derive_seed(self.config.master_seed, &[f.fold as u64, tag::FAIRTTTS]);
        let engine = settings.engine_config(seed);
        let rows: Vec<&[f64]> = f.test_rows.iter().map(|&i| self.data.row(i)).collect();
        let forest = &f.models.forest;
        let err = |e: fairtree::EngineError| HarnessError::Config(format!("fold {}: {e}", f.fold));
        match settings.engine {
            Engine::MonteCarlo => {
                let ids: Vec<u64> = f.test_rows.iter().map(|&i| i as u64).collect();
                let dists = predict_fair_batch(forest, &rows, &ids, &self.spec, &engine, settings.aggregation).map_err(err)?;
                Ok(dists.iter().map(|d| d.argmax()).collect())
            }
            Engine::Exact => {
                let tree = &forest.trees()[0];
                rows.par_iter()
                    .map(|x| exact_path_distribution(tree, x, &self.spec, &engine).map(|d| d.argmax()).map_err(err))
                    .collect()
            }
        }
    }

    /// Predictions of `method` on the test rows of fold `f`.
    fn predict(&self, method: Method, f: &PreparedFold, settings: &FairTTTSSettings) -> Result<Vec<u8>, HarnessError> {
        let forest = &f.models.forest;
        match method {
            Method::Baseline => Ok(f.test_rows.iter().map(|&i| forest.predict(self.data.row(i)).expect("dimensions checked")).collect()),
            Method::ThresholdOptimizer => {
                let policy = f.models.policy.as_ref().expect("policy fitted when the method is selected");
                let scores: Vec<f64> = f
                    .test_rows
                    .iter()
                    .map(|&i| forest.positive_votes(self.data.row(i)) as f64 / forest.n_trees() as f64)
                    .collect();
                Ok(apply_threshold_policy(policy, &scores, &group_of(&self.data, self.spec.protected_feature, &f.test_rows)))
            }
            Method::Fairttts => self.fairttts_predictions(f, settings),
        }
    }

    /// Evaluate one method on every fold; returns the result and per-fold
    /// inference seconds.
    pub fn evaluate(&self, method: Method, settings: &FairTTTSSettings) -> Result<(MethodResult, Vec<f64>), HarnessError> {
        let mut outcomes = Vec::with_capacity(self.folds.len());
        let mut seconds = Vec::with_capacity(self.folds.len());
        for f in &self.folds {
            let start = Instant::now();
            let pred = self.predict(method, f, settings)?;
            seconds.push(start.elapsed().as_secs_f64());
            let y: Vec<u8> = f.test_rows.iter().map(|&i| self.data.labels()[i]).collect();
            let group = group_of(&self.data, self.spec.protected_feature, &f.test_rows);
            let report = full_report(&y, &pred, &group)
                .map_err(|e| HarnessError::Data(format!("fold {}: {}: {e}", f.fold, method.name())))?;
            outcomes.push(FoldOutcome {
                fold: f.fold,
                n_train: f.train_rows.len(),
                n_test: f.test_rows.len(),
                report,
                threshold_policy: if method == Method::ThresholdOptimizer { f.models.policy.clone() } else { None },
            });
        }
        Ok((MethodResult::new(method, outcomes), seconds))
    }

    fn environment(&self) -> Environment {
        Environment { fairtree_version: env!("CARGO_PKG_VERSION").to_string(), master_seed: self.config.master_seed }
    }

    fn training_seconds(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.training_seconds).collect()
    }
}

/// Run every configured method over every fold.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(ExperimentResult, Timings), HarnessError> {
    let prepared = prepare(config)?;
    run_prepared(&prepared)
}

pub fn run_prepared(prepared: &Prepared) -> Result<(ExperimentResult, Timings), HarnessError> {
    let config = &prepared.config;
    let mut methods = Vec::new();
    let mut timings = Timings { training_seconds: prepared.training_seconds(), methods: Vec::new() };
    for &m in &config.methods {
        let (result, seconds) = prepared.evaluate(m, &config.fairttts)?;
        timings.methods.push(MethodTiming { label: m.name().to_string(), inference_seconds: seconds });
        methods.push(result);
    }
    let warnings = methods.iter().flat_map(MethodResult::exclusion_warnings).collect();
    let result = ExperimentResult {
        schema: REPORT_SCHEMA.to_string(),
        kind: ReportKind::Experiment,
        environment: prepared.environment(),
        dataset: prepared.summary.clone(),
        settings: config.clone(),
        methods,
        warnings,
    };
    Ok((result, timings))
}

/// Evaluate FairTTTS at each α, reusing one set of trained folds. `alphas`
/// must be nonempty and strictly increasing.
pub fn sweep_alpha(config: &ExperimentConfig, alphas: &[f64]) -> Result<(SweepResult, Timings), HarnessError> {
    if alphas.is_empty() {
        return Err(HarnessError::Config("the alpha list is empty".into()));
    }
    if let Some(w) = alphas.windows(2).find(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(HarnessError::Config(format!(
            "alphas must be strictly increasing (found {} then {})",
            w[0], w[1]
        )));
    }
    let mut config = config.clone();
    config.methods = vec![Method::Baseline, Method::Fairttts];
    for &alpha in alphas {
        FairTTTSSettings { alpha, ..config.fairttts.clone() }
            .engine_config(0)
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
    }
    let prepared = prepare(&config)?;
    let mut timings = Timings { training_seconds: prepared.training_seconds(), methods: Vec::new() };
    let (baseline, seconds) = prepared.evaluate(Method::Baseline, &config.fairttts)?;
    timings.methods.push(MethodTiming { label: "baseline".into(), inference_seconds: seconds });
    let mut points = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let settings = FairTTTSSettings { alpha, ..config.fairttts.clone() };
        let (fairttts, seconds) = prepared.evaluate(Method::Fairttts, &settings)?;
        timings.methods.push(MethodTiming { label: format!("fairttts(alpha={alpha})"), inference_seconds: seconds });
        points.push(SweepPoint { alpha, fairttts });
    }
    let mut warnings = baseline.exclusion_warnings();
    for p in &points {
        warnings.extend(p.fairttts.exclusion_warnings().into_iter().map(|w| format!("alpha {}: {w}", p.alpha)));
    }
    let result = SweepResult {
        schema: REPORT_SCHEMA.to_string(),
        kind: ReportKind::AlphaSweep,
        environment: prepared.environment(),
        dataset: prepared.summary.clone(),
        settings: config,
        baseline,
        points,
        warnings,
    };
    Ok((result, timings))
}
