use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fairtree::data_io::{load_dataset, DatasetConfig};
use fairtree::engine::{exact_path_distribution, predict_fair_batch};
use fairtree::metrics::full_report;
use fairtree::tree::{deserialize, serialize, train_forest, train_tree, BaggingMeta, Model};
use fairtree::{Aggregation, Dataset, FairnessSpec, Forest, ScaleMode};
use fairtree_cli::experiment::{data_error, FairTTTSSettings, ModelSettings, ReportKind};
use fairtree_cli::{chart, report, run_experiment, sweep_alpha, Engine, ExperimentConfig, HarnessError, Method};
use serde::de::DeserializeOwned;

const OUTPUT_ENV: &str = "FAIRTREE_OUTPUT_DIR";
const DEFAULT_OUTPUT: &str = "results";

#[derive(Parser)]
#[command(name = "fairtree", version, about = "Decision forests with fairness-adjusted probabilistic traversal")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a forest (or a single tree) on a whole dataset and save it.
    Train(TrainArgs),
    /// Write per-row deterministic and FairTTTS predictions as CSV.
    Predict(PredictArgs),
    /// Print baseline and FairTTTS metrics of a saved model on a dataset.
    Evaluate(PredictArgs),
    /// Run a cross-validated experiment.
    Run(RunArgs),
    /// Evaluate FairTTTS over a list of alpha values on shared folds.
    SweepAlpha(SweepArgs),
    /// Render the SVG chart of a saved report.
    Charts(ChartArgs),
}

fn parse_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Args)]
struct ModelFlags {
    #[arg(long, default_value_t = 100)]
    n_trees: usize,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = 1)]
    min_samples_leaf: usize,
    /// Features considered per split; defaults to floor(sqrt(d)).
    #[arg(long)]
    features_per_split: Option<usize>,
    #[arg(long)]
    no_bootstrap: bool,
    /// `tree_max` or `node_max`.
    #[arg(long, value_parser = parse_enum::<ScaleMode>, default_value = "tree_max")]
    scale_mode: ScaleMode,
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset config (TOML).
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, short)]
    output: PathBuf,
    /// Train one tree on all rows and features instead of a forest.
    #[arg(long)]
    single_tree: bool,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    model: ModelFlags,
}

#[derive(Args)]
struct FairFlags {
    #[arg(long, default_value_t = 100)]
    n_simulations: usize,
    #[arg(long, default_value_t = 0.1)]
    p_max: f64,
    #[arg(long, default_value_t = 9.0)]
    alpha: f64,
    /// `vote` or `average`.
    #[arg(long, value_parser = parse_enum::<Aggregation>, default_value = "vote")]
    aggregation: Aggregation,
    /// Exact path enumeration instead of Monte Carlo (single trees only).
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    fair: FairFlags,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's `output_dir` and the FAIRTREE_OUTPUT_DIR variable.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Comma-separated subset of baseline, threshold_optimizer, fairttts.
    #[arg(long, value_delimiter = ',', value_parser = parse_enum::<Method>)]
    methods: Option<Vec<Method>>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
}

#[derive(Args)]
struct ChartArgs {
    /// A report.json written by `run` or `sweep-alpha`.
    #[arg(long)]
    report: PathBuf,
    /// Defaults to chart.svg next to the report.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn config_err(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(e.to_string())
}

fn output_dir(flag: Option<PathBuf>, config: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| config.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::Data(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::Data(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| HarnessError::Data(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(Dataset, DatasetConfig), HarnessError> {
    let config = DatasetConfig::from_file(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let data = load_dataset(&config).map_err(|e| data_error(&config.csv_path.display().to_string(), e))?;
    Ok((data, config))
}

fn train(args: TrainArgs) -> Result<(), HarnessError> {
    let (data, _) = load(&args.dataset)?;
    let settings = ModelSettings {
        n_trees: args.model.n_trees,
        max_depth: args.model.max_depth,
        min_samples_leaf: args.model.min_samples_leaf,
        features_per_split: args.model.features_per_split,
        bootstrap: !args.model.no_bootstrap,
        scale_mode: args.model.scale_mode,
    };
    let params = settings.forest_params(data.n_features(), args.seed);
    let model = if args.single_tree {
        let tree = fairtree::TreeParams { features_per_split: args.model.features_per_split, ..params.tree };
        Model::Tree(train_tree(&data, &tree).map_err(config_err)?)
    } else {
        Model::Forest(train_forest(&data, &params).map_err(config_err)?)
    };
    write(&args.output, &serialize(&model))?;
    eprintln!("wrote {} ({} tree(s), {} rows)", args.output.display(), model.trees().len(), data.n_rows());
    Ok(())
}

struct Scored {
    data: Dataset,
    group: Vec<u8>,
    deterministic: Vec<u8>,
    vote_fraction: Vec<f64>,
    fair: Vec<u8>,
    fair_p1: Vec<f64>,
}

fn score(args: &PredictArgs) -> Result<Scored, HarnessError> {
    let model = deserialize(&read(&args.model)?).map_err(|e| config_err(format!("{}: {e}", args.model.display())))?;
    let (data, ds_config) = load(&args.dataset)?;
    if model.n_features() != data.n_features() {
        return Err(HarnessError::Data(format!(
            "model expects {} features, dataset has {}",
            model.n_features(),
            data.n_features()
        )));
    }
    let protected = data
        .feature_index(&ds_config.protected_column)
        .ok_or_else(|| HarnessError::Data(format!("protected column {:?} not in dataset", ds_config.protected_column)))?;
    let spec = FairnessSpec::new(protected);
    let forest = match model {
        Model::Forest(f) => f,
        Model::Tree(t) => Forest::new(vec![t], BaggingMeta { bootstrap: false, features_per_split: None, rng_seed: 0 })
            .map_err(config_err)?,
    };
    let f = &args.fair;
    let engine = FairTTTSSettings {
        n_simulations: f.n_simulations,
        p_max: f.p_max,
        alpha: f.alpha,
        aggregation: f.aggregation,
        engine: if f.exact { Engine::Exact } else { Engine::MonteCarlo },
    }
    .engine_config(f.seed);
    let rows: Vec<&[f64]> = data.rows().iter().map(Vec::as_slice).collect();
    let dists = if f.exact {
        if forest.n_trees() != 1 {
            return Err(config_err("--exact needs a single-tree model"));
        }
        rows.iter()
            .map(|x| exact_path_distribution(&forest.trees()[0], x, &spec, &engine))
            .collect::<Result<Vec<_>, _>>()
            .map_err(config_err)?
    } else {
        let ids: Vec<u64> = (0..rows.len() as u64).collect();
        predict_fair_batch(&forest, &rows, &ids, &spec, &engine, f.aggregation).map_err(config_err)?
    };
    let n = forest.n_trees() as f64;
    Ok(Scored {
        group: rows.iter().map(|r| u8::from(r[protected] == 1.0)).collect(),
        deterministic: rows.iter().map(|r| forest.predict(r).expect("dimensions checked")).collect(),
        vote_fraction: rows.iter().map(|r| forest.positive_votes(r) as f64 / n).collect(),
        fair: dists.iter().map(|d| d.argmax()).collect(),
        fair_p1: dists.iter().map(|d| d.probs[1]).collect(),
        data,
    })
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match output {
        Some(p) => write(p, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| HarnessError::Data(format!("cannot write to stdout: {e}"))),
    }
}

fn predict(args: PredictArgs) -> Result<(), HarnessError> {
    let s = score(&args)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["row", "label", "group", "vote_fraction", "prediction", "fair_p1", "fair_prediction"])
        .expect("in-memory write");
    for i in 0..s.data.n_rows() {
        w.write_record([
            i.to_string(),
            s.data.labels()[i].to_string(),
            s.group[i].to_string(),
            s.vote_fraction[i].to_string(),
            s.deterministic[i].to_string(),
            s.fair_p1[i].to_string(),
            s.fair[i].to_string(),
        ])
        .expect("in-memory write");
    }
    let text = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv");
    emit(args.output.as_deref(), &text)
}

fn evaluate(args: PredictArgs) -> Result<(), HarnessError> {
    let s = score(&args)?;
    let y = s.data.labels();
    let metrics = |pred: &[u8]| full_report(y, pred, &s.group).map_err(|e| HarnessError::Data(e.to_string()));
    let doc = serde_json::json!({
        "n_rows": s.data.n_rows(),
        "baseline": metrics(&s.deterministic)?,
        "fairttts": metrics(&s.fair)?,
    });
    emit(args.output.as_deref(), &report::to_json(&doc))
}

fn experiment_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    ExperimentConfig::from_file(path)
}

fn run(args: RunArgs) -> Result<(), HarnessError> {
    let mut config = experiment_config(&args.config)?;
    if let Some(methods) = args.methods {
        config.methods = methods;
    }
    let dir = output_dir(args.output_dir, &config);
    let (result, timings) = run_experiment(&config)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let mut written = report::write_experiment(&dir, &result, &timings)?;
    let svg = dir.join("chart.svg");
    match chart::experiment_chart(&result) {
        Ok(text) => {
            write(&svg, &text)?;
            written.push(svg);
        }
        Err(e) => eprintln!("warning: chart skipped: {e}"),
    }
    print!("{}", report::experiment_table(&result));
    for p in written {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), HarnessError> {
    let config = experiment_config(&args.config)?;
    let dir = output_dir(args.output_dir, &config);
    let (result, timings) = sweep_alpha(&config, &args.alphas)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let mut written = report::write_sweep(&dir, &result, &timings)?;
    let svg = dir.join("chart.svg");
    write(&svg, &chart::sweep_chart(&result)?)?;
    written.push(svg);
    print!("{}", report::sweep_table(&result));
    for p in written {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn charts(args: ChartArgs) -> Result<(), HarnessError> {
    let text = read(&args.report)?;
    let kind: serde_json::Value = serde_json::from_str(&text).map_err(|e| HarnessError::Data(format!("report: {e}")))?;
    let kind: ReportKind = serde_json::from_value(kind["kind"].clone())
        .map_err(|e| HarnessError::Data(format!("report kind: {e}")))?;
    let svg = match kind {
        ReportKind::Experiment => chart::experiment_chart(&report::experiment_from_json(&text)?)?,
        ReportKind::AlphaSweep => chart::sweep_chart(&report::sweep_from_json(&text)?)?,
    };
    let out = args.output.unwrap_or_else(|| args.report.with_file_name("chart.svg"));
    write(&out, &svg)?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Run(a) => run(a),
        Command::SweepAlpha(a) => sweep(a),
        Command::Charts(a) => charts(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
