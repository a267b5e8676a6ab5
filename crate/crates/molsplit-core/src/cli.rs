//! The `molsplit` command line: one subcommand per pipeline, flags that
//! serialize into the output manifest so every run is reproducible from its
//! own artifacts.
//!
//! Exit codes: 0 success, 1 input error, 2 infeasible split, 3 time budget
//! exhausted without a feasible solution.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::hi_split::{self, HiParams, HiSplitError};
use crate::kcut::{self, SolveError};
use crate::lo_split::{self, LoParams};
use crate::manifest::{SplitManifest, MANIFEST_FORMAT_VERSION, TOOL_VERSION};
use crate::metrics::{self, MetricError, MetricMode, PredictionTable};
use crate::molio::{
    self, ActivityError, ActivityMode, DataError, Dataset, DatasetFormat, FingerprintConfig,
    RawActivity, Relation,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_TIME_BUDGET: i32 = 3;

fn version_string() -> &'static str {
    static VERSION: std::sync::OnceLock<String> = std::sync::OnceLock::new();
    VERSION.get_or_init(|| format!("{TOOL_VERSION} (manifest format {MANIFEST_FORMAT_VERSION})"))
}

#[derive(Parser)]
#[command(
    name = "molsplit",
    version = version_string(),
    about = "Leakage-controlled train/test splitting for molecular datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute fingerprints for a dataset and write them as fingerprint-csv.
    Fingerprint(FingerprintArgs),
    /// Partition a dataset into k mutually dissimilar train/test folds.
    HiSplit(HiSplitArgs),
    /// Extract similar-molecule test clusters with one train anchor each.
    LoSplit(LoSplitArgs),
    /// Random split baseline that discards leaky test molecules.
    GreedySplit(GreedySplitArgs),
    /// Solve a balanced vertex k-cut problem from JSON.
    KcutSolve(KcutSolveArgs),
    /// Audit an arbitrary train/test split for similarity leakage.
    Audit(AuditArgs),
    /// Score a prediction table (PR AUC or mean per-cluster Spearman).
    Metrics(MetricsArgs),
    /// Count a greedy maximal set of mutually dissimilar molecules.
    Circles(CirclesArgs),
    /// Convert raw nM activity measurements into a labeled dataset.
    Preprocess(PreprocessArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    SmilesCsv,
    FingerprintCsv,
}

impl From<FormatArg> for DatasetFormat {
    fn from(f: FormatArg) -> DatasetFormat {
        match f {
            FormatArg::SmilesCsv => DatasetFormat::SmilesCsv,
            FormatArg::FingerprintCsv => DatasetFormat::FingerprintCsv,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Input dataset CSV.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Input format.
    #[arg(long, value_enum, default_value = "smiles-csv")]
    format: FormatArg,
    /// Morgan radius for smiles-csv inputs (2 = ECFP4-style).
    #[arg(long, default_value_t = 2)]
    radius: u32,
    /// Fingerprint width in bits (power of two).
    #[arg(long, default_value_t = 1024)]
    nbits: u32,
}

impl InputArgs {
    fn load(&self) -> Result<Dataset, CliError> {
        let config = FingerprintConfig {
            radius: self.radius,
            nbits: self.nbits,
        };
        Ok(molio::load_dataset(&self.input, self.format.into(), &config)?)
    }
}

#[derive(Args)]
struct FingerprintArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output fingerprint-csv path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct HiSplitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Similarity threshold between folds.
    #[arg(long, default_value_t = 0.4)]
    threshold: f64,
    /// Number of mutually dissimilar subsets.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Explicit per-partition weight lower bounds, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "fractions")]
    bounds: Option<Vec<u64>>,
    /// Target subset fractions (default: equal); scaled by --slack.
    #[arg(long, value_delimiter = ',')]
    fractions: Option<Vec<f64>>,
    /// Slack applied to fraction-derived bounds to leave removal room.
    #[arg(long, default_value_t = 0.9)]
    slack: f64,
    /// Wall-clock solver budget in seconds.
    #[arg(long, value_name = "SECS")]
    time_budget: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Similarity-graph worker threads.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Also dump the neighborhood graph edge list to this CSV.
    #[arg(long, value_name = "FILE")]
    edges_out: Option<PathBuf>,
    /// Output directory for manifest.json and fold CSVs.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct LoSplitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.4)]
    threshold: f64,
    /// A cluster qualifies when its size exceeds this.
    #[arg(long, default_value_t = 5)]
    min_cluster_size: usize,
    /// Stop after this many clusters (default: exhaust the pool).
    #[arg(long)]
    max_clusters: Option<usize>,
    /// Activity scale, selects the default value-spread floor.
    #[arg(long, value_enum, default_value = "pki")]
    mode: LoMode,
    /// Override the value-spread floor.
    #[arg(long)]
    std_threshold: Option<f64>,
    /// Number of folds (re-runs with shifted seeds).
    #[arg(long, default_value_t = 1)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum LoMode {
    Pki,
    Pic50,
}

#[derive(Args)]
struct GreedySplitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.4)]
    threshold: f64,
    #[arg(long, default_value_t = 0.1)]
    test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct KcutSolveArgs {
    /// Problem JSON: weights, edges, k, bounds, optional budget.
    #[arg(long, value_name = "FILE")]
    problem: PathBuf,
    /// Overrides the problem's time budget, in seconds.
    #[arg(long, value_name = "SECS")]
    time_budget: Option<f64>,
    /// Solution JSON output (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// Training-side dataset CSV.
    #[arg(long, value_name = "FILE")]
    train: PathBuf,
    /// Test-side dataset CSV.
    #[arg(long, value_name = "FILE")]
    test: PathBuf,
    #[arg(long, value_enum, default_value = "smiles-csv")]
    format: FormatArg,
    #[arg(long, default_value_t = 2)]
    radius: u32,
    #[arg(long, default_value_t = 1024)]
    nbits: u32,
    #[arg(long, default_value_t = 0.4)]
    threshold: f64,
    /// Report JSON output (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Optional histogram CSV output.
    #[arg(long, value_name = "FILE")]
    histogram: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Prediction CSV: id,truth,score[,cluster].
    #[arg(long, value_name = "FILE")]
    predictions: PathBuf,
    /// hi = PR AUC over binary truth; lo = mean per-cluster Spearman.
    #[arg(long, value_enum)]
    mode: MetricsMode,
    /// Score the constant-prediction baseline instead.
    #[arg(long)]
    dummy: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricsMode {
    Hi,
    Lo,
}

#[derive(Args)]
struct CirclesArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Raw activity CSV: smiles,value,relation (value in nM).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// binary: label = activity above the pX 6 bar; continuous: median pX.
    #[arg(long, value_enum)]
    mode: PreprocessMode,
    #[arg(long, default_value_t = 2)]
    radius: u32,
    #[arg(long, default_value_t = 1024)]
    nbits: u32,
    /// Output smiles-csv dataset.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PreprocessMode {
    Binary,
    Continuous,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Activity(#[from] ActivityError),
    #[error(transparent)]
    HiSplit(#[from] HiSplitError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::HiSplit(HiSplitError::Infeasible(_)) => EXIT_INFEASIBLE,
            CliError::HiSplit(HiSplitError::TimeBudgetExceeded) => EXIT_TIME_BUDGET,
            CliError::Solve(SolveError::Infeasible(_)) => EXIT_INFEASIBLE,
            CliError::Solve(SolveError::TimeBudgetExceeded) => EXIT_TIME_BUDGET,
            _ => EXIT_INPUT,
        }
    }
}

/// Run the CLI on the given argument list (`argv[0]` included) and return
/// the process exit code. All output paths are created as needed; all
/// randomness flows from `--seed`.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Fingerprint(args) => cmd_fingerprint(args),
        Command::HiSplit(args) => with_threads(args.threads, || cmd_hi_split(&args)),
        Command::LoSplit(args) => with_threads(args.threads, || cmd_lo_split(&args)),
        Command::GreedySplit(args) => with_threads(args.threads, || cmd_greedy_split(&args)),
        Command::KcutSolve(args) => cmd_kcut_solve(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Circles(args) => cmd_circles(args),
        Command::Preprocess(args) => cmd_preprocess(args),
    }
}

/// Run `f` on a rayon pool of the requested size, so `--threads 1` (the
/// default) pins the similarity-graph work to a single worker.
fn with_threads<R>(threads: usize, f: impl FnOnce() -> R + Send) -> R
where
    R: Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool builds");
    pool.install(f)
}

fn create_file(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_fingerprint(args: FingerprintArgs) -> Result<(), CliError> {
    let ds = args.input.load()?;
    let mut w = create_file(&args.out)?;
    let mut header = vec!["id", "fp"];
    if ds.schema.has_value {
        header.push("value");
    }
    if ds.schema.has_label {
        header.push("label");
    }
    writeln!(w, "{}", header.join(","))?;
    for r in &ds.records {
        let mut row = vec![r.id.clone(), r.fingerprint.to_hex()];
        if ds.schema.has_value {
            row.push(crate::molio::format_float(r.value.expect("value column")));
        }
        if ds.schema.has_label {
            row.push(if r.label.expect("label column") { "1" } else { "0" }.into());
        }
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    println!("wrote {} fingerprints to {}", ds.len(), args.out.display());
    Ok(())
}

fn resolve_bounds(args: &HiSplitArgs, n: usize) -> Result<Vec<u64>, CliError> {
    if let Some(bounds) = &args.bounds {
        if bounds.len() != args.k {
            return Err(CliError::Input(format!(
                "--bounds needs {} values, got {}",
                args.k,
                bounds.len()
            )));
        }
        return Ok(bounds.clone());
    }
    let fractions = match &args.fractions {
        Some(f) => {
            if f.len() != args.k {
                return Err(CliError::Input(format!(
                    "--fractions needs {} values, got {}",
                    args.k,
                    f.len()
                )));
            }
            let sum: f64 = f.iter().sum();
            if !(0.0..=1.0 + 1e-9).contains(&sum) || f.iter().any(|&x| x <= 0.0) {
                return Err(CliError::Input(
                    "--fractions must be positive and sum to at most 1".into(),
                ));
            }
            f.clone()
        }
        None => vec![1.0 / args.k as f64; args.k],
    };
    if !(0.0 < args.slack && args.slack <= 1.0) {
        return Err(CliError::Input("--slack must be in (0, 1]".into()));
    }
    Ok(hi_split::default_bounds(n, &fractions, args.slack))
}

fn write_fold_csvs(
    ds: &Dataset,
    manifest: &SplitManifest,
    out_dir: &Path,
    cluster_lookup: bool,
) -> Result<(), CliError> {
    let index: std::collections::HashMap<&str, usize> = ds
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id.as_str(), i))
        .collect();
    for (fold_no, fold) in manifest.folds.iter().enumerate() {
        let train: Vec<usize> = fold.train.iter().map(|id| index[id.as_str()]).collect();
        let test: Vec<usize> = fold.test.iter().map(|id| index[id.as_str()]).collect();
        let train_path = out_dir.join(format!("train_{}.csv", fold_no + 1));
        let test_path = out_dir.join(format!("test_{}.csv", fold_no + 1));
        molio::write_subset_csv(ds, &train, None, create_file(&train_path)?)?;
        if cluster_lookup {
            let mut cluster_of: std::collections::HashMap<usize, usize> =
                std::collections::HashMap::new();
            if let Some(clusters) = &fold.clusters {
                for info in clusters {
                    for member in &info.members {
                        if member != &info.anchor {
                            cluster_of.insert(index[member.as_str()], info.cluster);
                        }
                    }
                }
            }
            let lookup = |i: usize| cluster_of.get(&i).copied();
            molio::write_subset_csv(ds, &test, Some(&lookup), create_file(&test_path)?)?;
        } else {
            molio::write_subset_csv(ds, &test, None, create_file(&test_path)?)?;
        }
    }
    Ok(())
}

fn write_manifest(manifest: &SplitManifest, out_dir: &Path) -> Result<(), CliError> {
    let path = out_dir.join("manifest.json");
    manifest.write_json(create_file(&path)?)?;
    Ok(())
}

fn cmd_hi_split(args: &HiSplitArgs) -> Result<(), CliError> {
    let ds = args.input.load()?;
    if ds.is_empty() {
        return Err(CliError::Input("dataset is empty".into()));
    }
    let bounds = resolve_bounds(args, ds.len())?;
    if args.k < 2 {
        return Err(CliError::Input("--k must be at least 2".into()));
    }
    if let Some(path) = &args.edges_out {
        let g = crate::simgraph::build_neighborhood_graph(&ds, args.threshold);
        g.write_edge_list(create_file(path)?)?;
    }
    let params = HiParams {
        threshold: args.threshold,
        k: args.k,
        bounds,
        time_budget: args.time_budget.map(Duration::from_secs_f64),
        seed: args.seed,
    };
    let manifest = hi_split::hi_split(&ds, &params)?;
    write_manifest(&manifest, &args.out)?;
    write_fold_csvs(&ds, &manifest, &args.out, false)?;
    for (i, fold) in manifest.folds.iter().enumerate() {
        println!(
            "fold {}: train {} test {}",
            i + 1,
            fold.train.len(),
            fold.test.len()
        );
    }
    println!("removed {}", manifest.removed.len());
    Ok(())
}

fn cmd_lo_split(args: &LoSplitArgs) -> Result<(), CliError> {
    let ds = args.input.load()?;
    if ds.is_empty() {
        return Err(CliError::Input("dataset is empty".into()));
    }
    if !ds.schema.has_value {
        return Err(CliError::Input(
            "lo-split needs a dataset with a value column".into(),
        ));
    }
    if args.folds < 1 {
        return Err(CliError::Input("--folds must be at least 1".into()));
    }
    let std_threshold = args.std_threshold.unwrap_or(match args.mode {
        LoMode::Pki => lo_split::STD_THRESHOLD_PKI,
        LoMode::Pic50 => lo_split::STD_THRESHOLD_PIC50,
    });
    let params = LoParams {
        threshold: args.threshold,
        min_cluster_size: args.min_cluster_size,
        max_clusters: args.max_clusters.unwrap_or(usize::MAX),
        std_threshold,
        seed: args.seed,
    };
    let manifest = lo_split::lo_split_folds(&ds, &params, args.folds);
    write_manifest(&manifest, &args.out)?;
    write_fold_csvs(&ds, &manifest, &args.out, true)?;
    for (i, fold) in manifest.folds.iter().enumerate() {
        println!(
            "fold {}: train {} test {} clusters {}",
            i + 1,
            fold.train.len(),
            fold.test.len(),
            fold.clusters.as_ref().map_or(0, Vec::len)
        );
    }
    Ok(())
}

fn cmd_greedy_split(args: &GreedySplitArgs) -> Result<(), CliError> {
    let ds = args.input.load()?;
    if ds.is_empty() {
        return Err(CliError::Input("dataset is empty".into()));
    }
    if !(args.test_fraction > 0.0 && args.test_fraction < 1.0) {
        return Err(CliError::Input("--test-fraction must be in (0, 1)".into()));
    }
    let manifest = hi_split::greedy_split(&ds, args.threshold, args.test_fraction, args.seed);
    write_manifest(&manifest, &args.out)?;
    write_fold_csvs(&ds, &manifest, &args.out, false)?;
    println!(
        "train {} test {} removed {}",
        manifest.folds[0].train.len(),
        manifest.folds[0].test.len(),
        manifest.removed.len()
    );
    Ok(())
}

fn cmd_kcut_solve(args: KcutSolveArgs) -> Result<(), CliError> {
    let file = File::open(&args.problem)?;
    let mut spec: kcut::ProblemSpec = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| CliError::Input(format!("invalid problem JSON: {e}")))?;
    if let Some(budget) = args.time_budget {
        spec.time_budget_secs = Some(budget);
    }
    let problem = spec.into_problem()?;
    let solution = kcut::solve_balanced_kcut(&problem)?;
    let mut json = serde_json::to_string_pretty(&solution).expect("solution serializes");
    json.push('\n');
    match &args.out {
        Some(path) => {
            let mut w = create_file(path)?;
            w.write_all(json.as_bytes())?;
            w.flush()?;
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn cmd_audit(args: AuditArgs) -> Result<(), CliError> {
    let config = FingerprintConfig {
        radius: args.radius,
        nbits: args.nbits,
    };
    let train = molio::load_dataset(&args.train, args.format.into(), &config)?;
    let test = molio::load_dataset(&args.test, args.format.into(), &config)?;
    let report = metrics::audit_split(&train.fingerprints(), &test.fingerprints(), args.threshold)?;
    let json = report.to_json();
    match &args.out {
        Some(path) => {
            let mut w = create_file(path)?;
            w.write_all(json.as_bytes())?;
            w.flush()?;
        }
        None => print!("{json}"),
    }
    if let Some(path) = &args.histogram {
        report.write_histogram_csv(create_file(path)?)?;
    }
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> Result<(), CliError> {
    let file = File::open(&args.predictions)?;
    let table = PredictionTable::read_csv(BufReader::new(file))?;
    let (name, value) = match (args.mode, args.dummy) {
        (MetricsMode::Hi, false) => ("pr_auc", metrics::pr_auc(&table)?),
        (MetricsMode::Lo, false) => ("mean_cluster_spearman", metrics::mean_cluster_spearman(&table)?),
        (MetricsMode::Hi, true) => ("dummy_pr_auc", metrics::dummy_baseline(&table, MetricMode::Hi)?),
        (MetricsMode::Lo, true) => (
            "dummy_mean_cluster_spearman",
            metrics::dummy_baseline(&table, MetricMode::Lo)?,
        ),
    };
    println!("{{\"metric\": \"{name}\", \"value\": {value}}}");
    Ok(())
}

fn cmd_circles(args: CirclesArgs) -> Result<(), CliError> {
    let ds = args.input.load()?;
    if ds.is_empty() {
        return Err(CliError::Input("dataset is empty".into()));
    }
    if !(args.threshold > 0.0 && args.threshold <= 1.0) {
        return Err(CliError::Input("--threshold must be in (0, 1]".into()));
    }
    let count = metrics::n_circles(&ds.fingerprints(), args.threshold);
    println!("{count}");
    Ok(())
}

fn cmd_preprocess(args: PreprocessArgs) -> Result<(), CliError> {
    let file = File::open(&args.input)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file));
    let headers = reader
        .headers()
        .map_err(|e| CliError::Input(format!("invalid header: {e}")))?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols != ["smiles", "value", "relation"] {
        return Err(CliError::Input(format!(
            "expected header 'smiles,value,relation', found '{}'",
            cols.join(",")
        )));
    }
    let mut raw = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let smiles = record.get(0).unwrap_or("").to_string();
        let value_nm: f64 = record
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|_| CliError::Input(format!("line {line}: invalid value")))?;
        let relation = Relation::parse(record.get(2).unwrap_or("")).ok_or_else(|| {
            CliError::Input(format!("line {line}: relation must be one of =, <, >"))
        })?;
        raw.push(RawActivity {
            smiles,
            value_nm,
            relation,
        });
    }
    let mode = match args.mode {
        PreprocessMode::Binary => ActivityMode::Binary,
        PreprocessMode::Continuous => ActivityMode::Continuous,
    };
    let config = FingerprintConfig {
        radius: args.radius,
        nbits: args.nbits,
    };
    let ds = molio::preprocess_activity(&raw, mode, &config)?;
    let indices: Vec<usize> = (0..ds.len()).collect();
    molio::write_subset_csv(&ds, &indices, None, create_file(&args.out)?)?;
    println!("kept {} of {} rows", ds.len(), raw.len());
    Ok(())
}
