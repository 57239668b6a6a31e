use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use kgroups::solver::{DEFAULT_MAX_PASSES, DEFAULT_RESTARTS};
use kgroups::{Alpha, IndexReport};
use kgroups_harness::dermatology::{self, DermatologyResult};
use kgroups_harness::experiment::{Sweep, SweepParameter, FULL_REPS};
use kgroups_harness::input::{encode_labels, read_dataset, read_labels};
use kgroups_harness::output::{self, Format};
use kgroups_harness::{run_experiment, Algorithm, Design, ExperimentSpec, HarnessError, RunOptions};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "kgroups", version, about = "k-groups clustering and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster the rows of a numeric CSV file.
    Fit(FitArgs),
    /// Run a replicated simulation experiment.
    Bench(BenchArgs),
    /// Cluster the UCI dermatology data and score against the diagnoses.
    Dermatology(DermatologyArgs),
    /// Compare two label files.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct FitArgs {
    /// CSV with numeric columns and an optional final `label` column.
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// first | second | kmeans
    #[arg(long, default_value = "first")]
    mode: kgroups::Mode,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_PASSES)]
    max_passes: usize,
    /// Include every accepted relocation in the JSON output.
    #[arg(long)]
    trace: bool,
    /// Directory for labels.csv and fit.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Named layout: normal, lognormal, cauchy, alpha-normal, alpha-cauchy, cubic.
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,
    /// Experiment description (.toml or .json).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    design: Option<Design>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    separation: Option<f64>,
    #[arg(long)]
    dimension: Option<usize>,
    /// separation | alpha | dimension
    #[arg(long, requires = "values")]
    sweep: Option<SweepParameter>,
    /// Comma-separated, strictly increasing sweep values.
    #[arg(long, value_delimiter = ',', requires = "sweep")]
    values: Option<Vec<f64>>,
    /// Comma-separated subset of kgroups_first, kgroups_second, kmeans.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    /// Replicates per sweep value (B).
    #[arg(long)]
    reps: Option<usize>,
    /// Use 500 replicates per sweep value.
    #[arg(long, conflicts_with = "reps")]
    full: bool,
    /// Base seed; replicate b uses seed + b.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_passes: Option<usize>,
    /// Exponent for the k-groups fits (default: 0.5 for cauchy, else 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Record fit times (outputs are then no longer reproducible byte for byte).
    #[arg(long)]
    timing: bool,
    #[arg(long, default_value = "bench-out")]
    out_dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_values = ["csv", "json", "svg"])]
    format: Vec<Format>,
}

#[derive(Args)]
struct DermatologyArgs {
    /// Data file; defaults to $KGROUPS_DERMATOLOGY.
    #[arg(long)]
    path: Option<PathBuf>,
    /// Expected SHA-256 of the file (otherwise `<path>.sha256` if present).
    #[arg(long)]
    sha256: Option<String>,
    /// Download the file to --path first (needs the `fetch` feature).
    #[arg(long, requires = "path")]
    fetch: bool,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_values = ["kgroups_first", "kgroups_second", "kmeans"])]
    algorithms: Vec<Algorithm>,
    /// Also write dermatology.csv / dermatology.json here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values = ["csv", "json"])]
    format: Vec<Format>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Reference labels, one per line (or a `label` column).
    truth: PathBuf,
    /// Labels to score.
    found: PathBuf,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| HarnessError::Io { path: path.to_owned(), source: e })?;
    Ok(())
}

#[derive(Serialize)]
struct FitOutput<'a> {
    schema_version: u32,
    input: String,
    kept_rows: usize,
    skipped_rows: &'a [usize],
    fit: &'a kgroups::FitResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    scores: Option<IndexReport>,
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    let ds = read_dataset(&args.input)?;
    let alpha = Alpha::new(args.alpha).map_err(HarnessError::from)?;
    let alpha = if args.mode == kgroups::Mode::KMeansAlpha2 { Alpha::TWO } else { alpha };
    let cfg = kgroups::FitConfig::new(args.k, alpha, args.mode)
        .with_restarts(args.restarts)
        .with_seed(args.seed)
        .with_max_passes(args.max_passes)
        .with_trace(args.trace);
    let result = kgroups::fit(&ds.data, &cfg).map_err(HarnessError::from)?;
    let scores = match &ds.labels {
        Some(labels) => Some(IndexReport::compare(&encode_labels(labels), result.partition.labels()).map_err(HarnessError::from)?),
        None => None,
    };

    let mut labels_csv = String::from("row,label\n");
    for (&row, &label) in ds.kept_rows.iter().zip(result.partition.labels()) {
        labels_csv.push_str(&format!("{row},{label}\n"));
    }
    let out = FitOutput {
        schema_version: 1,
        input: args.input.display().to_string(),
        kept_rows: ds.kept_rows.len(),
        skipped_rows: &ds.skipped_rows,
        fit: &result,
        scores,
    };
    fs::create_dir_all(&args.out_dir).map_err(|e| HarnessError::Io { path: args.out_dir.clone(), source: e })?;
    write_file(&args.out_dir.join("labels.csv"), &labels_csv)?;
    write_file(&args.out_dir.join("fit.json"), &output::to_json(&out)?)?;
    println!(
        "{} rows ({} skipped), K={}, W={} (restart {}), {} moves",
        ds.kept_rows.len(),
        ds.skipped_rows.len(),
        args.k,
        result.within,
        result.best_restart,
        result.moves
    );
    if let Some(s) = scores {
        println!("diag={} kappa={} rand={} crand={}", s.diag, s.kappa, s.rand, s.crand);
    }
    Ok(())
}

fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Io { path: path.to_owned(), source: e })?;
    let spec = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => serde_json::from_str(&text).map_err(|e| HarnessError::Input(format!("{}: {e}", path.display())))?,
        _ => toml::from_str(&text).map_err(|e| HarnessError::Input(format!("{}: {e}", path.display())))?,
    };
    Ok(spec)
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let mut spec = match (&args.preset, &args.spec, args.design) {
        (Some(name), _, _) => ExperimentSpec::preset(name)?,
        (None, Some(path), _) => load_spec(path)?,
        (None, None, Some(design)) => ExperimentSpec::new(design),
        (None, None, None) => return Err(HarnessError::Input("give --preset, --spec or --design".into()).into()),
    };
    if let (Some(design), true) = (args.design, args.preset.is_some() || args.spec.is_some()) {
        spec.design = design;
    }
    if let Some(n) = args.n {
        spec.n = n;
    }
    if let Some(d) = args.separation {
        spec.separation = d;
    }
    if let Some(p) = args.dimension {
        spec.dimension = p;
    }
    if let (Some(parameter), Some(values)) = (args.sweep, args.values) {
        spec.sweep = Some(Sweep { parameter, values });
    }
    if let Some(a) = args.algorithms {
        spec.algorithms = a;
    }
    if let Some(r) = args.reps {
        spec.reps = r;
    }
    if args.full {
        spec.reps = FULL_REPS;
    }
    if let Some(s) = args.seed {
        spec.base_seed = s;
    }
    if let Some(r) = args.restarts {
        spec.restarts = r;
    }
    if let Some(m) = args.max_passes {
        spec.max_passes = m;
    }
    if args.alpha.is_some() {
        spec.alpha = args.alpha;
    }
    spec.validate()?;
    let out = run_experiment(&spec, RunOptions { timing: args.timing })?;
    let written = output::emit(&out, &args.out_dir, &args.format)?;
    print!("{}", output::table_to_csv(&out.table)?);
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_dermatology(args: DermatologyArgs) -> Result<()> {
    let path = args
        .path
        .or_else(dermatology::env_path)
        .ok_or_else(|| HarnessError::Input(format!("no data file: pass --path or set {}", dermatology::ENV_PATH)))?;
    if args.fetch {
        fetch(&path)?;
    }
    let data = dermatology::load_dermatology(&path, args.sha256.as_deref())?;
    eprintln!(
        "{}: {} rows kept, {} dropped for missing age, sha256 {}",
        path.display(),
        data.sample.data.nrows(),
        data.dropped_lines.len(),
        data.sha256
    );
    let results = dermatology::run_dermatology(&data.sample, &args.algorithms, args.restarts, args.seed)?;
    let csv = output::records_to_csv(&results.iter().map(Flat::from).collect::<Vec<_>>())?;
    print!("{csv}");
    if let Some(dir) = args.out_dir {
        fs::create_dir_all(&dir).map_err(|e| HarnessError::Io { path: dir.clone(), source: e })?;
        for f in &args.format {
            match f {
                Format::Csv => write_file(&dir.join("dermatology.csv"), &csv)?,
                Format::Json => write_file(&dir.join("dermatology.json"), &output::to_json(&results)?)?,
                Format::Svg => return Err(HarnessError::Input("svg output is only available for bench".into()).into()),
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Flat {
    algorithm: Algorithm,
    diag: f64,
    kappa: f64,
    rand: f64,
    crand: f64,
    within: f64,
}

impl From<&DermatologyResult> for Flat {
    fn from(r: &DermatologyResult) -> Self {
        Self {
            algorithm: r.algorithm,
            diag: r.scores.diag,
            kappa: r.scores.kappa,
            rand: r.scores.rand,
            crand: r.scores.crand,
            within: r.within,
        }
    }
}

#[cfg(feature = "fetch")]
fn fetch(path: &Path) -> Result<()> {
    let digest = dermatology::fetch(dermatology::SOURCE_URL, path)?;
    eprintln!("downloaded {} (sha256 {digest})", path.display());
    Ok(())
}

#[cfg(not(feature = "fetch"))]
fn fetch(_: &Path) -> Result<()> {
    Err(HarnessError::Input("this build has no download support; rebuild with --features fetch".into()).into())
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let truth = read_labels(&args.truth)?;
    let found = read_labels(&args.found)?;
    if truth.len() != found.len() {
        return Err(HarnessError::Input(format!("{} truth labels but {} found labels", truth.len(), found.len())).into());
    }
    let report = IndexReport::compare(&encode_labels(&truth), &encode_labels(&found)).map_err(HarnessError::from)?;
    print!("{}", output::to_json(&report)?);
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<HarnessError>().map(HarnessError::exit_code))
        .unwrap_or(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a).context("fit failed"),
        Command::Bench(a) => cmd_bench(a).context("bench failed"),
        Command::Dermatology(a) => cmd_dermatology(a).context("dermatology run failed"),
        Command::Validate(a) => cmd_validate(a).context("validate failed"),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
