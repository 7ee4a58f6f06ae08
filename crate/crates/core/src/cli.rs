//! `posebench` command line: corrupt, evaluate, report, augment.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::augment::{build_pipeline, export_augmented, AugmentationSetId, ManifestRow as AugmentRow};
use crate::corruption::{self, derive_seed, CorruptionKind, CorruptionSpec, DatasetProfile, Overrides, Severity};
use crate::data::{DatasetIndex, SigmaOverrides};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalParams, IgnorePolicy, MetricSet};
use crate::image;
use crate::robustness::{build_report, render, CleanRecord, Format, RobustnessReport, RunRecord};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const JOURNAL_FILE: &str = "manifest.journal.csv";

#[derive(Debug, Parser)]
#[command(name = "posebench", version, about = "Corruption robustness benchmark for keypoint estimation")]
pub struct Cli {
    /// TOML or JSON file with defaults for any option below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, env = "BENCH_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write corrupted copies of every image under <out>/<corruption>/<severity>/.
    Corrupt(CorruptArgs),
    /// Score a COCO results file against ground truth.
    Evaluate(EvaluateArgs),
    /// Aggregate clean and corrupted metrics into a robustness table.
    Report(ReportArgs),
    /// Export augmented copies of a dataset.
    Augment(AugmentArgs),
}

#[derive(Debug, Args, Default)]
pub struct DatasetArgs {
    /// COCO keypoints annotation file.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Directory the annotation file names are relative to.
    #[arg(long)]
    pub images: Option<PathBuf>,
    /// Output root.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Global seed; per-image seeds are derived from it [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CorruptArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    /// coco, ochuman or ap10k (selects mask sizes).
    #[arg(long)]
    pub profile: Option<String>,
    /// Comma-separated corruption names, or "all".
    #[arg(long, value_delimiter = ',')]
    pub corruptions: Option<Vec<String>>,
    /// Comma-separated severities 1-5, or "all".
    #[arg(long, value_delimiter = ',')]
    pub severities: Option<Vec<String>>,
    /// Multiplier on the Gaussian-noise sigma [default: 1.0]
    #[arg(long)]
    pub noise_gain: Option<f64>,
    /// Gray level painted by the mask corruption [default: 0]
    #[arg(long)]
    pub mask_fill: Option<u8>,
    /// Overwrite existing outputs.
    #[arg(long)]
    pub force: bool,
    /// Keep outputs whose digest matches an earlier run, regenerate the rest.
    #[arg(long, conflicts_with = "force")]
    pub resume: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ground-truth annotation file.
    #[arg(long)]
    pub gt: PathBuf,
    /// COCO results file.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Write the metrics JSON here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-keypoint sigma overrides (JSON array, or object keyed by category id).
    #[arg(long)]
    pub sigmas: Option<PathBuf>,
    /// What to do with crowd / unlabeled ground truth: ignore or drop.
    #[arg(long, default_value = "ignore")]
    pub ignore_policy: String,
    /// Detections kept per image, highest score first [default: 20]
    #[arg(long)]
    pub max_dets: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Metrics JSON of the clean evaluation.
    #[arg(long)]
    pub clean: PathBuf,
    /// Directory holding <corruption>/<severity>.json metric files.
    #[arg(long)]
    pub metrics_dir: PathBuf,
    /// Where report.md and report.csv go (default: the metrics directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Format printed to stdout: markdown or csv.
    #[arg(long, default_value = "markdown")]
    pub format: String,
    /// Accept an incomplete grid; missing cells show as NA.
    #[arg(long)]
    pub allow_partial: bool,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    /// Comma-separated set ids (A, B, C, D).
    #[arg(long, value_delimiter = ',', required = true)]
    pub sets: Vec<String>,
    /// Augmented copies per source image
    #[arg(long, default_value_t = 1)]
    pub copies: u32,
    /// Override every transform's probability.
    #[arg(long)]
    pub probability: Option<f64>,
}

/// Values a config file may provide. Relative paths resolve against the file's directory.
#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub profile: Option<String>,
    pub annotations: Option<PathBuf>,
    pub images: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub corruptions: Option<Vec<String>>,
    pub severities: Option<Vec<u8>>,
    pub workers: Option<usize>,
    pub noise_gain: Option<f64>,
    pub mask_fill: Option<u8>,
    pub sigmas: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut cfg: ConfigFile = if is_json {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.annotations, &mut cfg.images, &mut cfg.out, &mut cfg.sigmas].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Fully resolved settings for `corrupt` and `augment`.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub profile: DatasetProfile,
    pub annotations: PathBuf,
    pub images: PathBuf,
    pub out: PathBuf,
    pub global_seed: u64,
    pub corruptions: Vec<CorruptionKind>,
    pub severities: Vec<Severity>,
    pub workers: usize,
    pub overrides: Overrides,
    pub force: bool,
    pub resume: bool,
}

impl BenchConfig {
    /// Defaults for a dataset rooted at the given paths: every corruption and severity.
    pub fn new(annotations: impl Into<PathBuf>, images: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            profile: DatasetProfile::Coco,
            annotations: annotations.into(),
            images: images.into(),
            out: out.into(),
            global_seed: 0,
            corruptions: CorruptionKind::ALL.to_vec(),
            severities: Severity::all().collect(),
            workers: 1,
            overrides: Overrides::default(),
            force: false,
            resume: false,
        }
    }
}

fn parse_corruptions(names: &[String]) -> Result<Vec<CorruptionKind>> {
    if names.iter().any(|n| n.eq_ignore_ascii_case("all")) {
        return Ok(CorruptionKind::ALL.to_vec());
    }
    let mut kinds: Vec<CorruptionKind> = names.iter().map(|n| n.parse()).collect::<Result<_>>()?;
    kinds.sort_by_key(|k| k.index());
    kinds.dedup();
    if kinds.is_empty() {
        return Err(Error::Usage("no corruptions selected".into()));
    }
    Ok(kinds)
}

fn parse_severities(values: &[String]) -> Result<Vec<Severity>> {
    if values.iter().any(|v| v.eq_ignore_ascii_case("all")) {
        return Ok(Severity::all().collect());
    }
    let mut out = Vec::new();
    for v in values {
        let level: u8 = v
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("invalid severity {v:?} (valid range 1..=5)")))?;
        out.push(Severity::new(level)?);
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(Error::Usage("no severities selected".into()));
    }
    Ok(out)
}

fn required(value: Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    value.ok_or_else(|| Error::Usage(format!("--{flag} is required (on the command line or in --config)")))
}

fn resolve_workers(flag: Option<usize>, cfg: &ConfigFile) -> Result<usize> {
    let n = flag
        .or(cfg.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if n == 0 {
        return Err(Error::Config("worker count must be >= 1".into()));
    }
    Ok(n)
}

fn resolve_dataset(args: &DatasetArgs, cfg: &ConfigFile) -> Result<(PathBuf, PathBuf, PathBuf, u64)> {
    Ok((
        required(args.annotations.clone().or(cfg.annotations.clone()), "annotations")?,
        required(args.images.clone().or(cfg.images.clone()), "images")?,
        required(args.out.clone().or(cfg.out.clone()), "out")?,
        args.seed.or(cfg.seed).unwrap_or(0),
    ))
}

pub fn resolve_corrupt(args: &CorruptArgs, cfg: &ConfigFile, workers: Option<usize>) -> Result<BenchConfig> {
    let (annotations, images, out, global_seed) = resolve_dataset(&args.dataset, cfg)?;
    let profile = match args.profile.as_ref().or(cfg.profile.as_ref()) {
        Some(p) => p.parse()?,
        None => DatasetProfile::Coco,
    };
    let corruptions = match (&args.corruptions, &cfg.corruptions) {
        (Some(v), _) | (None, Some(v)) => parse_corruptions(v)?,
        (None, None) => CorruptionKind::ALL.to_vec(),
    };
    let severities = match (&args.severities, &cfg.severities) {
        (Some(v), _) => parse_severities(v)?,
        (None, Some(v)) => parse_severities(&v.iter().map(u8::to_string).collect::<Vec<_>>())?,
        (None, None) => Severity::all().collect(),
    };
    let noise_gain = args.noise_gain.or(cfg.noise_gain);
    if let Some(g) = noise_gain {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::Config(format!("noise gain must be positive, got {g}")));
        }
    }
    Ok(BenchConfig {
        profile,
        annotations,
        images,
        out,
        global_seed,
        corruptions,
        severities,
        workers: resolve_workers(workers, cfg)?,
        overrides: Overrides { noise_gain, mask_fill: args.mask_fill.or(cfg.mask_fill), params: None },
        force: args.force,
        resume: args.resume,
    })
}

/// One generated image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifestRow {
    pub source_id: u64,
    pub corruption: String,
    pub severity: u8,
    pub seed: u64,
    /// Relative to the output root, `/`-separated.
    pub output_path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    pub rows: Vec<RunManifestRow>,
    /// One message per image that could not be processed.
    pub failures: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// `<corruption>/<severity>/<file_name with .png extension>`.
pub fn output_rel_path(kind: CorruptionKind, severity: Severity, file_name: &str) -> String {
    let png = Path::new(file_name).with_extension("png");
    let name = png.to_string_lossy().replace('\\', "/");
    format!("{}/{}/{}", kind.name(), severity.level(), name)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn read_manifest_rows(path: &Path) -> Result<Vec<RunManifestRow>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    // a crash can leave a truncated final journal line; keep what parses
    Ok(reader.deserialize().filter_map(|r| r.ok()).collect())
}

fn write_manifest(path: &Path, rows: &[RunManifestRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::io(path, e.into()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    write_atomic(path, &bytes)
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))
}

/// Corrupts every image for every selected (corruption, severity) cell.
///
/// Outputs are PNG, written atomically; each finished image is appended to a
/// journal so an interrupted run can continue with `resume`. The final
/// manifest is sorted by corruption, severity and source id.
pub fn cmd_corrupt(cfg: &BenchConfig) -> Result<RunManifest> {
    let index = DatasetIndex::load(&cfg.annotations)?;
    let cells: Vec<(CorruptionKind, Severity)> = cfg
        .corruptions
        .iter()
        .flat_map(|&k| cfg.severities.iter().map(move |&s| (k, s)))
        .collect();
    let image_ids = index.image_ids();

    let targets: Vec<(u64, String)> = image_ids
        .iter()
        .flat_map(|&id| {
            let name = &index.image(id).expect("indexed").file_name;
            cells.iter().map(move |&(k, s)| (id, output_rel_path(k, s, name)))
        })
        .collect();
    let existing: Vec<&String> = targets.iter().map(|t| &t.1).filter(|p| cfg.out.join(p).exists()).collect();
    if !existing.is_empty() && !cfg.force && !cfg.resume {
        return Err(Error::Usage(format!(
            "{} output(s) already exist under {} (first: {}); pass --force to overwrite or --resume to continue",
            existing.len(),
            cfg.out.display(),
            existing[0]
        )));
    }
    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;

    let journal_path = cfg.out.join(JOURNAL_FILE);
    let manifest_path = cfg.out.join(MANIFEST_FILE);
    let mut known: HashMap<String, RunManifestRow> = HashMap::new();
    if cfg.resume {
        for row in read_manifest_rows(&manifest_path)?.into_iter().chain(read_manifest_rows(&journal_path)?) {
            known.insert(row.output_path.clone(), row);
        }
    }
    let reusable = |rel: &str, seed: u64| -> Option<RunManifestRow> {
        let row = known.get(rel)?;
        let bytes = fs::read(cfg.out.join(rel)).ok()?;
        (row.seed == seed && sha256_hex(&bytes) == row.sha256).then(|| row.clone())
    };

    let journal_file = fs::OpenOptions::new()
        .create(true)
        .append(cfg.resume)
        .write(true)
        .truncate(!cfg.resume)
        .open(&journal_path)
        .map_err(|e| Error::io(&journal_path, e))?;
    let fresh = journal_file.metadata().map_or(true, |m| m.len() == 0);
    let journal = Mutex::new(csv::WriterBuilder::new().has_headers(fresh).from_writer(journal_file));

    let process = |id: u64| -> std::result::Result<Vec<RunManifestRow>, String> {
        let rec = index.image(id).expect("indexed");
        let pending: Vec<(CorruptionKind, Severity, String, u64)> = cells
            .iter()
            .map(|&(k, s)| (k, s, output_rel_path(k, s, &rec.file_name), derive_seed(cfg.global_seed, id, k, s)))
            .collect();
        let mut rows = Vec::with_capacity(pending.len());
        let mut todo = Vec::new();
        for (k, s, rel, seed) in pending {
            match reusable(&rel, seed) {
                Some(row) => rows.push(row),
                None => todo.push((k, s, rel, seed)),
            }
        }
        if todo.is_empty() {
            return Ok(rows);
        }
        let fail = |e: Error| format!("image {id} ({}): {e}", rec.file_name);
        let img = image::load(&cfg.images.join(&rec.file_name)).map_err(fail)?;
        let mask_targets = if todo.iter().any(|t| t.0 == CorruptionKind::Mask) {
            Some(index.mask_targets_for(id).map_err(fail)?)
        } else {
            None
        };
        for (k, s, rel, seed) in todo {
            let spec = CorruptionSpec::new(k, s)
                .with_seed(cfg.global_seed)
                .with_profile(cfg.profile)
                .with_overrides(cfg.overrides);
            let out = corruption::apply(&img, &spec, id, mask_targets.as_deref()).map_err(fail)?;
            let png = image::encode_png(&out).map_err(fail)?;
            write_atomic(&cfg.out.join(&rel), &png).map_err(fail)?;
            let row = RunManifestRow {
                source_id: id,
                corruption: k.name().to_string(),
                severity: s.level(),
                seed,
                output_path: rel,
                sha256: sha256_hex(&png),
            };
            let mut j = journal.lock().expect("journal lock");
            let _ = j.serialize(&row).and_then(|_| j.flush().map_err(Into::into));
            drop(j);
            rows.push(row);
        }
        Ok(rows)
    };

    let results: Vec<std::result::Result<Vec<RunManifestRow>, String>> =
        thread_pool(cfg.workers)?.install(|| image_ids.par_iter().map(|&id| process(id)).collect());

    let mut manifest = RunManifest::default();
    for r in results {
        match r {
            Ok(rows) => manifest.rows.extend(rows),
            Err(msg) => manifest.failures.push(msg),
        }
    }
    let order: HashMap<&str, usize> = CorruptionKind::ALL.iter().map(|k| (k.name(), k.index())).collect();
    manifest
        .rows
        .sort_by(|a, b| (order[a.corruption.as_str()], a.severity, a.source_id).cmp(&(order[b.corruption.as_str()], b.severity, b.source_id)));
    drop(journal);
    write_manifest(&manifest_path, &manifest.rows)?;
    if manifest.failures.is_empty() {
        fs::remove_file(&journal_path).map_err(|e| Error::io(&journal_path, e))?;
    }
    Ok(manifest)
}

/// Evaluates predictions against ground truth.
pub fn cmd_evaluate(gt: &Path, predictions: &Path, params: &EvalParams, sigmas: Option<&Path>) -> Result<MetricSet> {
    let mut index = DatasetIndex::load(gt)?;
    if let Some(p) = sigmas {
        index.apply_sigmas(&SigmaOverrides::load(p)?)?;
    }
    let preds = index.load_predictions(predictions)?;
    evaluate(&index, &preds, params)
}

pub fn read_metrics(path: &Path) -> Result<MetricSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json { path: path.into(), source: e })
}

/// Path of one cell's metrics inside a metrics directory.
pub fn cell_metrics_path(dir: &Path, kind: CorruptionKind, severity: Severity) -> PathBuf {
    dir.join(kind.name()).join(format!("{}.json", severity.level()))
}

/// Builds the robustness report from `<dir>/<corruption>/<severity>.json` files.
pub fn cmd_report(clean: &Path, dir: &Path, allow_partial: bool) -> Result<RobustnessReport> {
    let clean = CleanRecord { metrics: read_metrics(clean)? };
    let mut runs = Vec::new();
    for kind in CorruptionKind::ALL {
        for severity in Severity::all() {
            let path = cell_metrics_path(dir, kind, severity);
            if path.exists() {
                runs.push(RunRecord { corruption: kind, severity, metrics: read_metrics(&path)? });
            }
        }
    }
    build_report(&clean, &runs, allow_partial)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn run_command(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Corrupt(args) => {
            let bench = resolve_corrupt(&args, &cfg, cli.workers)?;
            let manifest = cmd_corrupt(&bench)?;
            eprintln!(
                "wrote {} image(s) under {} ({} worker(s))",
                manifest.rows.len(),
                bench.out.display(),
                bench.workers
            );
            if !manifest.failures.is_empty() {
                return Err(Error::Partial(manifest.failures));
            }
        }
        Command::Evaluate(args) => {
            let mut params = EvalParams {
                ignore_policy: match args.ignore_policy.to_ascii_lowercase().as_str() {
                    "ignore" => IgnorePolicy::Ignore,
                    "drop" => IgnorePolicy::Drop,
                    other => return Err(Error::Usage(format!("unknown ignore policy {other:?} (ignore or drop)"))),
                },
                ..Default::default()
            };
            if let Some(m) = args.max_dets {
                params.max_detections = m;
            }
            let sigmas = args.sigmas.or(cfg.sigmas);
            let metrics = cmd_evaluate(&args.gt, &args.predictions, &params, sigmas.as_deref())?;
            let text = serde_json::to_string_pretty(&metrics).expect("metrics serialize");
            println!("{text}");
            if let Some(out) = args.out {
                write_text(&out, &(text + "\n"))?;
            }
        }
        Command::Report(args) => {
            let format: Format = args.format.parse()?;
            let report = cmd_report(&args.clean, &args.metrics_dir, args.allow_partial)?;
            let out = args.out.unwrap_or_else(|| args.metrics_dir.clone());
            write_text(&out.join("report.md"), &render(&report, Format::Markdown))?;
            write_text(&out.join("report.csv"), &render(&report, Format::Csv))?;
            print!("{}", render(&report, format));
        }
        Command::Augment(args) => {
            let (annotations, images, out, seed) = resolve_dataset(&args.dataset, &cfg)?;
            let sets: Vec<AugmentationSetId> = args.sets.iter().map(|s| s.parse()).collect::<Result<_>>()?;
            let mut pipeline = build_pipeline(&sets)?;
            if let Some(p) = args.probability {
                pipeline = pipeline.with_probability(p)?;
            }
            let names: Vec<&str> = pipeline.transforms.iter().map(|t| t.kind.name()).collect();
            eprintln!("pipeline: {} transform(s): {}", names.len(), names.join(", "));
            let index = DatasetIndex::load(&annotations)?;
            let workers = resolve_workers(cli.workers, &cfg)?;
            let rows: Vec<AugmentRow> = thread_pool(workers)?
                .install(|| export_augmented(&index, &images, &pipeline, args.copies, &out, seed))?;
            eprintln!("wrote {} image(s) under {}", rows.len(), out.display());
        }
    }
    Ok(())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_command(cli) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            e.exit_code()
        }
    }
}
