//! The `edrm` command line.
//!
//! Exit status: 0 success, 2 invalid input or configuration, 3 I/O failure,
//! 4 when some items of a batch failed.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use edrm_core::format::{checksums, read_header};
use edrm_core::{ConfusionMatrix, Label, Method, Model};
use log::{error, info};
use rayon::prelude::*;

use crate::dataset::{
    build_labeled_matrix, build_split_manifest, decode_all, decode_and_flatten, scan_directory,
    Manifest, PixelConfig, ResizePolicy, SampleRecord, Split,
};
use crate::error::{create_parent, Error, Result};
use crate::explain::{explain_decision, export_eigenimage, export_mean_image};
use crate::model_io::{load_model, save_model};
use crate::parallel::{self, TrainConfig};
use crate::report::{emit_report, ReportFormat};

pub const EXIT_PARTIAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "edrm",
    version,
    about = "Explainable mean-distance and per-class PCA image detectors"
)]
pub struct Cli {
    /// Worker threads for decoding and training (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// More log output on standard error.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan class directories and write a train/validation split manifest.
    Ingest(IngestArgs),
    /// Train a detector on the manifest's train split.
    Train(TrainArgs),
    /// Score a model on one split of a manifest.
    Evaluate(EvaluateArgs),
    /// Classify images, one tab-separated line per image.
    Predict(PredictArgs),
    /// Classify one image and write heatmaps, class means and the decision trace.
    Explain(ExplainArgs),
    /// Print a model file's header.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub pos_dir: PathBuf,
    #[arg(long)]
    pub neg_dir: PathBuf,
    #[arg(long, default_value_t = 250)]
    pub pos_train: usize,
    #[arg(long, default_value_t = 50)]
    pub pos_val: usize,
    #[arg(long, default_value_t = 500)]
    pub neg_train: usize,
    #[arg(long, default_value_t = 100)]
    pub neg_val: usize,
    /// Optional directories added in full as the test split.
    #[arg(long)]
    pub test_pos_dir: Option<PathBuf>,
    #[arg(long)]
    pub test_neg_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PixelArgs {
    /// How to treat images whose size differs from the model's: reject or bilinear.
    #[arg(long, default_value = "reject")]
    pub resize: ResizePolicy,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value = "pca")]
    pub method: Method,
    /// Principal components per class.
    #[arg(long, default_value_t = 180)]
    pub r: usize,
    /// Subtract the class mean before the SVD.
    #[arg(long)]
    pub centered: bool,
    #[arg(long, default_value_t = 512)]
    pub height: u32,
    #[arg(long, default_value_t = 512)]
    pub width: u32,
    #[command(flatten)]
    pub pixels: PixelArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value = "validation")]
    pub split: Split,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value = "json")]
    pub format: ReportFormat,
    #[command(flatten)]
    pub pixels: PixelArgs,
    /// Report destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub pixels: PixelArgs,
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub pixels: PixelArgs,
    /// Also render this many leading eigenimages per class (pca models only).
    #[arg(long, default_value_t = 0)]
    pub eigenimages: usize,
    pub image: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    pub model: PathBuf,
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Info,
        1 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .target(env_logger::Target::Stderr)
        .try_init();

    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Error::Usage(format!(
                "cannot start {n} worker threads: {e}"
            ))),
        },
        None => dispatch(cli.command),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            error!("{e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Ingest(a) => cmd_ingest(&a).map(|_| 0),
        Command::Train(a) => cmd_train(&a).map(|_| 0),
        Command::Evaluate(a) => cmd_evaluate(&a).map(|_| 0),
        Command::Predict(a) => cmd_predict(&a),
        Command::Explain(a) => cmd_explain(&a).map(|_| 0),
        Command::Inspect(a) => cmd_inspect(&a).map(|_| 0),
    }
}

pub fn cmd_ingest(args: &IngestArgs) -> Result<Manifest> {
    let pos = scan_directory(&args.pos_dir, Label::Positive, Split::Train)?;
    let neg = scan_directory(&args.neg_dir, Label::Negative, Split::Train)?;
    let mut manifest = build_split_manifest(pos, args.pos_train, args.pos_val, args.seed)?.merge(
        build_split_manifest(neg, args.neg_train, args.neg_val, args.seed)?,
    )?;
    for (dir, label) in [
        (&args.test_pos_dir, Label::Positive),
        (&args.test_neg_dir, Label::Negative),
    ] {
        if let Some(dir) = dir {
            let test = scan_directory(dir, label, Split::Test)?;
            manifest = manifest.merge(Manifest::new(test, args.seed)?)?;
        }
    }
    manifest.save(&args.out)?;
    for split in [Split::Train, Split::Validation, Split::Test] {
        info!(
            "{split}: {} positive, {} negative",
            manifest.count(Label::Positive, split),
            manifest.count(Label::Negative, split)
        );
    }
    Ok(manifest)
}

pub fn cmd_train(args: &TrainArgs) -> Result<Model> {
    let manifest = Manifest::load(&args.manifest)?;
    let cfg = PixelConfig::new(args.height, args.width, args.pixels.resize)?;
    let pos = build_labeled_matrix(&manifest, Split::Train, Label::Positive, &cfg)?;
    let neg = build_labeled_matrix(&manifest, Split::Train, Label::Negative, &cfg)?;
    info!(
        "training {} model on {} positive and {} negative images",
        args.method,
        pos.cols(),
        neg.cols()
    );
    let train_cfg = TrainConfig {
        method: args.method,
        r: args.r,
        centered: args.centered,
        shape: cfg.shape,
    };
    let model = parallel::train(&pos, &neg, &train_cfg)?;
    save_model(&model, &args.out)?;
    info!("model written to {}", args.out.display());
    Ok(model)
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<ConfusionMatrix> {
    let manifest = Manifest::load(&args.manifest)?;
    let model = load_model(&args.model)?;
    let cfg = PixelConfig::for_shape(model.shape(), args.pixels.resize)?;
    let records: Vec<&SampleRecord> = manifest.select(args.split, None).collect();
    if records.is_empty() {
        return Err(edrm_core::Error::InvalidInput(format!(
            "manifest has no samples in the {} split",
            args.split
        ))
        .into());
    }
    let paths: Vec<&Path> = records.iter().map(|r| r.path.as_path()).collect();
    let vectors = decode_all(&paths, &cfg)?;
    let traces = model.classify_all(&vectors)?;
    let truth: Vec<Label> = records.iter().map(|r| r.label).collect();
    let predicted: Vec<Label> = traces.iter().map(|t| t.label).collect();
    let cm = ConfusionMatrix::from_predictions(&truth, &predicted)?;
    let metrics = cm.metrics()?;
    match &args.out {
        Some(path) => {
            create_parent(path)?;
            let mut file =
                io::BufWriter::new(fs::File::create(path).map_err(|e| Error::io(path, e))?);
            emit_report(&metrics, &cm, args.format, &mut file)
                .and_then(|_| file.flush())
                .map_err(|e| Error::io(path, e))?;
        }
        None => emit_report(&metrics, &cm, args.format, &mut io::stdout().lock())
            .map_err(|e| Error::io("<stdout>", e))?,
    }
    info!(
        "{} split: accuracy {:.4}, precision {:.4}, recall {:.4}, f1 {:.4}",
        args.split, metrics.accuracy, metrics.precision, metrics.recall, metrics.f1
    );
    Ok(cm)
}

pub fn cmd_predict(args: &PredictArgs) -> Result<i32> {
    let model = load_model(&args.model)?;
    let cfg = PixelConfig::for_shape(model.shape(), args.pixels.resize)?;
    let results: Vec<Result<edrm_core::DecisionTrace>> = args
        .images
        .par_iter()
        .map(|p| {
            model
                .classify(&decode_and_flatten(p, &cfg)?)
                .map_err(Error::from)
        })
        .collect();
    let mut out = io::stdout().lock();
    let mut failed = 0;
    for (path, result) in args.images.iter().zip(results) {
        let line = match result {
            Ok(t) => format!("{}\t{}\t{}\t{}", path.display(), t.label, t.d_pos, t.d_neg),
            Err(e) => {
                failed += 1;
                error!("{e}");
                format!("{}\terror\t{e}", path.display())
            }
        };
        writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(if failed > 0 { EXIT_PARTIAL } else { 0 })
}

pub fn cmd_explain(args: &ExplainArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let cfg = PixelConfig::for_shape(model.shape(), args.pixels.resize)?;
    let x = decode_and_flatten(&args.image, &cfg)?;
    let explanation = explain_decision(&model, &x, &args.out)?;
    for class in Label::ALL {
        export_mean_image(&model, class, &args.out.join(format!("mean_{class}.png")))?;
        for i in 0..args.eigenimages {
            export_eigenimage(
                &model,
                class,
                i,
                &args.out.join(format!("eigen_{class}_{i:03}.png")),
            )?;
        }
    }
    let t = explanation.trace;
    println!(
        "{}\t{}\t{}\t{}\t{}",
        args.image.display(),
        t.label,
        t.d_pos,
        t.d_neg,
        t.margin
    );
    Ok(())
}

pub fn cmd_inspect(args: &InspectArgs) -> Result<()> {
    let bytes = fs::read(&args.model).map_err(|e| Error::io(&args.model, e))?;
    let header = read_header(&bytes)?;
    let (stored, computed) = checksums(&bytes)?;
    let mut out = io::stdout().lock();
    let lines = [
        "magic: EDRM".to_string(),
        format!("version: {}", header.version),
        format!("method: {}", header.method),
        format!("centered: {}", header.centered),
        format!("height: {}", header.shape.height),
        format!("width: {}", header.shape.width),
        format!("channels: {}", header.shape.channels),
        format!("r: {}", header.r),
        format!("bytes: {}", bytes.len()),
        format!(
            "crc32: {stored:08x} ({})",
            if stored == computed { "ok" } else { "mismatch" }
        ),
    ];
    for line in lines {
        writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))?;
    }
    if stored != computed {
        return Err(edrm_core::Error::ModelFormat(format!(
            "checksum mismatch: stored {stored:08x}, computed {computed:08x}"
        ))
        .into());
    }
    Ok(())
}
