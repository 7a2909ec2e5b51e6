//! gazetk command line: dataset statistics, training, prediction, metric
//! evaluation and plot-file generation.
//!
//! Exit codes: 0 success, 2 input error, 3 numeric failure.

mod density;
mod render;
mod source;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use gazetk::baselines::{center_bias, wta_scanpath, WtaConfig};
use gazetk::grid::write_pgm16;
use gazetk::ingest::{
    length_stats, load_dataset, per_image_seed, CoordinateMode, StatsSummary,
};
use gazetk::model::{Model as GenericModel, ModelConfig};
use gazetk::trainer::{evaluate, train, DataSource, EvalConfig, Predictor, TrainConfig};
use gazetk::{DatasetRecord, Error, Model, Result, SaliencyMap, Scanpath};

use render::RenderSpec;
use source::{load_image_tensor, FileDataSource};

#[derive(Parser)]
#[command(name = "gazetk", version, about = "Scanpath prediction and evaluation toolkit")]
struct Cli {
    /// Master seed for every randomized operation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Coords {
    /// Coordinates already in [0, 1].
    Normalized,
    /// Pixel indices counted from 0.
    Pixel0,
    /// Pixel indices counted from 1.
    Pixel1,
}

impl From<Coords> for CoordinateMode {
    fn from(c: Coords) -> Self {
        match c {
            Coords::Normalized => CoordinateMode::Normalized,
            Coords::Pixel0 => CoordinateMode::PixelOrigin0,
            Coords::Pixel1 => CoordinateMode::PixelOrigin1,
        }
    }
}

#[derive(Args)]
struct DatasetArgs {
    /// Dataset file in the canonical JSON-Lines format.
    #[arg(long)]
    dataset: PathBuf,

    /// Interpretation of raw coordinates.
    #[arg(long, value_enum, default_value_t = Coords::Normalized)]
    coords: Coords,

    /// Directory with stimulus images named by image_id.
    #[arg(long)]
    images: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Scanpath length statistics, one row per dataset plus a combined row.
    Stats {
        /// One or more dataset files.
        datasets: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Coords::Normalized)]
        coords: Coords,
    },
    /// Train the scanpath regressor and write a checkpoint.
    Train {
        #[command(flatten)]
        data: DatasetArgs,
        /// JSON config with optional "model" and "train" sections.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Checkpoint output path (a .json sidecar is written next to it).
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Predict a scanpath for a single image with a trained checkpoint.
    Predict {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Stimulus image file (png, jpeg or pnm).
        #[arg(long)]
        image: PathBuf,
    },
    /// Evaluate a checkpoint or baseline: MultiMatch, NSS and Congruency.
    Eval {
        #[command(flatten)]
        data: DatasetArgs,
        #[arg(long, conflicts_with = "baseline")]
        checkpoint: Option<PathBuf>,
        /// Baseline predictor: center-bias, wta or echo.
        #[arg(long, value_enum)]
        baseline: Option<Baseline>,
        /// Fixations per generated scanpath.
        #[arg(long, default_value_t = 8)]
        fixations: usize,
        /// Inhibition-of-return radius for wta, normalized units.
        #[arg(long, default_value_t = 0.1)]
        ior_radius: f64,
    },
    /// Render a scanpath overlay as an SVG file.
    Render {
        #[command(flatten)]
        data: DatasetArgs,
        /// Which image to render.
        #[arg(long)]
        image_id: String,
        /// Scanpath source: gt, gt:K, center-bias, wta or model:CHECKPOINT.
        #[arg(long, default_value = "gt")]
        scanpath: String,
        #[arg(long, default_value_t = 8)]
        fixations: usize,
        #[arg(long, default_value_t = 0.1)]
        ior_radius: f64,
        /// Output width in pixels; height follows the image aspect ratio.
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 2.0)]
        stroke: f64,
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
    },
    /// Fixation density histogram over the dataset.
    Density {
        #[command(flatten)]
        data: DatasetArgs,
        /// Fixation source: gt, center-bias, wta or model:CHECKPOINT.
        #[arg(long, default_value = "gt")]
        scanpath: String,
        #[arg(long, default_value_t = 64)]
        bins: usize,
        /// Sample count for the center-bias source.
        #[arg(long, default_value_t = 10000)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        fixations: usize,
        #[arg(long, default_value_t = 0.1)]
        ior_radius: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Baseline {
    CenterBias,
    Wta,
    Echo,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numeric() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Stats { datasets, coords } => cmd_stats(&cli, datasets, *coords),
        Command::Train {
            data,
            config,
            checkpoint,
        } => cmd_train(&cli, data, config.as_deref(), checkpoint),
        Command::Predict { checkpoint, image } => cmd_predict(&cli, checkpoint, image),
        Command::Eval {
            data,
            checkpoint,
            baseline,
            fixations,
            ior_radius,
        } => cmd_eval(&cli, data, checkpoint.as_deref(), *baseline, *fixations, *ior_radius),
        Command::Render {
            data,
            image_id,
            scanpath,
            fixations,
            ior_radius,
            width,
            stroke,
            radius,
        } => cmd_render(
            &cli, data, image_id, scanpath, *fixations, *ior_radius, *width, *stroke, *radius,
        ),
        Command::Density {
            data,
            scanpath,
            bins,
            samples,
            fixations,
            ior_radius,
        } => cmd_density(&cli, data, scanpath, *bins, *samples, *fixations, *ior_radius),
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

// ---------------------------------------------------------------- stats --

#[derive(Serialize)]
struct StatsOutput {
    files: Vec<FileStats>,
    combined: StatsSummary,
}

#[derive(Serialize)]
struct FileStats {
    path: String,
    stats: StatsSummary,
}

fn stats_text_row(name: &str, s: &StatsSummary) -> String {
    format!(
        "{:<24} {:>4} {:>4} {:>7.2} {:>7} {:>6.2}  {:<12} {:>10}",
        name,
        s.min,
        s.max,
        s.mean,
        s.median,
        s.std,
        format!("{} ({:.2}%)", s.mode, s.mode_share * 100.0),
        s.count
    )
}

fn cmd_stats(cli: &Cli, datasets: &[PathBuf], coords: Coords) -> Result<()> {
    if datasets.is_empty() {
        return Err(Error::InvalidConfig("stats needs at least one dataset".into()));
    }
    let mut files = Vec::new();
    let mut all_records: Vec<DatasetRecord> = Vec::new();
    for path in datasets {
        let records: Vec<DatasetRecord> = load_dataset(path, coords.into())?;
        let stats = length_stats(&records)?;
        files.push(FileStats {
            path: path.display().to_string(),
            stats,
        });
        all_records.extend(records);
    }
    let combined = length_stats(&all_records)?;
    let output = StatsOutput { files, combined };

    let content = match cli.format {
        Format::Json => serde_json::to_string_pretty(&output)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            + "\n",
        Format::Csv => {
            let mut s = String::from("dataset,min,max,mean,median,std,mode,mode_share,count\n");
            for f in &output.files {
                s.push_str(&stats_csv_row(&f.path, &f.stats));
            }
            s.push_str(&stats_csv_row("combined", &output.combined));
            s
        }
        Format::Text => {
            let mut s = format!(
                "{:<24} {:>4} {:>4} {:>7} {:>7} {:>6}  {:<12} {:>10}\n",
                "Dataset", "Min", "Max", "Mean", "Median", "std", "Mode", "Scanpaths"
            );
            for f in &output.files {
                let name = Path::new(&f.path)
                    .file_name()
                    .map(|n| n.to_string_lossy().to_string())
                    .unwrap_or_else(|| f.path.clone());
                s.push_str(&stats_text_row(&name, &f.stats));
                s.push('\n');
            }
            if output.files.len() > 1 {
                s.push_str(&stats_text_row("combined", &output.combined));
                s.push('\n');
            }
            s
        }
    };
    write_output(&cli.out, &content)
}

fn stats_csv_row(name: &str, s: &StatsSummary) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}\n",
        name, s.min, s.max, s.mean, s.median, s.std, s.mode, s.mode_share, s.count
    )
}

// ---------------------------------------------------------------- train --

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    model: PartialModelConfig,
    #[serde(default)]
    train: PartialTrainConfig,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct PartialModelConfig {
    input_size: Option<(usize, usize, usize)>,
    blocks: Option<Vec<(usize, usize)>>,
    scanpath_len: Option<usize>,
    seed: Option<u64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct PartialTrainConfig {
    epochs: Option<usize>,
    lr: Option<f64>,
    batch_size: Option<usize>,
    seed: Option<u64>,
    val_fraction: Option<f64>,
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text).map_err(|e| Error::Parse {
                line: 0,
                msg: format!("config {}: {e}", p.display()),
            })
        }
    }
}

/// The --seed flag funnels into both configs; explicit config-file seeds win.
fn resolve_configs(file: FileConfig, cli_seed: u64) -> (ModelConfig, TrainConfig) {
    let md = ModelConfig::default();
    let td = TrainConfig::default();
    let model = ModelConfig {
        input_size: file.model.input_size.unwrap_or(md.input_size),
        blocks: file.model.blocks.unwrap_or(md.blocks),
        scanpath_len: file.model.scanpath_len.unwrap_or(md.scanpath_len),
        seed: file.model.seed.unwrap_or(cli_seed),
    };
    let train = TrainConfig {
        epochs: file.train.epochs.unwrap_or(td.epochs),
        lr: file.train.lr.unwrap_or(td.lr),
        batch_size: file.train.batch_size.unwrap_or(td.batch_size),
        seed: file.train.seed.unwrap_or(cli_seed),
        val_fraction: file.train.val_fraction.unwrap_or(td.val_fraction),
    };
    (model, train)
}

fn cmd_train(
    cli: &Cli,
    data: &DatasetArgs,
    config: Option<&Path>,
    checkpoint: &Path,
) -> Result<()> {
    let records: Vec<DatasetRecord> = load_dataset(&data.dataset, data.coords.into())?;
    let (model_cfg, train_cfg) = resolve_configs(load_file_config(config)?, cli.seed);
    let source = FileDataSource::new(&data.dataset, data.images.clone());
    let (model, mut report) = train(&records, model_cfg, &train_cfg, &source)?;
    model.save_checkpoint(checkpoint)?;
    report.checkpoint = Some(checkpoint.display().to_string());
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?
        + "\n";
    write_output(&cli.out, &json)
}

// -------------------------------------------------------------- predict --

#[derive(Serialize)]
struct PredictOutput {
    image: String,
    points: Vec<(f64, f64)>,
    clamped: Vec<(f64, f64)>,
}

fn cmd_predict(cli: &Cli, checkpoint: &Path, image: &Path) -> Result<()> {
    let model: Model = GenericModel::load_checkpoint(checkpoint)?;
    let tensor = load_image_tensor(image, model.config.input_size)?;
    let pred = model.predict(&tensor)?;
    let output = PredictOutput {
        image: image.display().to_string(),
        points: pred.points.clone(),
        clamped: pred.clamped.clone(),
    };
    let content = match cli.format {
        Format::Json => {
            serde_json::to_string_pretty(&output)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?
                + "\n"
        }
        _ => {
            let mut s = String::from("fixation        x          y\n");
            for (i, (x, y)) in output.clamped.iter().enumerate() {
                s.push_str(&format!("{:>8} {:>9.5} {:>10.5}\n", i + 1, x, y));
            }
            s
        }
    };
    write_output(&cli.out, &content)
}

// ----------------------------------------------------------------- eval --

fn cmd_eval(
    cli: &Cli,
    data: &DatasetArgs,
    checkpoint: Option<&Path>,
    baseline: Option<Baseline>,
    fixations: usize,
    ior_radius: f64,
) -> Result<()> {
    let records: Vec<DatasetRecord> = load_dataset(&data.dataset, data.coords.into())?;
    let source = FileDataSource::new(&data.dataset, data.images.clone());
    let model;
    let predictor = match (checkpoint, baseline) {
        (Some(path), None) => {
            model = GenericModel::load_checkpoint(path)?;
            Predictor::Model(&model)
        }
        (None, Some(Baseline::CenterBias)) => Predictor::CenterBias { n: fixations },
        (None, Some(Baseline::Wta)) => Predictor::Wta(WtaConfig {
            n_fixations: fixations,
            ior_radius,
        }),
        (None, Some(Baseline::Echo)) => Predictor::Echo,
        _ => {
            return Err(Error::InvalidConfig(
                "eval needs exactly one of --checkpoint or --baseline".into(),
            ))
        }
    };
    let row = evaluate(&predictor, &records, &source, &EvalConfig { seed: cli.seed })?;
    let content = match cli.format {
        Format::Json => {
            serde_json::to_string_pretty(&row).map_err(|e| Error::InvalidConfig(e.to_string()))?
                + "\n"
        }
        Format::Csv => format!("{}\n{}\n", gazetk::trainer::EvalRow::csv_header(), row.to_csv()),
        Format::Text => row.to_text() + "\n",
    };
    write_output(&cli.out, &content)
}

// --------------------------------------------------------------- render --

fn find_record<'a>(records: &'a [DatasetRecord], image_id: &str) -> Result<&'a DatasetRecord> {
    records
        .iter()
        .find(|r| r.image_id == image_id)
        .ok_or_else(|| Error::UnknownImageId(image_id.to_string()))
}

/// Produces the scanpath named by a source spec for one record.
fn scanpath_from_source(
    spec: &str,
    record: &DatasetRecord,
    source: &FileDataSource,
    seed: u64,
    fixations: usize,
    ior_radius: f64,
) -> Result<Scanpath> {
    if spec == "gt" {
        return Ok(record.scanpaths[0].clone());
    }
    if let Some(k) = spec.strip_prefix("gt:") {
        let idx: usize = k
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad scanpath index {k:?}")))?;
        return record
            .scanpaths
            .get(idx)
            .cloned()
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "scanpath index {idx} out of range (image {:?} has {})",
                    record.image_id,
                    record.scanpaths.len()
                ))
            });
    }
    match spec {
        "center-bias" => {
            let sp = center_bias(fixations, per_image_seed(seed, &record.image_id))?;
            Scanpath::new(
                sp.fixations,
                record.image_id.clone(),
                record.image_width,
                record.image_height,
            )
        }
        "wta" => {
            let s: SaliencyMap = source.saliency(record)?.ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "image {:?} has no saliency map (needed for wta)",
                    record.image_id
                ))
            })?;
            let sp = wta_scanpath(
                &s,
                &WtaConfig {
                    n_fixations: fixations,
                    ior_radius,
                },
            )?;
            Scanpath::new(
                sp.fixations,
                record.image_id.clone(),
                record.image_width,
                record.image_height,
            )
        }
        other => {
            if let Some(ckpt) = other.strip_prefix("model:") {
                let model: Model = GenericModel::load_checkpoint(Path::new(ckpt))?;
                let tensor = source.image(record, model.config.input_size)?;
                model.predict(&tensor)?.to_scanpath(
                    record.image_id.clone(),
                    record.image_width,
                    record.image_height,
                )
            } else {
                Err(Error::InvalidConfig(format!(
                    "unknown scanpath source {other:?} (use gt, gt:K, center-bias, wta or model:CHECKPOINT)"
                )))
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_render(
    cli: &Cli,
    data: &DatasetArgs,
    image_id: &str,
    scanpath: &str,
    fixations: usize,
    ior_radius: f64,
    width: u32,
    stroke: f64,
    radius: f64,
) -> Result<()> {
    let records: Vec<DatasetRecord> = load_dataset(&data.dataset, data.coords.into())?;
    let record = find_record(&records, image_id)?;
    let source = FileDataSource::new(&data.dataset, data.images.clone());
    let sp = scanpath_from_source(scanpath, record, &source, cli.seed, fixations, ior_radius)?;
    if width == 0 {
        return Err(Error::InvalidConfig("width must be positive".into()));
    }
    let height = ((width as f64) * record.image_height as f64 / record.image_width as f64)
        .round()
        .max(1.0) as u32;
    let spec = RenderSpec {
        width,
        height,
        stroke_width: stroke,
        point_radius: radius,
        ..RenderSpec::default()
    };
    let title = format!("{image_id} ({scanpath})");
    let svg = render::scanpath_svg(&sp, &spec, &title);
    write_output(&cli.out, &svg)
}

// -------------------------------------------------------------- density --

fn cmd_density(
    cli: &Cli,
    data: &DatasetArgs,
    scanpath: &str,
    bins: usize,
    samples: usize,
    fixations: usize,
    ior_radius: f64,
) -> Result<()> {
    let records: Vec<DatasetRecord> = load_dataset(&data.dataset, data.coords.into())?;
    let source = FileDataSource::new(&data.dataset, data.images.clone());
    let mut points: Vec<(f64, f64)> = Vec::new();
    match scanpath {
        "gt" => {
            for r in &records {
                for sp in &r.scanpaths {
                    points.extend(sp.fixations.iter().map(|f| (f.x, f.y)));
                }
            }
        }
        "center-bias" => {
            let sp = center_bias::<f64>(samples, cli.seed)?;
            points.extend(sp.fixations.iter().map(|f| (f.x, f.y)));
        }
        _ => {
            for r in &records {
                let sp = scanpath_from_source(scanpath, r, &source, cli.seed, fixations, ior_radius)?;
                points.extend(sp.fixations.iter().map(|f| (f.x, f.y)));
            }
        }
    }
    let grid = density::density_grid(&points, bins)?;

    if let Some(out) = &cli.out {
        if out.extension().is_some_and(|e| e == "pgm") {
            let mut buf = Vec::new();
            write_pgm16(&grid, &mut buf)?;
            std::fs::write(out, buf)?;
            return Ok(());
        }
    }
    let content = match cli.format {
        Format::Json => {
            #[derive(Serialize)]
            struct DensityOutput {
                bins: usize,
                values: Vec<Vec<f64>>,
            }
            let values = (0..grid.height())
                .map(|r| (0..grid.width()).map(|c| grid.get(r, c)).collect())
                .collect();
            serde_json::to_string_pretty(&DensityOutput { bins, values })
                .map_err(|e| Error::InvalidConfig(e.to_string()))?
                + "\n"
        }
        _ => {
            let map = SaliencyMap::new(grid)?;
            let mut buf = Vec::new();
            map.write_text_grid(&mut buf)?;
            String::from_utf8(buf).expect("grid text is utf-8")
        }
    };
    write_output(&cli.out, &content)
}
