//! `texmet`: synthesize texture corpora, evaluate distance metrics between
//! clips, and run the consistency / sensitivity experiments.
//!
//! Exit codes: 0 success, 2 invalid ids or arguments, 3 I/O or file-format
//! failure, 4 degenerate input, 5 manifest validation failure. One value or
//! path per stdout line; diagnostics go to stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use texmet::distribution::{
    load_embeddings, save_embeddings_csv, stub_embed, EmbeddingSet, Provenance,
};
use texmet::error::Error;
use texmet::experiment::{
    run_experiment_config, ExperimentConfig, MetricContext, MetricId, SeedBundle,
};
use texmet::syntex::{render_corpus, CorpusRequest, SweepManifest, SynthConfig, TextureId};
use texmet::SeededRng;

#[derive(Parser)]
#[command(
    name = "texmet",
    version,
    about = "Parametric audio texture synthesis and parameter-sensitive metrics"
)]
struct Cli {
    /// Cap worker parallelism (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a parameter-sweep corpus of WAV files plus its manifest.
    Synth(SynthArgs),
    /// Compute one metric between two WAV files and print the value.
    Metric(MetricArgs),
    /// Run consistency / sensitivity experiments from a JSON config.
    Experiment(ExperimentArgs),
    /// Compute stub embeddings for a corpus, or validate an embedding file.
    Embed(EmbedArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Texture id (fm, wind, windchimes, chimes, tapping, bees, chirps,
    /// fbnoise, pops, applause).
    #[arg(long)]
    texture: String,
    /// Control parameter to sweep.
    #[arg(long)]
    param: String,
    /// Number of swept values.
    #[arg(long, default_value_t = 11)]
    values: usize,
    /// Versions (re-renderings differing only in seed) per value.
    #[arg(long, default_value_t = 10)]
    versions: usize,
    /// Corpus seed.
    #[arg(long, default_value_t = 17)]
    seed: u64,
    /// Clip duration in seconds (1.5 to 2.0).
    #[arg(long, default_value_t = 2.0)]
    duration: f64,
    #[arg(long, default_value_t = 16_000)]
    sample_rate: u32,
    /// JSON file overriding synthesis constants (modal table, reverb, chirp).
    #[arg(long)]
    synth_config: Option<PathBuf>,
    /// Output directory; the corpus lands in `<out>/<texture>-<param>/`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MetricArgs {
    /// Metric id: l2, gm, gmcos, agm, cpm (fad is distributional).
    #[arg(long)]
    id: String,
    file_a: PathBuf,
    file_b: PathBuf,
    /// Seed for the convolution ensemble.
    #[arg(long, default_value_t = SeedBundle::default().ensemble)]
    ensemble_seed: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's metric list (comma-separated ids).
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    /// JSON file overriding synthesis constants.
    #[arg(long)]
    synth_config: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    /// Corpus manifest whose clips get stub embeddings.
    #[arg(long, conflicts_with = "ingest")]
    manifest: Option<PathBuf>,
    /// Output CSV path (with a files.txt sidecar).
    #[arg(long, requires = "manifest")]
    out: Option<PathBuf>,
    /// Embedding seed.
    #[arg(long, default_value_t = SeedBundle::default().embedding)]
    seed: u64,
    /// Validate an existing embedding CSV or binary file and print its shape.
    #[arg(long)]
    ingest: Option<PathBuf>,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidInput(_) | Error::ShapeMismatch(_) => 2,
        Error::DegenerateInput(_) => 4,
        Error::Manifest(_) => 5,
        Error::Io(_)
        | Error::Json(_)
        | Error::UnsupportedCodec(_)
        | Error::Truncated(_)
        | Error::Parse { .. } => 3,
    }
}

/// Print a value with 9 significant digits (plain decimal in the
/// human-scale range, scientific outside it); zero prints as 0.000000000.
fn format_value(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000".to_string();
    }
    let mag = x.abs();
    if (1e-4..1e9).contains(&mag) {
        let digits_before = mag.log10().floor() as i32 + 1;
        let decimals = (9 - digits_before).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.8e}")
    }
}

fn cmd_synth(args: &SynthArgs) -> Result<(), Error> {
    let texture: TextureId = args.texture.parse()?;
    let synth_cfg = match &args.synth_config {
        Some(path) => SynthConfig::from_json_file(path)?,
        None => SynthConfig::default(),
    };
    let request = CorpusRequest {
        texture,
        swept_param: args.param.clone(),
        n_values: args.values,
        n_versions: args.versions,
        base_seed: args.seed,
        duration_s: args.duration,
        sample_rate: args.sample_rate,
    };
    log::info!(
        "synth: texture={} param={} values={} versions={} seed={} duration={}s sr={}",
        texture,
        args.param,
        args.values,
        args.versions,
        args.seed,
        args.duration,
        args.sample_rate
    );
    let manifest = render_corpus(&request, &args.out, &synth_cfg)?;
    println!("{}", manifest.root.join("manifest.json").display());
    Ok(())
}

fn cmd_metric(args: &MetricArgs) -> Result<(), Error> {
    let metric: MetricId = args.id.parse()?;
    if metric.is_distributional() {
        return Err(Error::invalid(format!(
            "{metric} requires corpora; compare manifests through the experiment command"
        )));
    }
    let a = texmet::audio::load_wav(&args.file_a)?;
    let b = texmet::audio::load_wav(&args.file_b)?;
    let ctx = MetricContext::new(SeedBundle {
        ensemble: args.ensemble_seed,
        ..SeedBundle::default()
    });
    log::info!(
        "metric: id={} a={} b={} ensemble_seed={}",
        metric,
        args.file_a.display(),
        args.file_b.display(),
        args.ensemble_seed
    );
    let value = texmet::experiment::pairwise_metric(metric, &a, &b, &ctx)?;
    println!("{}", format_value(value));
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::from_json_file(&args.config)?;
    if let Some(metrics) = &args.metrics {
        cfg.metrics = metrics
            .iter()
            .map(|m| m.parse::<MetricId>())
            .collect::<Result<_, _>>()?;
    }
    let synth_cfg = match &args.synth_config {
        Some(path) => SynthConfig::from_json_file(path)?,
        None => SynthConfig::default(),
    };
    let base_dir = args
        .config
        .parent()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    log::info!(
        "experiment: config={} metrics={:?} experiments={:?} seeds={:?}",
        args.config.display(),
        cfg.metrics,
        cfg.experiments,
        cfg.seeds
    );
    let (_report, written) = run_experiment_config(&cfg, &base_dir, &synth_cfg)?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_embed(args: &EmbedArgs) -> Result<(), Error> {
    if let Some(ingest) = &args.ingest {
        let set = load_embeddings(ingest)?;
        println!("{} {}", set.n_clips(), set.dim());
        return Ok(());
    }
    let manifest_path = args
        .manifest
        .as_ref()
        .ok_or_else(|| Error::invalid("embed needs --manifest or --ingest"))?;
    let out = args
        .out
        .clone()
        .ok_or_else(|| Error::invalid("embed --manifest needs --out"))?;
    let manifest = SweepManifest::load(manifest_path)?;
    manifest.validate()?;
    let seed = SeededRng::new(args.seed);
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for entry in &manifest.files {
        let clip = texmet::audio::load_wav(manifest.resolve(entry))?;
        rows.push(stub_embed(&clip, &seed)?);
        files.push(entry.path.clone());
    }
    let set = EmbeddingSet::from_rows(&rows, Provenance::Stub)?;
    save_embeddings_csv(&set, &out, &files)?;
    log::info!(
        "embed: manifest={} clips={} seed={} (stub embeddings, not a pretrained model)",
        manifest_path.display(),
        rows.len(),
        args.seed
    );
    println!("{}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();

    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
        {
            log::warn!("could not set worker count: {e}");
        }
    }
    if let Ok(dir) = std::env::var("TEXMET_CACHE_DIR") {
        if !dir.is_empty() {
            log::info!("cache dir: {dir}");
        }
    }

    let result = match &cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Metric(args) => cmd_metric(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Embed(args) => cmd_embed(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
