//! `wisard`: create, train, query and inspect WiSARD model files, run
//! BlockScript programs, and serve the HTTP API.
//!
//! Exit codes: 0 success (an "unknown" answer is a success), 1 runtime or
//! I/O failure, 2 usage error, 3 program validation failure.

mod port;

use std::fs;
use std::io::{self, BufRead, BufReader};
use std::net::IpAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use wisard_core::imaging::{load_labeled_dir, load_pattern, write_pgm, DEFAULT_THRESHOLD};
use wisard_core::{
    deserialize_model, render_mental_image, serialize_model, BinarizeConfig, ClassifyOptions,
    WisardModel, MAX_TUPLE_SIZE,
};

use crate::port::CliPort;

#[derive(Debug, Parser)]
#[command(name = "wisard", version, about = "WiSARD weightless neural network workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Create an empty model file.
    New(NewArgs),
    /// Train a model file from a labeled folder or a single image.
    Train(TrainArgs),
    /// Classify an image.
    Classify(ClassifyArgs),
    /// Export a label's mental image as a PGM.
    MentalImage(MentalImageArgs),
    /// Run a BlockScript program.
    Run(RunArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

fn tuple_size(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (1..=MAX_TUPLE_SIZE).contains(&n) {
        Ok(n)
    } else {
        Err(format!("must be between 1 and {MAX_TUPLE_SIZE}"))
    }
}

fn dimension(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(_) => Err(format!("`{s}` is not a number")),
    }
}

#[derive(Debug, Args)]
struct NewArgs {
    #[arg(long, value_parser = dimension)]
    width: usize,
    #[arg(long, value_parser = dimension)]
    height: usize,
    #[arg(long, value_parser = tuple_size)]
    tuple_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["dir", "image"])))]
struct TrainArgs {
    #[arg(long)]
    model: PathBuf,
    /// Folder with one subfolder of `.pgm` images per label.
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long, requires = "label")]
    image: Option<PathBuf>,
    #[arg(long, requires = "image")]
    label: Option<String>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: u8,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    image: PathBuf,
    /// Print the full outcome document, including the bleaching trace.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: u8,
    /// Answer "unknown" when the best score is below this value.
    #[arg(long, default_value_t = 0)]
    min_score: usize,
}

#[derive(Debug, Args)]
struct MentalImageArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    label: String,
    #[arg(long)]
    out: PathBuf,
}

fn camera_entry(s: &str) -> Result<PathBuf, String> {
    match s.split_once('=') {
        Some(("camera", path)) if !path.is_empty() => Ok(PathBuf::from(path)),
        Some((src, _)) if src != "camera" => Err(format!("unknown image source `{src}` (expected `camera`)")),
        _ => Err("expected camera=PATH".into()),
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    program: PathBuf,
    /// Image returned by the next `take picture from camera`; repeat the flag
    /// for successive pictures.
    #[arg(long = "camera-map", value_name = "camera=PATH", value_parser = camera_entry)]
    camera: Vec<PathBuf>,
    /// Read keyboard input from this file instead of stdin.
    #[arg(long)]
    stdin_script: Option<PathBuf>,
    /// Iterations of each `repeat forever` before it exits.
    #[arg(long)]
    max_iterations: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: u64,
    #[arg(long, default_value_t = 32, value_parser = dimension)]
    width: usize,
    #[arg(long, default_value_t = 32, value_parser = dimension)]
    height: usize,
    #[arg(long, default_value_t = 16, value_parser = tuple_size)]
    tuple_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: u8,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Defaults to WISARD_PORT, then 8080.
    #[arg(long)]
    port: Option<u16>,
    /// Defaults to WISARD_MODELS_DIR, then ./models.
    #[arg(long)]
    models_dir: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
}

enum Failure {
    Runtime(String),
    Invalid(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Invalid(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn read_model(path: &Path) -> Result<WisardModel, Failure> {
    let bytes = fs::read(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    deserialize_model(&bytes).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

/// Writes next to `path` and renames over it, so an interrupted write never
/// leaves a truncated model behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Outcome {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)
        .and_then(|()| fs::rename(&tmp, path))
        .map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn binarize_config(model: &WisardModel, threshold: u8) -> BinarizeConfig {
    BinarizeConfig {
        threshold,
        target_width: model.width(),
        target_height: model.height(),
    }
}

fn cmd_new(args: NewArgs) -> Outcome {
    let model = WisardModel::new(args.width, args.height, args.tuple_size, args.seed).map_err(runtime)?;
    write_atomic(&args.out, &serialize_model(&model))?;
    println!(
        "{}: {}x{} retina, tuple size {}, {} neurons per label, seed {}",
        args.out.display(),
        model.width(),
        model.height(),
        model.tuple_size(),
        model.num_tuples(),
        model.seed()
    );
    for (i, tuple) in model.mapping().tuples().iter().enumerate() {
        println!("  neuron {i}: {tuple:?}");
    }
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Outcome {
    let mut model = read_model(&args.model)?;
    let cfg = binarize_config(&model, args.threshold);
    let examples: Vec<(String, _)> = match (&args.dir, &args.image, &args.label) {
        (Some(dir), _, _) => {
            let loaded = load_labeled_dir(dir, &cfg).map_err(runtime)?;
            for d in &loaded.diagnostics {
                eprintln!("skipped {d}");
            }
            loaded.items
        }
        (None, Some(image), Some(label)) => {
            let pattern = load_pattern(image, &cfg).map_err(runtime)?;
            vec![(label.clone(), pattern)]
        }
        _ => unreachable!("clap enforces the source group"),
    };
    if examples.is_empty() {
        return Err(runtime("no images were trained"));
    }
    for (label, pattern) in &examples {
        model.train(pattern, label).map_err(runtime)?;
    }
    write_atomic(&args.model, &serialize_model(&model))?;
    println!("trained {} image(s)", examples.len());
    for (label, count) in model.examples_per_label() {
        println!("{label}: {count}");
    }
    Ok(())
}

fn cmd_classify(args: ClassifyArgs) -> Outcome {
    let model = read_model(&args.model)?;
    let pattern = load_pattern(&args.image, &binarize_config(&model, args.threshold)).map_err(runtime)?;
    let outcome = model
        .classify_with(&pattern, ClassifyOptions { min_score: args.min_score })
        .map_err(runtime)?;
    if args.json {
        let doc = serde_json::to_string_pretty(&outcome.report()).expect("report serializes");
        println!("{doc}");
    } else {
        println!("{}", outcome.decision);
    }
    Ok(())
}

fn cmd_mental_image(args: MentalImageArgs) -> Outcome {
    let model = read_model(&args.model)?;
    let mi = model.mental_image(&args.label).map_err(runtime)?;
    fs::write(&args.out, write_pgm(&render_mental_image(&mi)))
        .map_err(|e| runtime(format!("{}: {e}", args.out.display())))?;
    println!(
        "{}: {}x{} mental image of {:?} (max count {})",
        args.out.display(),
        mi.width,
        mi.height,
        args.label,
        mi.max_count
    );
    Ok(())
}

fn cmd_run(args: RunArgs) -> Outcome {
    let name = args.program.display().to_string();
    let source = fs::read_to_string(&args.program).map_err(|e| runtime(format!("{name}: {e}")))?;
    let program = blockscript::parse(&source)
        .map_err(|e| Failure::Invalid(format!("{name}:{}:{}: error: {}", e.line, e.column, e.message)))?;

    let diags = blockscript::validate(&program);
    for d in &diags {
        eprintln!("{name}:{d}");
    }
    if blockscript::has_errors(&diags) {
        return Err(Failure::Invalid(format!("{name}: program has validation errors")));
    }
    if program.uses_camera() && args.camera.is_empty() {
        return Err(Failure::Invalid(format!(
            "{name}: the program takes pictures from the camera; supply them with --camera-map camera=PATH"
        )));
    }

    let input: Box<dyn BufRead> = match &args.stdin_script {
        Some(path) => Box::new(BufReader::new(
            fs::File::open(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    let base_dir = args.program.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut port = CliPort::new(input, args.camera, base_dir);
    let config = blockscript::ModelConfig {
        width: args.width,
        height: args.height,
        tuple_size: args.tuple_size,
        seed: args.seed,
        threshold: args.threshold,
    };
    let limits = blockscript::RunLimits {
        max_steps: args.max_steps,
        max_loop_iterations: args.max_iterations,
    };
    let summary = blockscript::run(&program, config, &mut port, limits).map_err(runtime)?;
    if let Some(marker) = summary.stop.marker() {
        port.print(marker);
    }
    Ok(())
}

fn cmd_serve(args: ServeArgs) -> Outcome {
    let mut config = wisard_service::ServiceConfig::from_env().map_err(runtime)?;
    if let Some(port) = args.port {
        config.port = port;
    }
    if let Some(dir) = args.models_dir {
        config.models_dir = dir;
    }
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(runtime)?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((args.host, config.port))
            .await
            .map_err(|e| runtime(format!("cannot listen on {}:{}: {e}", args.host, config.port)))?;
        let (registry, skipped) = wisard_service::Registry::open(&config.models_dir)
            .map_err(|e| runtime(format!("{}: {e}", config.models_dir.display())))?;
        for s in skipped {
            eprintln!("skipped {s}");
        }
        let addr = listener.local_addr().map_err(runtime)?;
        eprintln!("listening on http://{addr} (models in {})", config.models_dir.display());
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
            eprintln!("shutting down, saving models");
        };
        let failures = wisard_service::serve(listener, Arc::new(registry), &config, shutdown)
            .await
            .map_err(runtime)?;
        match failures.first() {
            None => Ok(()),
            Some(_) => Err(runtime(
                failures.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"),
            )),
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::New(a) => cmd_new(a),
        Command::Train(a) => cmd_train(a),
        Command::Classify(a) => cmd_classify(a),
        Command::MentalImage(a) => cmd_mental_image(a),
        Command::Run(a) => cmd_run(a),
        Command::Serve(a) => cmd_serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Runtime(msg) | Failure::Invalid(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
