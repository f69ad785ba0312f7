use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use settlegen::export::{export_http, ExportOptions};
use settlegen::layout::Algorithm;
use settlegen::pipeline::{run_benchmark, write_summary, write_trace_csv, BenchmarkSpec, Pipeline, PipelineConfig};
use settlegen::world::save_world;
use settlegen::Error;

/// Generate a walled settlement on a voxel heightmap, or benchmark the
/// layout optimizers.
#[derive(Debug, Parser)]
#[command(name = "settlegen", version)]
struct Cli {
    /// Pipeline configuration (JSON). Flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// heuristic, evolve or random.
    #[arg(long)]
    algorithm: Option<Algorithm>,

    /// World file to write; in benchmark mode, the output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Run the layout benchmark, optionally from a benchmark spec (JSON).
    #[arg(long, num_args = 0..=1, value_name = "SPEC")]
    benchmark: Option<Option<PathBuf>>,

    /// Send the finished edit log to this block-placement endpoint.
    #[arg(long)]
    export_url: Option<String>,
}

enum Failure {
    Config(Error),
    Stage(Error),
    Export(Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Stage(_) => 2,
            Failure::Export(_) => 3,
        }
    }

    fn error(&self) -> &Error {
        match self {
            Failure::Config(e) | Failure::Stage(e) | Failure::Export(e) => e,
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(e.into()))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(Error::Config(format!("{}: {e}", path.display()))))
}

fn ensure_parent(path: &Path) -> Result<(), Failure> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| Failure::Stage(e.into())),
        _ => Ok(()),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    ensure_parent(path)?;
    fs::write(path, contents).map_err(|e| Failure::Stage(e.into()))
}

fn benchmark(cli: &Cli, spec_path: Option<&Path>) -> Result<(), Failure> {
    let mut spec: BenchmarkSpec = match spec_path {
        Some(p) => read_json(p)?,
        None => BenchmarkSpec::default(),
    };
    if let Some(seed) = cli.seed {
        spec.first_seed = seed;
    }
    if let Some(a) = cli.algorithm {
        spec.algorithms = vec![a];
    }
    spec.validate().map_err(Failure::Config)?;
    let result = run_benchmark(&spec).map_err(Failure::Stage)?;

    let mut summary = Vec::new();
    write_summary(&mut summary, &result.summary).map_err(Failure::Stage)?;
    io::stdout().write_all(&summary).map_err(|e| Failure::Stage(e.into()))?;
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir).map_err(|e| Failure::Stage(e.into()))?;
        let traces = dir.join("traces.csv");
        let fresh = fs::metadata(&traces).map(|m| m.len() == 0).unwrap_or(true);
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&traces)
            .map_err(|e| Failure::Stage(e.into()))?;
        write_trace_csv(&mut file, &result.runs, fresh).map_err(Failure::Stage)?;
        write_file(&dir.join("summary.csv"), &String::from_utf8_lossy(&summary))?;
    }
    Ok(())
}

fn generate(cli: &Cli) -> Result<(), Failure> {
    let mut config: PipelineConfig = match &cli.config {
        Some(p) => read_json(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(a) = cli.algorithm {
        config.algorithm = a;
    }
    if let Some(out) = &cli.out {
        config.output.world = Some(out.clone());
    }

    let mut pipeline = Pipeline::new(config.clone()).map_err(Failure::Config)?;
    let report = match pipeline.run() {
        Ok(r) => r,
        Err(e) => {
            if let Some(out) = &config.output.world {
                let partial = out.with_extension("partial.json");
                if ensure_parent(&partial).is_ok() && save_world(pipeline.world(), &partial).is_ok() {
                    eprintln!("partial world written to {}", partial.display());
                }
            }
            return Err(Failure::Stage(e));
        }
    };
    let world = pipeline.into_world();
    if let Some(out) = &config.output.world {
        ensure_parent(out)?;
        save_world(&world, out).map_err(Failure::Stage)?;
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    match &config.output.report {
        Some(path) => write_file(path, &json)?,
        None => println!("{json}"),
    }

    if let Some(url) = &cli.export_url {
        let sent = export_http(&world, url, &ExportOptions::default()).map_err(Failure::Export)?;
        eprintln!(
            "exported {} edits ({} failed, {} retries)",
            sent.placed, sent.failed, sent.retries
        );
        if sent.failed > 0 {
            return Err(Failure::Export(Error::Network(format!(
                "{} edits were not placed",
                sent.failed
            ))));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.benchmark {
        Some(spec) => benchmark(&cli, spec.as_deref()),
        None => generate(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.error());
            ExitCode::from(f.code())
        }
    }
}
