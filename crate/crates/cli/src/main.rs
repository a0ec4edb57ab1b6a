//! `ergoq`: reproducible queueing and odometer experiments.
//!
//! Every run writes `<name>.csv` (one row per measurement) and `<name>.json`
//! (the resolved config plus results) into the output directory. The JSON
//! summary can be passed back with `--config` to repeat the run.

mod config;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser};
use serde::Deserialize;
use serde_json::json;

use config::{Command, ExperimentConfig, OutputConfig, OutputFormat};

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "ERGOQ_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "ergoq", version, about = "Lindley queues, Loynes coupling and the dyadic odometer")]
struct Cli {
    /// Global seed. Replica r of any process uses stream r of this seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run from a JSON config, or from a previous run's JSON summary.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: $ERGOQ_OUT_DIR, else the current directory].
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// File stem for the outputs [default: the subcommand name].
    #[arg(long, global = true)]
    name: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    command: Option<Command>,
}

/// A config file: every field but the command is optional.
#[derive(Debug, Deserialize)]
struct FileConfig {
    seed: Option<u64>,
    #[serde(default)]
    output: PartialOutput,
    #[serde(flatten)]
    command: Command,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialOutput {
    dir: Option<PathBuf>,
    name: Option<String>,
    format: Option<OutputFormat>,
}

enum Failure {
    Usage(String),
    Config(String),
    Runtime(String),
    Io(String),
}

impl Failure {
    fn exit(self) -> ExitCode {
        let (kind, message, code) = match self {
            Failure::Usage(m) => ("usage", m, 2),
            Failure::Config(m) => ("config", m, 2),
            Failure::Runtime(m) => ("runtime", m, 1),
            Failure::Io(m) => ("io", m, 1),
        };
        eprintln!("{}", json!({ "error": { "kind": kind, "message": message } }));
        ExitCode::from(code)
    }
}

fn load_file(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    // A run summary nests the config under "config".
    if let Some(inner) = value.get_mut("config") {
        value = inner.take();
    }
    serde_json::from_value(value).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn resolve(cli: Cli) -> Result<(ExperimentConfig, Vec<PathBuf>), Failure> {
    let mut inputs = Vec::new();
    let (command, file_seed, file_out) = match (cli.command, &cli.config) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give either a subcommand or --config, not both".into())),
        (None, None) => return Err(Failure::Usage("a subcommand or --config is required; see --help".into())),
        (Some(c), None) => (c, None, PartialOutput::default()),
        (None, Some(path)) => {
            let f = load_file(path)?;
            inputs.push(path.clone());
            (f.command, f.seed, f.output)
        }
    };
    let dir = cli
        .out_dir
        .or(file_out.dir)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let name = cli.name.or(file_out.name).unwrap_or_else(|| command.name().to_string());
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(Failure::Config(format!("output name '{name}' must be a plain file stem")));
    }
    for kind in command.processes() {
        if let ergoq::processes::ProcessKind::Trace { path } = kind {
            inputs.push(path.clone());
        }
    }
    let config = ExperimentConfig {
        seed: cli.seed.or(file_seed).unwrap_or(0),
        output: OutputConfig {
            dir,
            name,
            format: cli.format.or(file_out.format).unwrap_or_default(),
        },
        command,
    };
    Ok((config, inputs))
}

/// Absolute form of a path that may not exist yet.
fn normalized(path: &Path) -> PathBuf {
    if let Ok(p) = path.canonicalize() {
        return p;
    }
    match (path.parent(), path.file_name()) {
        (Some(parent), Some(file)) => {
            let parent = if parent.as_os_str().is_empty() { Path::new(".") } else { parent };
            parent.canonicalize().map(|p| p.join(file)).unwrap_or_else(|_| path.to_path_buf())
        }
        _ => path.to_path_buf(),
    }
}

fn output_paths(cfg: &ExperimentConfig) -> (PathBuf, PathBuf) {
    let base = cfg.output.dir.join(&cfg.output.name);
    (base.with_extension("csv"), base.with_extension("json"))
}

fn write_csv(path: &Path, table: &run::Table) -> Result<(), Failure> {
    let io = |e: csv::Error| Failure::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let (cfg, inputs) = resolve(cli)?;
    cfg.command.validate().map_err(Failure::Config)?;
    let (csv_path, json_path) = output_paths(&cfg);
    std::fs::create_dir_all(&cfg.output.dir)
        .map_err(|e| Failure::Io(format!("{}: {e}", cfg.output.dir.display())))?;
    let inputs: Vec<PathBuf> = inputs.iter().map(|p| normalized(p)).collect();
    for out in [&csv_path, &json_path] {
        if inputs.contains(&normalized(out)) {
            return Err(Failure::Config(format!("output {} would overwrite an input file", out.display())));
        }
    }

    let artifact = run::run(&cfg.command, cfg.seed).map_err(Failure::Runtime)?;

    if cfg.output.format.csv() {
        write_csv(&csv_path, &artifact.table)?;
        println!("{}", csv_path.display());
    }
    if cfg.output.format.json() {
        let summary = json!({ "config": cfg, "results": artifact.results });
        let mut text = serde_json::to_string_pretty(&summary).map_err(|e| Failure::Runtime(e.to_string()))?;
        text.push('\n');
        std::fs::write(&json_path, text).map_err(|e| Failure::Io(format!("{}: {e}", json_path.display())))?;
        println!("{}", json_path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let text = text.trim().strip_prefix("error: ").unwrap_or(text.trim()).to_string();
            return Failure::Usage(text).exit();
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.exit(),
    }
}
