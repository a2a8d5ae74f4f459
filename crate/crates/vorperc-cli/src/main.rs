use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use vorperc_cli::{execute, manifest, write_report, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "vorperc", version, about = "Voronoi percolation experiments")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Replica count; defaults per experiment.
    #[arg(long, global = true)]
    replicas: Option<usize>,
    /// Result CSV path; other files are written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; overrides VORPERC_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment config file.
    Run { config: PathBuf },
    /// Print every experiment with its anchor.
    ListExperiments,
    #[command(flatten)]
    Exp(Experiment),
}

fn fail(code: u8, v: serde_json::Value) -> ExitCode {
    eprintln!("{v}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match cli.cmd {
        Cmd::ListExperiments => {
            print!("{}", manifest::render());
            return ExitCode::SUCCESS;
        }
        Cmd::Run { config } => match ExperimentConfig::load(&config) {
            Ok(c) => c,
            Err(e) => return fail(2, e.to_json()),
        },
        Cmd::Exp(exp) => {
            if let Err((f, m)) = exp.validate() {
                return fail(2, json!({ "error": "config", "field": format!("params.{f}"), "message": m }));
            }
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", exp.name())));
            ExperimentConfig::new(exp, cli.seed, cli.replicas, out)
        }
    };
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    if cfg.replicas == 0 {
        return fail(2, json!({ "error": "config", "field": "replicas", "message": "must be positive" }));
    }
    let rep = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(1, json!({ "error": "run", "message": e.to_string() })),
    };
    match write_report(&cfg, &rep) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(3, json!({ "error": "output", "message": e.to_string() })),
    }
}
