use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kdvlab_cli::experiments::SUMMARY_FILE;
use kdvlab_cli::sweep::{expand, run_sweep};
use kdvlab_cli::{report, run, validate, ConfigError, RunConfig, RunSummary};

/// Exit status for failed acceptance checks.
const EXIT_FAILED: u8 = 1;
/// Exit status for invalid input.
const EXIT_INVALID: u8 = 2;

#[derive(Parser)]
#[command(name = "kdvlab", version, about = "Resolvent, conservation and smoothing diagnostics for (g)KdV")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Configuration file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (defaults to the config's output_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to the available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed overriding the configured one.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Verb {
    /// Check a config and print it with defaults filled in.
    Validate,
    /// Run one experiment.
    Run,
    /// Aggregate summaries (files or run directories) into a table and index.
    Report { summaries: Vec<PathBuf> },
    /// Run a parameter sweep.
    Sweep,
}

fn print_errors(errors: &[ConfigError]) {
    for e in errors {
        eprintln!("error: {e}");
    }
}

fn read_config(cli: &Cli) -> Result<(String, PathBuf), String> {
    let path = cli.config.as_ref().ok_or("--config is required")?;
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((text, base))
}

fn load_config(cli: &Cli) -> Result<RunConfig, ExitCode> {
    let (text, base) = read_config(cli).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_INVALID)
    })?;
    validate(&text, &base, cli.seed).map_err(|errors| {
        print_errors(&errors);
        ExitCode::from(EXIT_INVALID)
    })
}

fn finish_report(summaries: &[(String, RunSummary)], out: Option<&Path>) -> ExitCode {
    let (table, index) = match report(summaries) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    print!("{table}");
    if let Some(dir) = out {
        let written = fs::create_dir_all(dir)
            .map_err(|e| e.to_string())
            .and_then(|_| serde_json::to_string_pretty(&index).map_err(|e| e.to_string()))
            .and_then(|json| fs::write(dir.join("index.json"), json + "\n").map_err(|e| e.to_string()));
        if let Err(e) = written {
            eprintln!("error: cannot write index: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    if index.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn load_summary(path: &Path) -> Result<RunSummary, String> {
    let file = if path.is_dir() { path.join(SUMMARY_FILE) } else { path.to_path_buf() };
    let text = fs::read_to_string(&file).map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", file.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(EXIT_INVALID);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: cannot start worker threads: {e}");
        return ExitCode::from(EXIT_INVALID);
    }
    match &cli.verb {
        Verb::Validate => match load_config(&cli) {
            Ok(cfg) => {
                println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Verb::Run => {
            let cfg = match load_config(&cli) {
                Ok(cfg) => cfg,
                Err(code) => return code,
            };
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
            let summary = run(&cfg, &out, threads);
            if let Some(e) = &summary.error {
                eprintln!("error: {e}");
            }
            finish_report(&[(out.display().to_string(), summary)], None)
        }
        Verb::Report { summaries } => {
            let loaded: Result<Vec<_>, String> =
                summaries.iter().map(|p| load_summary(p).map(|s| (p.display().to_string(), s))).collect();
            match loaded {
                Ok(list) => finish_report(&list, cli.out.as_deref()),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_INVALID)
                }
            }
        }
        Verb::Sweep => {
            let (text, base) = match read_config(&cli) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_INVALID);
                }
            };
            let configs = match expand(&text, &base, cli.seed) {
                Ok(c) => c,
                Err(errors) => {
                    print_errors(&errors);
                    return ExitCode::from(EXIT_INVALID);
                }
            };
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("sweep_out"));
            let results = run_sweep(&configs, &out, threads);
            finish_report(&results, Some(&out))
        }
    }
}
