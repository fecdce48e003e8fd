use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use rtn_entangle::io::{
    self, CliError, Command, Format, Preset, RunConfig, EXIT_CONFIG, EXIT_VALIDATION,
};

#[derive(Debug, Parser)]
#[command(
    name = "rtn-entangle",
    version,
    about = "Two-qubit entanglement under random telegraph noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Single-qubit coherence q(t).
    Coherence(Args),
    /// Concurrence versus γ_A t.
    Concurrence(Args),
    /// ESD time, dark intervals, revivals and final death.
    Events(Args),
    /// Revival threshold g_th.
    Threshold(Args),
    /// Parameter sweep.
    Sweep(Args),
    /// Compare q(t) with a Monte Carlo average over noise histories.
    McValidate(Args),
}

#[derive(Debug, clap::Args)]
struct Args {
    /// JSON configuration file, or `-` for stdin.
    #[arg(long)]
    config: Option<String>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `mc.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplies the simulated flip rate (negative control for mc-validate).
    #[arg(long, hide = true)]
    flip_rate_scale: Option<f64>,
}

impl Sub {
    fn split(self) -> (Command, Args) {
        match self {
            Sub::Coherence(a) => (Command::Coherence, a),
            Sub::Concurrence(a) => (Command::Concurrence, a),
            Sub::Events(a) => (Command::Events, a),
            Sub::Threshold(a) => (Command::Threshold, a),
            Sub::Sweep(a) => (Command::Sweep, a),
            Sub::McValidate(a) => (Command::McValidate, a),
        }
    }
}

fn load_config(args: &Args) -> Result<RunConfig, CliError> {
    let mut cfg = match args.config.as_deref() {
        Some("-") => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            RunConfig::from_json(&text)?
        }
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
            RunConfig::from_json(&text)?
        }
        None if args.preset.is_some() => RunConfig::preset_base(),
        None => {
            return Err(CliError::Config(
                "either --config or --preset is required".into(),
            ))
        }
    };
    if let Some(f) = args.format {
        cfg.output.format = f;
    }
    if let Some(p) = &args.out {
        cfg.output.path = Some(p.clone());
    }
    if args.seed.is_some() || args.flip_rate_scale.is_some() {
        let mc = cfg.mc.as_mut().ok_or_else(|| {
            CliError::Config("--seed and --flip-rate-scale need an `mc` section".into())
        })?;
        if let Some(s) = args.seed {
            mc.seed = s;
        }
        if let Some(k) = args.flip_rate_scale {
            mc.flip_rate_scale = k;
        }
    }
    Ok(cfg)
}

/// Writes through a sibling temporary file so a failed run leaves no partial output.
fn write_atomic(path: &Path, body: &str) -> anyhow::Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, body).with_context(|| format!("cannot write {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = cli.command.split();
    let cfg = match load_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = match io::run(command, &cfg, args.preset) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let written = match &cfg.output.path {
        Some(path) => write_atomic(path, &report.body),
        None => match std::io::stdout().lock().write_all(report.body.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            other => other.context("cannot write to stdout"),
        },
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_CONFIG);
    }
    if let Some(s) = &report.summary {
        eprintln!("{s}");
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VALIDATION)
    }
}
