mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::json;
use sppal_core::export::sha256_hex;

use crate::commands::Outcome;
use crate::config::{load_config, Format, RunConfig};

/// Stepped-plate parametric array loudspeaker modelling.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Optimizer seed (overrides optimizer.nsga.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "SPPAL_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Ultrasound propagation curve.
    Pc,
    /// Ultrasound beam pattern.
    Bp,
    /// Equivalence ratio against frequency.
    Er,
    /// Audio propagation curve.
    AudioPc,
    /// Audio beam pattern.
    AudioBp,
    /// Audio frequency response at the audio maximum.
    AudioFr,
    /// Audio maximum over a carrier-frequency / ultrasound-CD grid.
    CdContour,
    /// NSGA-II Pareto front for one design.
    Pareto,
    /// Design-space sweep.
    Sweep,
    /// Combination-resonance screening.
    CrScreen,
    /// Validate the config and print it with defaults filled in.
    Check,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Pc => "pc",
            Command::Bp => "bp",
            Command::Er => "er",
            Command::AudioPc => "audio-pc",
            Command::AudioBp => "audio-bp",
            Command::AudioFr => "audio-fr",
            Command::CdContour => "cd-contour",
            Command::Pareto => "pareto",
            Command::Sweep => "sweep",
            Command::CrScreen => "cr-screen",
            Command::Check => "check",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("cannot configure the thread pool")?;
    }
    let path = cli.config.as_ref().context("--config is required")?;
    let mut cfg = load_config(path)?;
    if let Some(seed) = cli.seed {
        cfg.optimizer.get_or_insert_with(Default::default).nsga.seed = seed;
    }
    if let Some(f) = cli.format {
        cfg.output.formats = f;
    }
    let name = cli.command.name();
    cfg.check_for(name)?;
    if let Command::Check = cli.command {
        println!("{}", serde_json::to_string_pretty(&cfg)?);
        return Ok(());
    }
    let medium = cfg.medium.build()?;
    let outcome = match cli.command {
        Command::Pc => commands::pc(&cfg, &medium),
        Command::Bp => commands::bp(&cfg, &medium),
        Command::Er => commands::er(&cfg, &medium),
        Command::AudioPc => commands::audio_pc(&cfg, &medium),
        Command::AudioBp => commands::audio_bp(&cfg, &medium),
        Command::AudioFr => commands::audio_fr(&cfg, &medium),
        Command::CdContour => commands::cd_contour(&cfg, &medium),
        Command::Pareto => commands::pareto(&cfg, &medium),
        Command::Sweep => commands::sweep(&cfg, &medium),
        Command::CrScreen => commands::cr(&cfg),
        Command::Check => unreachable!(),
    }
    .with_context(|| format!("`{name}` failed"))?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
    write_outputs(&dir, name, &cfg, &outcome)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    if cfg.output.warnings_as_errors && !outcome.warnings.is_empty() {
        anyhow::bail!("{} warning(s) escalated to errors; outputs are marked incomplete", outcome.warnings.len());
    }
    Ok(())
}

fn write_outputs(dir: &Path, command: &str, cfg: &RunConfig, outcome: &Outcome) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let canonical = serde_json::to_string(cfg)?;
    let hash = sha256_hex(canonical.as_bytes());
    let seed = cfg.seed();
    let complete = !(cfg.output.warnings_as_errors && !outcome.warnings.is_empty());
    let metadata = json!({
        "tool": "sppal",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config_sha256": hash,
        "seed": seed,
        "complete": complete,
        "warnings": outcome.warnings,
    });
    let mut comments = vec![format!("sppal {} command={command} config_sha256={hash} seed={seed} complete={complete}", env!("CARGO_PKG_VERSION"))];
    comments.extend(outcome.notes.iter().cloned());
    comments.extend(outcome.warnings.iter().map(|w| format!("warning: {w}")));
    for a in &outcome.artifacts {
        if matches!(cfg.output.formats, Format::Csv | Format::Both) {
            let p = dir.join(format!("{}.csv", a.name));
            std::fs::write(&p, a.table.to_csv(&comments)).with_context(|| format!("cannot write {}", p.display()))?;
        }
        if matches!(cfg.output.formats, Format::Json | Format::Both) && !a.result.is_null() {
            let doc = json!({"metadata": metadata, "config": cfg, "result": a.result});
            let p = dir.join(format!("{}.json", a.name));
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            std::fs::write(&p, text).with_context(|| format!("cannot write {}", p.display()))?;
        }
    }
    Ok(())
}
