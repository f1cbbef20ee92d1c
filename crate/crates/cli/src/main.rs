//! `sceptic`: corpus generation, detector runs, verification suites and
//! weak-law games. Exit status 0 means no alarm, 2 an alarm (or a failed
//! verification), 1 an error; nothing is written on error.

mod config;
mod corpus;
mod detect;
mod error;
mod output;
mod play;
mod seeds;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, Result};
use crate::output::Staged;

#[derive(Debug, Parser)]
#[command(name = "sceptic", version, about = "Capital-process experiments on price paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a corpus of CSV paths and its manifest.
    GenCorpus(Common),
    /// Run a detector over a corpus.
    Detect(Common),
    /// Run invariant suites.
    Verify(Common),
    /// Play weak-law games and write transcripts.
    WllnPlay(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat TOML config file.
    #[arg(long)]
    config: PathBuf,
    /// Root seed; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

enum Status {
    Clean,
    Alarm,
}

fn root_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64> {
    flag.or(config)
        .ok_or_else(|| CliError::Usage("no root seed: pass --seed or set `seed` in the config".into()))
}

fn write_config(staged: &mut Staged, text: String) {
    staged.text("config.toml", text);
}

fn run(cli: Cli) -> Result<Status> {
    let (common, outcome) = match cli.command {
        Command::GenCorpus(c) => {
            let cfg: config::CorpusConfig = config::load(&c.config)?;
            let mut staged = corpus::gen_corpus(&cfg, root_seed(c.seed, cfg.seed)?)?;
            write_config(&mut staged, config::canonical(&cfg)?);
            (c, (staged, Status::Clean))
        }
        Command::Detect(c) => {
            let cfg: config::DetectConfig = config::load(&c.config)?;
            let dir = c.config.parent().unwrap_or(Path::new("."));
            let d = detect::detect(&cfg, dir, root_seed(c.seed, cfg.seed)?)?;
            let mut staged = d.staged;
            write_config(&mut staged, config::canonical(&cfg)?);
            (c, (staged, if d.alarm { Status::Alarm } else { Status::Clean }))
        }
        Command::Verify(c) => {
            let cfg: config::VerifyConfig = config::load(&c.config)?;
            let report = verify::verify(&cfg, root_seed(c.seed, cfg.seed)?)?;
            let status = if report.pass { Status::Clean } else { Status::Alarm };
            let mut staged = Staged::default();
            staged.json("verify.json", &report)?;
            write_config(&mut staged, config::canonical(&cfg)?);
            (c, (staged, status))
        }
        Command::WllnPlay(c) => {
            let cfg: config::PlayConfig = config::load(&c.config)?;
            let mut staged = play::wlln_play(&cfg, root_seed(c.seed, cfg.seed)?)?;
            write_config(&mut staged, config::canonical(&cfg)?);
            (c, (staged, Status::Clean))
        }
    };
    let (staged, status) = outcome;
    staged.commit(&common.out)?;
    Ok(status)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Alarm) => ExitCode::from(2),
        Err(e) => {
            eprintln!("sceptic: {e}");
            ExitCode::from(1)
        }
    }
}
