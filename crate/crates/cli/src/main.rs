mod config;
mod corpus_cmd;
mod eval_cmd;
mod nli_cmd;
mod output;
mod relations_cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ConfigFile;

/// Invocation problem detected after argument parsing (bad config file,
/// missing setting). Exits with status 2 like clap's own usage errors.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(
    name = "argmine",
    version,
    about = "Argument mining pipeline for clinical exam corpora"
)]
#[command(after_help = "Settings resolve as: flags, then --config file, then ARGMINE_SCORER_URL, then defaults.")]
struct Cli {
    /// `key = value` file with default settings (seed, scorer, endpoint, threshold, ...)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate, summarize, split and inspect annotated corpora
    #[command(subcommand)]
    Corpus(corpus_cmd::CorpusCommand),
    /// Build NLI training data from argument annotations
    #[command(subcommand)]
    Nli(nli_cmd::NliCommand),
    /// Zero-shot relation classification and threshold tuning
    #[command(subcommand)]
    Relations(relations_cmd::RelationsCommand),
    /// Score predictions against gold annotations
    #[command(subcommand)]
    Eval(eval_cmd::EvalCommand),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Corpus(c) => corpus_cmd::run(c, &config),
        Command::Nli(c) => nli_cmd::run(c, &config),
        Command::Relations(c) => relations_cmd::run(c, &config),
        Command::Eval(c) => eval_cmd::run(c),
    }
}

/// The error chain joined with `: `, skipping causes already quoted by the
/// message above them.
fn describe(e: &anyhow::Error) -> String {
    let mut out = e.to_string();
    for cause in e.chain().skip(1) {
        let text = cause.to_string();
        if !out.contains(&text) {
            out.push_str(": ");
            out.push_str(&text);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{}", describe(&e));
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
