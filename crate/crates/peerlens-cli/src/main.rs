//! `peerlens`: snapshots in; datasets, models, predictions, and
//! experiment reports out.
//!
//! Exit codes: 0 on success, 2 for usage errors (clap), 1 for anything
//! else, with a one-line JSON error on stderr:
//! `{"error":{"kind":"...","message":"..."}}`.

mod args;
mod commands;
mod config;
mod run;

use clap::Parser;
use peerlens::error::{Error, Result};

use crate::args::{Cli, Command};
use crate::config::FileConfig;

fn main() {
    let cli = Cli::parse();
    if let Err(error) = dispatch(&cli) {
        let payload = serde_json::json!({
            "error": {"kind": error.kind(), "message": error.to_string()}
        });
        eprintln!("{payload}");
        std::process::exit(1);
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    if let Some(jobs) = cli.jobs.or(file.jobs) {
        if jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    }
    match &cli.command {
        Command::Synth(args) => commands::data::synth(&file, args),
        Command::Ingest(args) => commands::data::ingest(args),
        Command::Features(args) => commands::data::features(&file, args),
        Command::Cones(args) => commands::data::cones(args),
        Command::Dataset(args) => commands::data::dataset(&file, args),
        Command::Train(args) => commands::model::train(&file, args),
        Command::Eval(args) => commands::model::eval(args),
        Command::Predict(args) => commands::model::predict(args),
        Command::Explain(args) => commands::model::explain(&file, args),
        Command::Experiment(cmd) => commands::experiment::experiment(&file, cmd),
    }
}
