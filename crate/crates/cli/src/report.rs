//! Report assembly and emission.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{Cli, Format};
use crate::replay::Counterexample;

pub const OUT_DIR_VAR: &str = "ADDCOMB_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub config_echo: Value,
    pub seed: u64,
    pub results: Value,
    pub counterexamples: Vec<Counterexample>,
}

/// What a subcommand produced. `failed` drives exit code 1.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub results: Value,
    pub counterexamples: Vec<Counterexample>,
    /// Header plus rows, for subcommands with a profile or curve.
    pub csv: Option<String>,
    pub failed: bool,
}

impl Outcome {
    pub fn new(results: Value) -> Self {
        Outcome { results, counterexamples: Vec::new(), csv: None, failed: false }
    }

    pub fn with_counterexamples(results: Value, counterexamples: Vec<Counterexample>) -> Self {
        let failed = !counterexamples.is_empty();
        Outcome { results, counterexamples, csv: None, failed }
    }
}

pub fn build_report(cli: &Cli, outcome: &Outcome) -> Result<Report> {
    Ok(Report {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_echo: serde_json::to_value(&cli.command).context("echoing configuration")?,
        seed: cli.seed,
        results: outcome.results.clone(),
        counterexamples: outcome.counterexamples.clone(),
    })
}

/// The rendered report body for the requested format.
pub fn render(cli: &Cli, outcome: &Outcome) -> Result<String> {
    match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&build_report(cli, outcome)?)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => match &outcome.csv {
            Some(csv) => Ok(csv.clone()),
            None => bail!("{} has no CSV output; use --format json", cli.command.name()),
        },
    }
}

/// `--out`, else `$ADDCOMB_OUT_DIR/<subcommand>.<ext>`, else stdout (`None`).
pub fn destination(cli: &Cli) -> Option<PathBuf> {
    if let Some(p) = &cli.out {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_VAR)?;
    let ext = match cli.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    Some(PathBuf::from(dir).join(format!("{}.{ext}", cli.command.name())))
}

pub fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    let body = render(cli, outcome)?;
    match destination(cli) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
        }
        None => std::io::stdout().write_all(body.as_bytes()).context("writing to stdout"),
    }
}
