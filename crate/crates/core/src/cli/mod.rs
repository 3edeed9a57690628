//! The `gridlink` command line front end.
//!
//! ```text
//! gridlink <configs|losses|crossover|optimal-y|boundary|sweep> --scenario FILE
//!          [--out FILE] [--axis SPEC] [--config Cn] [--y Y] [--workers N]
//! ```

pub mod commands;
pub mod library;
pub mod output;
pub mod scenario;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::error::{Error, Result};
use commands::Flags;
use scenario::{Axis, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Enumerate configurations and their capacities.
    Configs,
    /// Loss breakdown over the length axis.
    Losses,
    /// Crossover lengths at the scenario demand.
    Crossover,
    /// Optimal DC share over the length axis.
    OptimalY,
    /// Most efficient configuration over the demand and length grid.
    Boundary,
    /// C2 band limits along the sweep axis.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Configs => "configs",
            Command::Losses => "losses",
            Command::Crossover => "crossover",
            Command::OptimalY => "optimal-y",
            Command::Boundary => "boundary",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gridlink", version, about = "Loss and boundary analysis for AC/DC conductor reuse")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Scenario file (TOML).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the length axis, or the sweep values for `sweep`
    /// (`start:stop:step` or a comma list).
    #[arg(long)]
    pub axis: Option<String>,
    /// Restricts `losses` or `optimal-y` to one configuration, e.g. `C2`.
    #[arg(long)]
    pub config: Option<String>,
    /// DC share for hybrids, overriding the preset.
    #[arg(long)]
    pub y: Option<f64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub workers: Option<usize>,
}

fn parse_config(text: &str) -> Result<u32> {
    text.strip_prefix('C')
        .or_else(|| text.strip_prefix('c'))
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| Error::validation("config", format!("expected C<n>, got `{text}`")))
}

impl Cli {
    fn flags(&self) -> Result<Flags> {
        let axis = match &self.axis {
            Some(spec) => Some(Axis::parse(spec).map_err(|e| Error::validation("axis", e))?),
            None => None,
        };
        let config = self.config.as_deref().map(parse_config).transpose()?;
        if let Some(y) = self.y {
            if !(0.0..=1.0).contains(&y) {
                return Err(Error::validation("y", "must lie in [0, 1]"));
            }
        }
        Ok(Flags {
            axis,
            config,
            y: self.y,
        })
    }
}

/// Parses inputs, runs the subcommand and writes its CSV.
pub fn run(cli: &Cli) -> Result<()> {
    let flags = cli.flags()?;
    let scenario = Scenario::load(&cli.scenario)?;
    let doc = match cli.workers {
        Some(0) => return Err(Error::validation("workers", "must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Io {
                    context: "starting worker pool".to_string(),
                    source: std::io::Error::other(e),
                })?;
            pool.install(|| commands::run(cli.command, &scenario, &flags))?
        }
        None => commands::run(cli.command, &scenario, &flags)?,
    };
    output::emit_csv(&doc, cli.out.as_deref())
}
