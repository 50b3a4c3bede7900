//! Library side of the `qfb` command-line tool: configuration, output
//! writers and the subcommands.

// `!(a > b)` is used on purpose: it rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::Path;

pub use config::{Scenario, ScenarioConfig};
pub use error::{CliError, CliResult};
pub use output::{read_table, OutputSink, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Stationary,
    Trajectory,
    Locus,
    Switching,
    Check,
}

/// Options shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunOptions<'a> {
    pub config: Option<&'a Path>,
    pub out: &'a Path,
    pub metadata: bool,
    pub dt: Option<f64>,
    pub seed: u64,
}

pub fn run(sub: Subcommand, opts: &RunOptions<'_>) -> CliResult<()> {
    let mut cfg = match opts.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(dt) = opts.dt {
        cfg.dt = dt;
    }
    let scenario = cfg.validate()?;
    let sink = OutputSink::new(opts.out, opts.metadata)?;
    match sub {
        Subcommand::Stationary => commands::stationary::run(&scenario, &sink),
        Subcommand::Trajectory => commands::trajectory::run(&scenario, &sink),
        Subcommand::Locus => commands::locus::run(&scenario, &sink),
        Subcommand::Switching => commands::switching::run(&scenario, &sink),
        Subcommand::Check => commands::check::run(&scenario, &sink, opts.seed),
    }
}
