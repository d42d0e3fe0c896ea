//! Flag definitions and their mapping onto [`RunConfig`] keys.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "pelastica", version, about = "Graph p-elastica with obstacles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Sub {
    /// Free p-elastica curve and the U_0 profile.
    Curve,
    /// Obstacle problem for one or more obstacles.
    Solve,
    /// Threshold table h_*, c_p, X_1(L_1), Y_1(L_1).
    Threshold,
    /// Nonexistence functional H(A) and its limit.
    Hbound,
    /// Existence verdicts over a (p, h) grid.
    Sweep,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Default, Args)]
pub struct Common {
    /// `key = value` config file; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Curve and profile sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Obstacle tip heights, comma-separated or repeated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub height: Vec<f64>,
    /// Grid cells N.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    #[arg(long, global = true)]
    pub symmetric: bool,
    /// Also write the exact cone minimizer and the gap.
    #[arg(long, global = true)]
    pub with_exact: bool,
    /// Solve even when no minimizer exists.
    #[arg(long, global = true)]
    pub force: bool,
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub p_list: Vec<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub h_list: Vec<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub a_grid: Vec<f64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Any config key, e.g. `--set obstacle.kind=cone`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Cli {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let command = match self.command {
            Sub::Curve => Command::Curve,
            Sub::Solve => Command::Solve,
            Sub::Threshold => Command::Threshold,
            Sub::Hbound => Command::Hbound,
            Sub::Sweep => Command::Sweep,
        };
        let mut cfg = RunConfig::new(command);
        let c = &self.common;
        if let Some(path) = &c.config {
            cfg.load_file(path)?;
        }
        for kv in &c.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        if let Some(v) = c.p {
            cfg.p = v;
        }
        if let Some(v) = c.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = c.samples {
            cfg.samples = v;
        }
        if !c.height.is_empty() {
            cfg.obstacle.h = c.height.clone();
        }
        if let Some(v) = c.grid {
            cfg.grid_n = v;
        }
        if let Some(v) = c.tol {
            cfg.tol = v;
        }
        if let Some(v) = c.max_iter {
            cfg.max_iter = v;
        }
        cfg.symmetric |= c.symmetric;
        cfg.with_exact |= c.with_exact;
        cfg.force |= c.force;
        if let Some(v) = &c.out {
            cfg.out = v.clone();
        }
        if let Some(f) = c.format {
            cfg.format = match f {
                FormatArg::Csv => crate::config::Format::Csv,
                FormatArg::Json => crate::config::Format::Json,
                FormatArg::Svg => crate::config::Format::Svg,
            };
        }
        if !c.p_list.is_empty() {
            cfg.p_list = c.p_list.clone();
        }
        if !c.h_list.is_empty() {
            cfg.h_list = c.h_list.clone();
        }
        if !c.a_grid.is_empty() {
            cfg.a_grid = c.a_grid.clone();
        }
        if let Some(v) = c.threads {
            cfg.threads = v;
        }
        Ok(cfg)
    }
}
