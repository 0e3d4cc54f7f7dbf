use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use harmonorm::GridConfig;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Optional JSON run configuration; every field may be overridden by a flag.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_r: Option<usize>,
    pub n_theta: Option<usize>,
    pub refine_tol: Option<f64>,
    pub ladder_depth: Option<usize>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid run config {}", path.display()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of grid radii
    #[arg(long)]
    pub n_r: Option<usize>,
    /// Number of grid angles
    #[arg(long)]
    pub n_theta: Option<usize>,
    /// Step at which local refinement stops
    #[arg(long)]
    pub refine_tol: Option<f64>,
    /// Boundary ladder rungs
    #[arg(long)]
    pub ladder_depth: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub struct Resolved {
    pub grid: GridConfig,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl RunArgs {
    pub fn resolve(&self, default_format: Format) -> Result<Resolved> {
        let file = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let base = GridConfig::default();
        let grid = GridConfig {
            n_r: self.n_r.or(file.n_r).unwrap_or(base.n_r),
            n_theta: self.n_theta.or(file.n_theta).unwrap_or(base.n_theta),
            refine_tol: self.refine_tol.or(file.refine_tol).unwrap_or(base.refine_tol),
            ladder_depth: self.ladder_depth.or(file.ladder_depth).unwrap_or(base.ladder_depth),
            refine_top: base.refine_top,
        };
        grid.validate()?;
        Ok(Resolved {
            grid,
            format: self.format.or(file.format).unwrap_or(default_format),
            output: self.output.clone().or(file.output),
        })
    }
}
