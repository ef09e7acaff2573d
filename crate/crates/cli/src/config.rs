//! Run configuration read from a TOML file.

use std::path::{Path, PathBuf};

use grating_core::{GratingParams, IncidentWave};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// The configuration shipped with the tool.
pub const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grating: GratingSection,
    pub wave: WaveSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
    pub grid: Option<GridSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GratingSection {
    pub radius_a: f64,
    pub spacing_d: f64,
    pub eps_r: f64,
    pub mu_r: f64,
}

/// Angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSection {
    pub k0: f64,
    pub theta_deg: f64,
    pub psi_deg: f64,
    #[serde(default = "unit")]
    pub amplitude: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactMethod {
    /// One dense solve at `n_trunc`.
    Direct,
    /// Block-Jacobi iteration at `n_trunc`.
    Neumann,
    /// Truncation doubled from `n_trunc` until the change drops below `tol`.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub n_trunc: usize,
    pub m_trunc: usize,
    pub tol: f64,
    pub method: ExactMethod,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            n_trunc: grating_core::exact::DEFAULT_TRUNCATION,
            m_trunc: grating_core::asymptotic::DEFAULT_M_TRUNC,
            tol: 1e-8,
            method: ExactMethod::Direct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: Format,
    pub path: Option<PathBuf>,
}

/// Rectangular sampling grid for `field-grid`, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
    #[serde(default)]
    pub z: f64,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        self.wave()?;
        let s = &self.solver;
        if s.m_trunc == 0 {
            return Err(CliError::Config("solver.m_trunc must be at least 1".into()));
        }
        if s.tol.is_nan() || s.tol <= 0.0 {
            return Err(CliError::Config(format!("solver.tol = {} must be positive", s.tol)));
        }
        if let Some(g) = &self.grid {
            if g.nx == 0 || g.ny == 0 {
                return Err(CliError::Config("grid.nx and grid.ny must be positive".into()));
            }
            if ![g.x0, g.x1, g.y0, g.y1, g.z].iter().all(|v| v.is_finite()) {
                return Err(CliError::Config("grid bounds must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<GratingParams<f64>, CliError> {
        let g = &self.grating;
        GratingParams::new(g.radius_a, g.spacing_d, g.eps_r, g.mu_r)
            .map_err(|e| CliError::Config(format!("grating: {e}")))
    }

    pub fn wave(&self) -> Result<IncidentWave<f64>, CliError> {
        let w = &self.wave;
        IncidentWave::new(w.k0, w.theta_deg.to_radians(), w.psi_deg.to_radians(), w.amplitude)
            .map_err(|e| CliError::Config(format!("wave: {e}")))
    }
}
