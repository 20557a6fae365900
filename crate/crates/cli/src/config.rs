//! JSON run configuration. Each command reads its own top-level block; unknown
//! keys are rejected at every level.

use crate::CliError;
use mesoscat_core::cluster::{uniform_circle_cluster, ClusterGeometry, Inclusion};
use mesoscat_core::greens::{DiskDomain, MediumParams};
use mesoscat_core::Point;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Scatter,
    Interface,
    Eigen,
    Quasistatic,
    Oracle,
    Fieldmap,
}

impl Command {
    pub fn key(self) -> &'static str {
        match self {
            Command::Scatter => "scatter",
            Command::Interface => "interface",
            Command::Eigen => "eigen",
            Command::Quasistatic => "quasistatic",
            Command::Oracle => "oracle",
            Command::Fieldmap => "fieldmap",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scatter: Option<ScatterProblem>,
    pub interface: Option<InterfaceProblem>,
    pub eigen: Option<EigenProblem>,
    pub quasistatic: Option<QuasistaticProblem>,
    pub oracle: Option<OracleProblem>,
    pub fieldmap: Option<FieldmapProblem>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Ppm,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    /// Used when `--output-dir` is not given.
    pub directory: Option<PathBuf>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            formats: default_formats(),
            directory: None,
        }
    }
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Ppm]
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSpec {
    #[serde(default = "one")]
    pub mu: f64,
    #[serde(default = "one")]
    pub rho: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterSpec {
    /// `n` equally spaced inclusions on a circle, first one at angle 0.
    Ring(RingSpec),
    Explicit(ExplicitSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub n: usize,
    #[serde(default)]
    pub center: [f64; 2],
    pub radius: f64,
    pub epsilon: f64,
    #[serde(default = "one")]
    pub total_mass: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    pub epsilon: f64,
    pub inclusions: Vec<InclusionSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InclusionSpec {
    pub center: [f64; 2],
    #[serde(default = "one")]
    pub radius_factor: f64,
    #[serde(default)]
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x: [f64; 2],
    pub y: [f64; 2],
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemChoice {
    /// Identical system when all inclusions match, general otherwise.
    #[default]
    Auto,
    Identical,
    General,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaRuleChoice {
    #[default]
    Midpoint,
    Cubature7,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterProblem {
    pub medium: MediumSpec,
    pub cluster: ClusterSpec,
    pub source: [f64; 2],
    #[serde(default)]
    pub system: SystemChoice,
    #[serde(default)]
    pub area_rule: AreaRuleChoice,
    pub source_guard: Option<f64>,
    #[serde(default = "default_boundary_points")]
    pub boundary_points: usize,
    pub grid: Option<GridSpec>,
}

fn default_boundary_points() -> usize {
    64
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceProblem {
    pub medium: MediumSpec,
    /// Mass of one inclusion of the underlying ring.
    pub inclusion_mass: f64,
    pub total_mass: f64,
    pub epsilon: f64,
    pub source: [f64; 2],
    #[serde(default = "default_interface_modes")]
    pub n_modes: usize,
    #[serde(default = "default_transmission_samples")]
    pub transmission_samples: usize,
    /// Ring sizes for the discrete-vs-interface comparison table.
    #[serde(default)]
    pub compare: Vec<usize>,
    pub grid: Option<GridSpec>,
}

fn default_interface_modes() -> usize {
    128
}

fn default_transmission_samples() -> usize {
    32
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasistaticProblem {
    pub radius: f64,
    /// The first inclusion is the driven one.
    pub cluster: ClusterSpec,
    pub f: f64,
    pub lambda: f64,
    #[serde(default = "default_misfit_points")]
    pub boundary_points: usize,
    pub grid: Option<GridSpec>,
}

fn default_misfit_points() -> usize {
    128
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenProblem {
    pub radius: f64,
    pub cluster: ClusterSpec,
    #[serde(default)]
    pub dirichlet_limit: bool,
    /// Membrane density; needed unless `dirichlet_limit`.
    pub rho: Option<f64>,
    #[serde(default = "default_eigen_modes")]
    pub n_modes: usize,
    pub search: Option<SearchSpec>,
    pub grid: Option<GridSpec>,
}

fn default_eigen_modes() -> usize {
    64
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleProblem {
    FdEigen(FdSpec),
    Collocation(CollocationSpec),
    Bessel(BesselSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdSpec {
    pub radius: f64,
    pub cluster: Option<ClusterSpec>,
    pub h: f64,
    /// Samples the eigenvector (scaled to `max |v| = 1`) when present.
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollocationSpec {
    pub medium: MediumSpec,
    pub cluster: ClusterSpec,
    pub source: [f64; 2],
    #[serde(default = "default_collocation_points")]
    pub points_per_boundary: usize,
}

fn default_collocation_points() -> usize {
    32
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesselSpec {
    pub orders: Vec<i32>,
    pub x: Vec<f64>,
    #[serde(default = "default_digits")]
    pub digits: u32,
}

fn default_digits() -> u32 {
    30
}

/// A problem block whose field is sampled on its (required) grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldmapProblem {
    Scatter(ScatterProblem),
    Interface(InterfaceProblem),
    Quasistatic(QuasistaticProblem),
    Eigen(EigenProblem),
}

impl FieldmapProblem {
    pub fn grid(&self) -> Option<GridSpec> {
        match self {
            FieldmapProblem::Scatter(p) => p.grid,
            FieldmapProblem::Interface(p) => p.grid,
            FieldmapProblem::Quasistatic(p) => p.grid,
            FieldmapProblem::Eigen(p) => p.grid,
        }
    }
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn config_err(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {msg}"))
}

pub fn require_positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(
            key,
            format!("must be a finite number > 0, got {v}"),
        ))
    }
}

pub fn require_non_negative(key: &str, v: f64) -> Result<f64, CliError> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(
            key,
            format!("must be a finite number >= 0, got {v}"),
        ))
    }
}

pub fn require_point(key: &str, p: [f64; 2]) -> Result<Point, CliError> {
    if p.iter().all(|v| v.is_finite()) {
        Ok(Point::new(p[0], p[1]))
    } else {
        Err(config_err(key, "coordinates must be finite"))
    }
}

pub fn require_count(key: &str, v: usize, min: usize) -> Result<usize, CliError> {
    if v >= min {
        Ok(v)
    } else {
        Err(config_err(key, format!("must be >= {min}, got {v}")))
    }
}

impl MediumSpec {
    pub fn build(&self, key: &str) -> Result<MediumParams, CliError> {
        require_positive(&format!("{key}.mu"), self.mu)?;
        require_positive(&format!("{key}.rho"), self.rho)?;
        require_positive(&format!("{key}.omega"), self.omega)?;
        MediumParams::new(self.mu, self.rho, self.omega).map_err(|e| config_err(key, e))
    }
}

impl ClusterSpec {
    pub fn build(&self, key: &str) -> Result<ClusterGeometry, CliError> {
        match self {
            ClusterSpec::Ring(r) => {
                let k = format!("{key}.ring");
                require_count(&format!("{k}.n"), r.n, 1)?;
                let c = require_point(&format!("{k}.center"), r.center)?;
                require_positive(&format!("{k}.radius"), r.radius)?;
                require_positive(&format!("{k}.epsilon"), r.epsilon)?;
                require_non_negative(&format!("{k}.total_mass"), r.total_mass)?;
                uniform_circle_cluster(r.n, r.epsilon, r.total_mass, c, r.radius)
                    .map_err(|e| config_err(&k, e))
            }
            ClusterSpec::Explicit(x) => {
                let k = format!("{key}.explicit");
                require_positive(&format!("{k}.epsilon"), x.epsilon)?;
                let incs = x
                    .inclusions
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let ik = format!("{k}.inclusions[{i}]");
                        let c = require_point(&format!("{ik}.center"), s.center)?;
                        require_positive(&format!("{ik}.radius_factor"), s.radius_factor)?;
                        require_non_negative(&format!("{ik}.mass"), s.mass)?;
                        Inclusion::new(c, s.radius_factor, s.mass).map_err(|e| config_err(&ik, e))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if incs.is_empty() {
                    return Err(config_err(&format!("{k}.inclusions"), "must not be empty"));
                }
                ClusterGeometry::new(incs, x.epsilon).map_err(|e| config_err(&k, e))
            }
        }
    }
}

pub fn build_disk(key: &str, radius: f64) -> Result<DiskDomain, CliError> {
    require_positive(key, radius)?;
    DiskDomain::new(radius).map_err(|e| config_err(key, e))
}

impl GridSpec {
    pub fn validate(&self, key: &str) -> Result<(), CliError> {
        require_count(&format!("{key}.nx"), self.nx, 2)?;
        require_count(&format!("{key}.ny"), self.ny, 2)?;
        if self.nx.saturating_mul(self.ny) > 16_000_000 {
            return Err(config_err(key, "more than 16e6 grid points"));
        }
        for (name, r) in [("x", self.x), ("y", self.y)] {
            if !(r[0].is_finite() && r[1].is_finite() && r[0] < r[1]) {
                return Err(config_err(
                    &format!("{key}.{name}"),
                    format!("must be [min, max] with min < max, got {r:?}"),
                ));
            }
        }
        Ok(())
    }
}
